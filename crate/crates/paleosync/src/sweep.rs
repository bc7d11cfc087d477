//! Parallel parameter-space maps.
//!
//! Two map types over a rectangular parameter grid: the largest Lyapunov
//! exponent λ_max (synchronization ⇔ λ_max < 0) and the number of
//! attracting trajectories N by the counting protocol (49-point IC grid,
//! threshold clustering at d_T = 0.1, t₀ = −40·T_F for periodic forcing and
//! −1600 kyr for the astronomical forcing, section at t = 0). Cells are
//! independent tasks distributed over the rayon pool; per-cell failures are
//! recorded in the cell status and the sweep continues.

use rayon::prelude::*;

use crate::attractors::{count_clusters, evolve_section, protocol_grid_49, DEFAULT_D_T};
use crate::forcing::{ForcingKind, ForcingModel};
use crate::integrator::IntegratorConfig;
use crate::lyapunov::{long_term_spectrum, SpectrumProtocol};
use crate::oscillator::{tau_for_period, OscillatorParams, SystemState};
use crate::rng::mix_seed;
use crate::{Error, Result};

/// Which model parameter an axis drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum AxisParam {
    /// Unforced limit-cycle period \[kyr\]; realized through τ.
    TUlc,
    /// Forcing efficiency γ.
    Gamma,
    /// Asymmetry parameter β.
    Beta,
}

impl AxisParam {
    pub fn name(&self) -> &'static str {
        match self {
            AxisParam::TUlc => "tulc",
            AxisParam::Gamma => "gamma",
            AxisParam::Beta => "beta",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tulc" | "t_ulc" => Ok(AxisParam::TUlc),
            "gamma" => Ok(AxisParam::Gamma),
            "beta" => Ok(AxisParam::Beta),
            other => Err(Error::InvalidConfig(format!(
                "unknown axis parameter `{other}` (expected tulc, gamma or beta)"
            ))),
        }
    }
}

/// One sweep axis: a parameter and its grid values.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AxisSpec {
    pub param: AxisParam,
    pub values: Vec<f64>,
}

impl AxisSpec {
    /// Inclusive linspace from `start` to `stop` with `count` points.
    pub fn linspace(param: AxisParam, start: f64, stop: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidConfig(format!("axis needs >= 2 points, got {count}")));
        }
        let step = (stop - start) / (count - 1) as f64;
        Ok(Self {
            param,
            values: (0..count).map(|i| start + i as f64 * step).collect(),
        })
    }

    /// Parses `name:start:stop:count`, e.g. `tulc:80:180:40`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 4 {
            return Err(Error::InvalidConfig(format!(
                "axis spec must be name:start:stop:count, got `{spec}`"
            )));
        }
        let param = AxisParam::parse(parts[0])?;
        let num = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::InvalidConfig(format!("axis spec: bad {what} `{s}`")))
        };
        let count = parts[3]
            .parse::<usize>()
            .map_err(|_| Error::InvalidConfig(format!("axis spec: bad count `{}`", parts[3])))?;
        Self::linspace(param, num(parts[1], "start")?, num(parts[2], "stop")?, count)
    }
}

/// What a sweep cell holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SweepKind {
    /// λ_max over the grid.
    Lle,
    /// Attracting-trajectory count N over the grid.
    Count,
}

/// Per-cell completion status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum CellStatus {
    Ok,
    Diverged,
    /// Counting saturated: none or more than five attracting trajectories.
    Saturated,
}

impl CellStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::Diverged => "diverged",
            CellStatus::Saturated => "saturated",
        }
    }
}

/// One computed cell.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Cell {
    pub value: f64,
    pub status: CellStatus,
}

/// Fixed (non-swept) experiment configuration for a sweep.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SweepBase {
    /// Parameters; axis values override the swept fields per cell.
    pub params: OscillatorParams,
    pub forcing: ForcingModel,
    /// Averaging span for λ_max cells \[kyr\].
    pub t_total: f64,
    /// Transient skipped before averaging \[kyr\].
    pub transient: f64,
    /// Counting threshold d_T.
    pub d_t: f64,
    pub integrator: IntegratorConfig,
    /// Global seed; cell streams derive from mix(seed, cell index).
    pub seed: u64,
}

impl SweepBase {
    pub fn new(params: OscillatorParams, forcing: ForcingModel) -> Self {
        Self {
            params,
            forcing,
            t_total: 3.0e6,
            transient: 500.0,
            d_t: DEFAULT_D_T,
            integrator: IntegratorConfig::default(),
            seed: 0xC0FFEE,
        }
    }
}

/// A completed rectangular sweep.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SweepGrid {
    pub kind: SweepKind,
    pub x_axis: AxisSpec,
    pub y_axis: AxisSpec,
    /// Row-major cells: index iy * nx + ix.
    pub cells: Vec<Cell>,
    /// Snapshot of the fixed configuration.
    pub base: SweepBase,
    pub seed: u64,
}

impl SweepGrid {
    pub fn cell(&self, ix: usize, iy: usize) -> &Cell {
        &self.cells[iy * self.x_axis.values.len() + ix]
    }

    /// Cell whose axis values are closest to (x, y).
    pub fn cell_near(&self, x: f64, y: f64) -> &Cell {
        let ix = nearest_index(&self.x_axis.values, x);
        let iy = nearest_index(&self.y_axis.values, y);
        self.cell(ix, iy)
    }
}

fn nearest_index(values: &[f64], target: f64) -> usize {
    values
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| (*a - target).abs().total_cmp(&(*b - target).abs()))
        .map(|(i, _)| i)
        .unwrap()
}

/// Applies one axis value to the cell parameters. T_ULC is realized by τ
/// through the linear scaling τ = T_ULC / T_ULC(τ=1).
fn apply_axis(
    params: &mut OscillatorParams,
    param: AxisParam,
    value: f64,
    tau_per_period: f64,
) -> Result<()> {
    match param {
        AxisParam::TUlc => {
            if !(value > 0.0) {
                return Err(Error::InvalidConfig(format!("T_ULC must be > 0, got {value}")));
            }
            params.tau = value * tau_per_period;
        }
        AxisParam::Gamma => {
            if !(value >= 0.0) {
                return Err(Error::InvalidConfig(format!("gamma must be >= 0, got {value}")));
            }
            params.gamma = value;
        }
        AxisParam::Beta => params.beta = value,
    }
    Ok(())
}

/// τ giving a unit period, cached once per sweep when a T_ULC axis exists.
fn tau_per_unit_period(base: &SweepBase, x: &AxisSpec, y: &AxisSpec) -> Result<f64> {
    if x.param == AxisParam::TUlc || y.param == AxisParam::TUlc {
        // β varies per cell only on (β, γ) sweeps, which never carry a
        // T_ULC axis, so the base β is the right one here.
        tau_for_period(1.0, base.params.alpha, base.params.beta)
    } else {
        Ok(1.0)
    }
}

fn check_axes(x: &AxisSpec, y: &AxisSpec) -> Result<()> {
    if x.param == y.param {
        return Err(Error::InvalidConfig("sweep axes must drive different parameters".into()));
    }
    if x.values.is_empty() || y.values.is_empty() {
        return Err(Error::InvalidConfig("sweep axes must be nonempty".into()));
    }
    Ok(())
}

/// λ_max over the grid: one long-term spectrum per cell.
pub fn sweep_lle(x_axis: AxisSpec, y_axis: AxisSpec, base: SweepBase) -> Result<SweepGrid> {
    check_axes(&x_axis, &y_axis)?;
    base.params.validate()?;
    let tau_unit = tau_per_unit_period(&base, &x_axis, &y_axis)?;
    let nx = x_axis.values.len();
    let protocol = SpectrumProtocol {
        t_total: base.t_total,
        transient: base.transient,
        frame: 1,
        trace_stride: None,
    };
    let cells: Vec<Cell> = (0..nx * y_axis.values.len())
        .into_par_iter()
        .map(|idx| {
            let (ix, iy) = (idx % nx, idx / nx);
            let mut params = base.params;
            if let Err(_e) = apply_axis(&mut params, x_axis.param, x_axis.values[ix], tau_unit)
                .and_then(|_| apply_axis(&mut params, y_axis.param, y_axis.values[iy], tau_unit))
            {
                return Cell { value: f64::NAN, status: CellStatus::Diverged };
            }
            let config = base.integrator.with_seed(mix_seed(base.seed, idx as u64));
            let ic = SystemState::new(1.0, 1.0, 0.0);
            match long_term_spectrum(&params, &base.forcing, ic, &protocol, &config) {
                Ok(rec) => Cell { value: rec.lambda_max(), status: CellStatus::Ok },
                Err(_) => Cell { value: f64::NAN, status: CellStatus::Diverged },
            }
        })
        .collect();
    Ok(SweepGrid { kind: SweepKind::Lle, x_axis, y_axis, cells, seed: base.seed, base })
}

/// The counting protocol's t₀ for a given forcing: −40·T_F for periodic
/// forcing, −1600 kyr for series forcing (and for zero forcing, where the
/// convention is immaterial).
pub fn counting_t0(forcing: &ForcingModel) -> f64 {
    match &forcing.kind {
        ForcingKind::Sinusoid { period, .. } => -40.0 * period,
        _ => -1600.0,
    }
}

/// N over the grid: one counting-protocol run per cell (49-point IC grid,
/// section at t = 0, threshold d_T).
pub fn sweep_count(x_axis: AxisSpec, y_axis: AxisSpec, base: SweepBase) -> Result<SweepGrid> {
    check_axes(&x_axis, &y_axis)?;
    base.params.validate()?;
    let tau_unit = tau_per_unit_period(&base, &x_axis, &y_axis)?;
    let nx = x_axis.values.len();
    let ics = protocol_grid_49();
    let t0 = counting_t0(&base.forcing);
    let cells: Vec<Cell> = (0..nx * y_axis.values.len())
        .into_par_iter()
        .map(|idx| {
            let (ix, iy) = (idx % nx, idx / nx);
            let mut params = base.params;
            if let Err(_e) = apply_axis(&mut params, x_axis.param, x_axis.values[ix], tau_unit)
                .and_then(|_| apply_axis(&mut params, y_axis.param, y_axis.values[iy], tau_unit))
            {
                return Cell { value: f64::NAN, status: CellStatus::Diverged };
            }
            let config = base.integrator.with_seed(mix_seed(base.seed, idx as u64));
            match evolve_section(&ics, t0, 0.0, &params, &base.forcing, &config)
                .and_then(|s| count_clusters(&s, base.d_t))
            {
                Ok(report) => {
                    let status = if report.is_saturated() {
                        CellStatus::Saturated
                    } else {
                        CellStatus::Ok
                    };
                    Cell { value: report.n as f64, status }
                }
                Err(_) => Cell { value: f64::NAN, status: CellStatus::Diverged },
            }
        })
        .collect();
    Ok(SweepGrid { kind: SweepKind::Count, x_axis, y_axis, cells, seed: base.seed, base })
}
