//! Basins of attraction of the attracting trajectories.
//!
//! Every grid initial condition at t₀ is integrated to a target time and
//! classified by a circle test: it belongs to basin k if it lands within
//! the capture radius of attracting trajectory k, where the radius is ¼ of
//! the minimum pairwise distance between attracting trajectories at the
//! classification time. Cells captured by no circle stay unresolved. For
//! the nonautonomous system the basins evolve with t₀, so a sequence of
//! maps tracks the attracting trajectories by deterministic continuation
//! (labels stay color-matched across frames by continuity).

use rayon::prelude::*;

use crate::attractors::AttractorSet;
use crate::forcing::ForcingModel;
use crate::integrator::{integrate, IntegratorConfig};
use crate::oscillator::{OscillatorParams, SystemState};
use crate::{Error, Result};

/// Capture radius as a fraction of the minimum pairwise attractor distance.
pub const CAPTURE_RADIUS_FRACTION: f64 = 0.25;
/// Attractors closer than this are numerically degenerate.
pub const DEGENERATE_DISTANCE: f64 = 1e-6;
/// Dwell time a stochastic path must stay on the new attractor before a
/// jump is recorded \[kyr\].
pub const JUMP_DWELL: f64 = 50.0;

/// A rectangular grid of initial conditions (inclusive endpoints).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

impl GridSpec {
    /// The 201×121 grid over x ∈ [−1.5, 1.5], y ∈ [−2.5, 2.5] used by the
    /// evolving-basin figures.
    pub fn default_basin() -> Self {
        Self { x_min: -1.5, x_max: 1.5, nx: 201, y_min: -2.5, y_max: 2.5, ny: 121 }
    }

    /// Same ranges at quarter resolution (101×61).
    pub fn quarter_basin() -> Self {
        Self { nx: 101, ny: 61, ..Self::default_basin() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::InvalidConfig("grid needs nx, ny >= 2".into()));
        }
        if !(self.x_max > self.x_min) || !(self.y_max > self.y_min) {
            return Err(Error::InvalidConfig("grid ranges must be nonempty".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinates of cell (ix, iy).
    pub fn point(&self, ix: usize, iy: usize) -> (f64, f64) {
        let fx = ix as f64 / (self.nx - 1) as f64;
        let fy = iy as f64 / (self.ny - 1) as f64;
        (
            self.x_min + fx * (self.x_max - self.x_min),
            self.y_min + fy * (self.y_max - self.y_min),
        )
    }

    /// Cell sizes (dx, dy).
    pub fn cell_size(&self) -> (f64, f64) {
        (
            (self.x_max - self.x_min) / (self.nx - 1) as f64,
            (self.y_max - self.y_min) / (self.ny - 1) as f64,
        )
    }
}

/// Basin label of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum BasinLabel {
    /// Captured by attracting trajectory k.
    Basin(usize),
    /// Captured by none of the circles by the target time.
    Unresolved,
}

/// A classified grid of initial conditions at one t₀.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BasinMap {
    pub t0: f64,
    /// Classification target time.
    pub t_target: f64,
    pub grid: GridSpec,
    /// Row-major labels: index iy * nx + ix.
    pub labels: Vec<BasinLabel>,
    /// Attracting-trajectory positions at the classification time.
    pub at_points: Vec<(f64, f64)>,
    /// ¼ of the min pairwise attractor distance (∞ for one attractor).
    pub capture_radius: f64,
    /// Per attractor: true when it lies within two grid cells of an
    /// opposing-label cell (close to its own basin boundary).
    pub boundary_proximate: Vec<bool>,
}

impl BasinMap {
    pub fn label(&self, ix: usize, iy: usize) -> BasinLabel {
        self.labels[iy * self.grid.nx + ix]
    }

    pub fn resolved_count(&self) -> usize {
        self.labels.iter().filter(|l| matches!(l, BasinLabel::Basin(_))).count()
    }
}

fn capture_radius(at_points: &[(f64, f64)]) -> Result<f64> {
    if at_points.is_empty() {
        return Err(Error::InvalidConfig("at least one attracting trajectory required".into()));
    }
    if at_points.len() == 1 {
        return Ok(f64::INFINITY);
    }
    let mut min_d = f64::INFINITY;
    for i in 0..at_points.len() {
        for j in (i + 1)..at_points.len() {
            let d = (at_points[i].0 - at_points[j].0).hypot(at_points[i].1 - at_points[j].1);
            min_d = min_d.min(d);
        }
    }
    if min_d < DEGENERATE_DISTANCE {
        return Err(Error::DegenerateAttractors { min_distance: min_d });
    }
    Ok(CAPTURE_RADIUS_FRACTION * min_d)
}

/// Classifies a grid of initial conditions at `t0` against the attracting
/// trajectories `at_points` (their positions at `t_target`).
pub fn classify_grid(
    params: &OscillatorParams,
    forcing: &ForcingModel,
    grid: &GridSpec,
    t0: f64,
    t_target: f64,
    at_points: &[(f64, f64)],
    config: &IntegratorConfig,
) -> Result<BasinMap> {
    grid.validate()?;
    if t_target <= t0 {
        return Err(Error::InvalidConfig(format!(
            "t_target ({t_target}) must exceed t0 ({t0})"
        )));
    }
    let radius = capture_radius(at_points)?;
    let labels: Vec<BasinLabel> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let (ix, iy) = (idx % grid.nx, idx / grid.nx);
            let (x0, y0) = grid.point(ix, iy);
            let end = integrate(SystemState::new(x0, y0, t0), params, forcing, t_target, config, |_| {});
            match end {
                Ok(s) => {
                    let mut best: Option<(usize, f64)> = None;
                    for (k, &(ax, ay)) in at_points.iter().enumerate() {
                        let d = (s.x - ax).hypot(s.y - ay);
                        if best.is_none_or(|(_, bd)| d < bd) {
                            best = Some((k, d));
                        }
                    }
                    match best {
                        Some((k, d)) if d < radius => BasinLabel::Basin(k),
                        _ => BasinLabel::Unresolved,
                    }
                }
                Err(_) => BasinLabel::Unresolved,
            }
        })
        .collect();

    let boundary_proximate = boundary_proximity(grid, &labels, at_points);
    Ok(BasinMap {
        t0,
        t_target,
        grid: *grid,
        labels,
        at_points: at_points.to_vec(),
        capture_radius: radius,
        boundary_proximate,
    })
}

/// Flags attractors lying within two grid cells of an opposing-label cell.
pub fn boundary_proximity(
    grid: &GridSpec,
    labels: &[BasinLabel],
    at_points: &[(f64, f64)],
) -> Vec<bool> {
    let (dx, dy) = grid.cell_size();
    at_points
        .iter()
        .enumerate()
        .map(|(k, &(ax, ay))| {
            let mut min_cells = f64::INFINITY;
            for iy in 0..grid.ny {
                for ix in 0..grid.nx {
                    match labels[iy * grid.nx + ix] {
                        BasinLabel::Basin(other) if other != k => {
                            let (cx, cy) = grid.point(ix, iy);
                            let d = ((cx - ax) / dx).hypot((cy - ay) / dy);
                            min_cells = min_cells.min(d);
                        }
                        _ => {}
                    }
                }
            }
            min_cells < 2.0
        })
        .collect()
}

/// Fraction of resolved cells per basin; fractions sum to 1.
pub fn basin_areas(map: &BasinMap) -> Result<Vec<f64>> {
    let mut counts = vec![0usize; map.at_points.len()];
    let mut resolved = 0usize;
    for l in &map.labels {
        if let BasinLabel::Basin(k) = l {
            counts[*k] += 1;
            resolved += 1;
        }
    }
    if resolved == 0 {
        return Err(Error::AllUnresolved);
    }
    Ok(counts.iter().map(|&c| c as f64 / resolved as f64).collect())
}

/// A sequence of basin maps over a list of initial times. The attracting
/// trajectories are located once from `ats` and continued deterministically
/// to each map's classification time, so basin indices keep a consistent
/// meaning across frames.
pub fn basin_sequence(
    params: &OscillatorParams,
    forcing: &ForcingModel,
    grid: &GridSpec,
    t0_list: &[f64],
    classification_gap: f64,
    ats: &AttractorSet,
    config: &IntegratorConfig,
) -> Result<Vec<BasinMap>> {
    if t0_list.is_empty() {
        return Err(Error::InvalidConfig("t0 list must be nonempty".into()));
    }
    if !(classification_gap > 0.0) {
        return Err(Error::InvalidConfig("classification gap must be > 0".into()));
    }
    let mut order: Vec<usize> = (0..t0_list.len()).collect();
    order.sort_by(|&a, &b| t0_list[a].total_cmp(&t0_list[b]));

    // Continue each attracting trajectory forward through the ordered
    // classification times.
    let mut maps: Vec<Option<BasinMap>> = vec![None; t0_list.len()];
    let mut at_states: Vec<SystemState> =
        ats.points.iter().map(|&(x, y)| SystemState::new(x, y, ats.t)).collect();
    for &i in &order {
        let t0 = t0_list[i];
        let t_target = t0 + classification_gap;
        if t_target < ats.t {
            return Err(Error::InvalidConfig(format!(
                "classification time {t_target} precedes the attractor reference time {}",
                ats.t
            )));
        }
        for s in &mut at_states {
            *s = integrate(*s, params, forcing, t_target, config, |_| {})?;
        }
        let at_points: Vec<(f64, f64)> = at_states.iter().map(|s| (s.x, s.y)).collect();
        maps[i] = Some(classify_grid(params, forcing, grid, t0, t_target, &at_points, config)?);
    }
    Ok(maps.into_iter().map(|m| m.expect("all frames built")).collect())
}

/// A detected jump between attracting trajectories.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Jump {
    /// Time the path first entered the new attractor's capture circle.
    pub t: f64,
    pub from_at: usize,
    pub to_at: usize,
}

/// Integrates one stochastic path from a state on attracting trajectory
/// `start_at` and records jumps: the path leaves the capture circle of its
/// current attractor and stays nearest to another one for a continuous
/// dwell of ≥ [`JUMP_DWELL`], which excludes grazing excursions. (At the
/// noise amplitudes of interest the path's fluctuation exceeds the capture
/// radius, so residence is judged by nearest attractor, entered through a
/// confirmed circle exit.) The attracting trajectories are tracked by
/// deterministic continuation in lockstep with the path.
///
/// The path advances with Euler-Maruyama while the attractors advance with
/// RK4, so `config.h` must be small enough that the Euler drift over the
/// window stays well below the capture radius (h = 0.002 kyr for the
/// multi-hundred-kyr experiments here).
pub fn jump_detect(
    params: &OscillatorParams,
    forcing: &ForcingModel,
    ats: &AttractorSet,
    start_at: usize,
    t_end: f64,
    config: &IntegratorConfig,
) -> Result<Vec<Jump>> {
    if ats.points.len() < 2 {
        return Err(Error::InvalidConfig(
            "jump detection needs a multistable regime (>= 2 attracting trajectories)".into(),
        ));
    }
    if start_at >= ats.points.len() {
        return Err(Error::InvalidConfig(format!("start_at {start_at} out of range")));
    }
    params.validate()?;
    config.validate()?;
    if t_end < ats.t {
        return Err(Error::InvalidConfig(format!(
            "t_end ({t_end}) must be >= the attractor reference time ({})",
            ats.t
        )));
    }

    // Path (Euler-Maruyama) and attractors (RK4) advance in lockstep on the
    // same step grid, sharing one forcing stream.
    let mut at_pos: Vec<(f64, f64)> = ats.points.clone();
    let path0 = ats.points[start_at];
    let (mut px, mut py) = path0;
    let h = config.h;
    let sqrt_h = h.sqrt();
    let mut rng = crate::rng::Rng::new(config.seed);
    let mut seq = crate::integrator::ForcingSeq::new(forcing, ats.t, h);
    let n_steps = ((t_end - ats.t) / h).floor() as usize;

    let mut jumps = Vec::new();
    let mut current = start_at;
    let mut candidate: Option<(usize, f64)> = None; // (attractor, entry time)

    for k in 0..n_steps {
        let (f0, fm, f1) = seq.triple(k);
        let t_next = ats.t + (k + 1) as f64 * h;

        let (dx, dy) = crate::oscillator::derivative_with_forcing(px, py, params, f0);
        px += h * dx;
        py += h * dy + config.noise_b * sqrt_h * rng.normal();
        if !px.is_finite() || !py.is_finite() {
            return Err(Error::Diverged { t: t_next, x: px, y: py });
        }
        for p in &mut at_pos {
            let (nx, ny) = crate::integrator::rk4_step(p.0, p.1, params, f0, fm, f1, h);
            *p = (nx, ny);
        }

        let radius = capture_radius(&at_pos)?;
        let dist = |k: usize| -> f64 { (px - at_pos[k].0).hypot(py - at_pos[k].1) };
        let nearest = (0..at_pos.len())
            .min_by(|&a, &b| dist(a).total_cmp(&dist(b)))
            .expect("at least two attractors");
        match candidate {
            None => {
                if nearest != current && dist(current) > radius {
                    candidate = Some((nearest, t_next));
                }
            }
            Some((j, entry)) => {
                if nearest == j {
                    if t_next - entry >= JUMP_DWELL {
                        jumps.push(Jump { t: entry, from_at: current, to_at: j });
                        current = j;
                        candidate = None;
                    }
                } else if nearest == current {
                    // Grazing excursion: fell back before the dwell.
                    candidate = None;
                } else {
                    // Moved on to yet another attractor; restart the dwell.
                    candidate = Some((nearest, t_next));
                }
            }
        }
    }
    Ok(jumps)
}
