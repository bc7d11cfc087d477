//! The modified van der Pol relaxation oscillator
//!
//! ```text
//! τ ẋ = −[ y + β − γ F(t) ]
//! τ ẏ = −α [ Φ'(y) − x ]
//! ```
//!
//! `x` is the slow variable (ice volume), `y` the slow-fast variable whose
//! dynamics is shaped by the two-well potential Φ. The cubic potential has
//! Φ'(y) = y³/3 − y. For |β| < 1 the unforced system has a stable limit
//! cycle of period T_ULC ∝ τ; for |β| > 1 a stable equilibrium.

use crate::forcing::ForcingModel;
use crate::{Error, Result};

/// Which two-well potential drives the fast variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Potential {
    /// Φ'(y) = y³/3 − y.
    Cubic,
    /// Φ'₅(y) = (y+1.7)(y+1.58)(y+0.8)·y·(y−0.5), a robustness fixture.
    Quintic,
}

/// Roots of the quintic Φ'₅ product form.
const QUINTIC_ROOTS: [f64; 5] = [-1.7, -1.58, -0.8, 0.0, 0.5];

/// Derivative of the climatic potential.
pub fn potential_derivative(y: f64, potential: Potential) -> f64 {
    match potential {
        Potential::Cubic => y * y * y / 3.0 - y,
        Potential::Quintic => QUINTIC_ROOTS.iter().map(|r| y - r).product(),
    }
}

/// Second derivative Φ''(y); enters the Jacobian.
pub fn potential_second_derivative(y: f64, potential: Potential) -> f64 {
    match potential {
        Potential::Cubic => y * y - 1.0,
        Potential::Quintic => {
            // Product rule over the five factors.
            (0..5)
                .map(|skip| {
                    QUINTIC_ROOTS
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != skip)
                        .map(|(_, r)| y - r)
                        .product::<f64>()
                })
                .sum()
        }
    }
}

/// Model parameters of the oscillator.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OscillatorParams {
    /// Timescale-separation ratio (dimensionless, > 0).
    pub alpha: f64,
    /// Symmetry-breaking drift (dimensionless).
    pub beta: f64,
    /// Forcing efficiency (dimensionless, ≥ 0).
    pub gamma: f64,
    /// Slow timescale \[kyr, > 0\].
    pub tau: f64,
    pub potential: Potential,
}

impl OscillatorParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, tau: f64) -> Self {
        Self { alpha, beta, gamma, tau, potential: Potential::Cubic }
    }

    /// The reference parameter set used throughout the forced experiments
    /// (with γ supplied per experiment): α = 11.11, β = 0.25, τ = 35.09,
    /// cubic potential, T_ULC ≈ 100 kyr.
    pub fn reference(gamma: f64) -> Self {
        Self::new(11.11, 0.25, gamma, 35.09)
    }

    pub fn with_potential(mut self, potential: Potential) -> Self {
        self.potential = potential;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidConfig(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if !(self.tau > 0.0) {
            return Err(Error::InvalidConfig(format!("tau must be > 0, got {}", self.tau)));
        }
        if !(self.gamma >= 0.0) {
            return Err(Error::InvalidConfig(format!("gamma must be ≥ 0, got {}", self.gamma)));
        }
        if !self.beta.is_finite() {
            return Err(Error::InvalidConfig("beta must be finite".into()));
        }
        Ok(())
    }
}

/// A phase point of the nonautonomous system.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SystemState {
    /// Slow variable (ice volume, dimensionless).
    pub x: f64,
    /// Slow-fast variable (dimensionless).
    pub y: f64,
    /// Time \[kyr\].
    pub t: f64,
}

impl SystemState {
    pub fn new(x: f64, y: f64, t: f64) -> Self {
        Self { x, y, t }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.t.is_finite()
    }

    /// Euclidean distance in the (x, y) plane.
    pub fn distance(&self, other: &SystemState) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Right-hand side (dx/dt, dy/dt) with the forcing value already evaluated.
#[inline]
pub(crate) fn derivative_with_forcing(
    x: f64,
    y: f64,
    p: &OscillatorParams,
    f: f64,
) -> (f64, f64) {
    let dx = -(y + p.beta - p.gamma * f) / p.tau;
    let dy = -p.alpha * (potential_derivative(y, p.potential) - x) / p.tau;
    (dx, dy)
}

/// The vector field of the forced system at `state`.
pub fn vector_field(
    state: &SystemState,
    params: &OscillatorParams,
    forcing: &ForcingModel,
) -> (f64, f64) {
    derivative_with_forcing(state.x, state.y, params, forcing.eval(state.t))
}

/// Jacobian of the flow, a function of y only \[1/kyr\]:
///
/// ```text
/// J = −[[0, 1], [−α, α Φ''(y)]] / τ
/// ```
pub fn jacobian(y: f64, params: &OscillatorParams) -> [[f64; 2]; 2] {
    let phi2 = potential_second_derivative(y, params.potential);
    [
        [0.0, -1.0 / params.tau],
        [params.alpha / params.tau, -params.alpha * phi2 / params.tau],
    ]
}

/// Largest real part of the Jacobian eigenvalues at y \[1/kyr\].
///
/// Closed form from trace/determinant: det J = α/τ² > 0 always, so the sign
/// equals the sign of the trace, and the value is positive exactly for
/// Φ''(y) < 0 (the interval (−1, 1) for the cubic potential).
pub fn instantaneous_lle(y: f64, params: &OscillatorParams) -> f64 {
    let trace = -params.alpha * potential_second_derivative(y, params.potential) / params.tau;
    let det = params.alpha / (params.tau * params.tau);
    let disc = trace * trace - 4.0 * det;
    if disc >= 0.0 {
        0.5 * (trace + disc.sqrt())
    } else {
        0.5 * trace
    }
}

/// Max real part of the eigenvalues of an arbitrary 2×2 matrix, solved from
/// the characteristic polynomial. Used as the independent route against
/// [`instantaneous_lle`].
pub fn max_real_eigenvalue_2x2(m: &[[f64; 2]; 2]) -> f64 {
    let trace = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = trace * trace - 4.0 * det;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        (0.5 * (trace + sq)).max(0.5 * (trace - sq))
    } else {
        0.5 * trace
    }
}

/// Result of a period measurement of the unforced limit cycle.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct UnforcedPeriod {
    /// Period T_ULC \[kyr\].
    pub period: f64,
    /// Angular velocity ω_ULC = 2π/T_ULC \[rad/kyr\].
    pub omega: f64,
}

/// Number of initial limit-cycle transits discarded before measuring.
const TRANSIENT_CYCLES: usize = 5;
/// Number of crossing intervals averaged for the period.
const MEASURED_CYCLES: usize = 8;

/// Measures the period of the unforced (γ = 0) limit cycle from linearly
/// interpolated upward zero crossings of y, after discarding the first
/// five cycles as transient. Fails with [`Error::NoLimitCycle`] for
/// |β| ≥ 1, where the unforced system has a stable equilibrium instead.
pub fn unforced_period(params: &OscillatorParams) -> Result<UnforcedPeriod> {
    params.validate()?;
    if params.beta.abs() >= 1.0 {
        return Err(Error::NoLimitCycle { beta: params.beta });
    }
    let p = OscillatorParams { gamma: 0.0, ..*params };

    // Step scaled with τ so the crossing resolution is τ-independent.
    let h = 0.002 * p.tau;
    let needed = TRANSIENT_CYCLES + MEASURED_CYCLES + 1;
    let max_steps = (400.0 * needed as f64 / 0.002) as usize;

    let (mut x, mut y) = (1.0, 1.5);
    let mut t = 0.0;
    let mut crossings: Vec<f64> = Vec::with_capacity(needed);
    for _ in 0..max_steps {
        let (nx, ny) = rk4_unforced_step(x, y, &p, h);
        if ny.is_nan() || nx.is_nan() {
            return Err(Error::Diverged { t, x, y });
        }
        if y <= 0.0 && ny > 0.0 {
            // Linear interpolation of the crossing time inside the step.
            let frac = -y / (ny - y);
            crossings.push(t + frac * h);
            if crossings.len() == needed {
                break;
            }
        }
        x = nx;
        y = ny;
        t += h;
    }
    if crossings.len() < needed {
        return Err(Error::NoLimitCycle { beta: params.beta });
    }
    let first = crossings[TRANSIENT_CYCLES];
    let last = crossings[needed - 1];
    let period = (last - first) / MEASURED_CYCLES as f64;
    Ok(UnforcedPeriod { period, omega: std::f64::consts::TAU / period })
}

/// Inverts [`unforced_period`] through the exact T_ULC ∝ τ scaling of the
/// unforced system: returns the τ giving the requested period.
pub fn tau_for_period(target_period: f64, alpha: f64, beta: f64) -> Result<f64> {
    if !(target_period > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "target period must be > 0, got {target_period}"
        )));
    }
    let unit = OscillatorParams::new(alpha, beta, 0.0, 1.0);
    let t1 = unforced_period(&unit)?.period;
    Ok(target_period / t1)
}

/// One classical RK4 step of the unforced system (γ = 0 path used by the
/// period measurement; the general integrator lives in [`crate::integrator`]).
#[inline]
fn rk4_unforced_step(x: f64, y: f64, p: &OscillatorParams, h: f64) -> (f64, f64) {
    let f = |x: f64, y: f64| derivative_with_forcing(x, y, p, 0.0);
    let (k1x, k1y) = f(x, y);
    let (k2x, k2y) = f(x + 0.5 * h * k1x, y + 0.5 * h * k1y);
    let (k3x, k3y) = f(x + 0.5 * h * k2x, y + 0.5 * h * k2y);
    let (k4x, k4y) = f(x + h * k3x, y + h * k3y);
    (
        x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
    )
}
