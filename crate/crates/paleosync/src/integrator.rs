//! Deterministic fixed-step integration.
//!
//! Classical 4th-order Runge-Kutta with the final partial step shortened to
//! land exactly on the requested end time. The tangent system δŻ = J(y(t)) δZ
//! is advanced with the same substage y values as the base trajectory, and a
//! Gram-Schmidt reorthonormalization (GSR) of the tangent frame keeps the
//! vectors from overflowing or collapsing onto the leading direction; the
//! log stretch removed at each GSR is accumulated per vector. Stochastic
//! runs use Euler-Maruyama with additive noise b·dW on the fast variable.
//!
//! All integrations are deterministic functions of their inputs and the
//! seed; identical inputs reproduce identical bits.

use crate::forcing::{ForcingKind, ForcingModel};
use crate::oscillator::{
    derivative_with_forcing, potential_second_derivative, OscillatorParams, SystemState,
};
use crate::rng::Rng;
use crate::{Error, Result};

/// Default integration step \[kyr\].
pub const DEFAULT_H: f64 = 0.05;
/// Default Gram-Schmidt reorthonormalization interval \[kyr\].
pub const DEFAULT_GSR_INTERVAL: f64 = 1.0;

/// Step size, GSR cadence, noise amplitude and seed for one integration.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IntegratorConfig {
    /// Fixed step h \[kyr\], > 0.
    pub h: f64,
    /// Tangent-frame reorthonormalization interval \[kyr\], ≥ h.
    pub gsr_interval: f64,
    /// Diffusion amplitude b of the additive noise on y (0 = deterministic).
    pub noise_b: f64,
    /// Seed for the noise stream.
    pub seed: u64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { h: DEFAULT_H, gsr_interval: DEFAULT_GSR_INTERVAL, noise_b: 0.0, seed: 0x9E3779B9 }
    }
}

impl IntegratorConfig {
    pub fn with_h(mut self, h: f64) -> Self {
        self.h = h;
        // Keep the invariant gsr_interval >= h for small-τ runs.
        if self.gsr_interval < h {
            self.gsr_interval = h;
        }
        self
    }

    pub fn with_gsr_interval(mut self, gsr: f64) -> Self {
        self.gsr_interval = gsr;
        self
    }

    pub fn with_noise(mut self, b: f64, seed: u64) -> Self {
        self.noise_b = b;
        self.seed = seed;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0) {
            return Err(Error::InvalidConfig(format!("step h must be > 0, got {}", self.h)));
        }
        if self.gsr_interval < self.h {
            return Err(Error::InvalidConfig(format!(
                "gsr_interval ({}) must be >= h ({})",
                self.gsr_interval, self.h
            )));
        }
        if !(self.noise_b >= 0.0) {
            return Err(Error::InvalidConfig(format!("noise_b must be >= 0, got {}", self.noise_b)));
        }
        Ok(())
    }
}

/// A base state together with an (approximately orthonormal) frame of
/// tangent perturbations δZ = [δx, δy] and their accumulated log stretch.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TangentBundle {
    pub base: SystemState,
    /// One or two tangent vectors; orthonormal right after each GSR.
    pub frame: Vec<[f64; 2]>,
    /// Accumulated ln of the stretch removed from each vector.
    pub log_norms: Vec<f64>,
}

impl TangentBundle {
    /// Bundle with the canonical orthonormal frame (e₁[, e₂]).
    pub fn orthonormal(base: SystemState, k: usize) -> Result<Self> {
        if !(1..=2).contains(&k) {
            return Err(Error::InvalidConfig(format!("tangent frame size must be 1 or 2, got {k}")));
        }
        let mut frame = vec![[1.0, 0.0]];
        if k == 2 {
            frame.push([0.0, 1.0]);
        }
        Ok(Self { base, frame, log_norms: vec![0.0; k] })
    }

    /// Bundle with a caller-supplied frame (normalized on first GSR).
    pub fn with_frame(base: SystemState, frame: Vec<[f64; 2]>) -> Result<Self> {
        if frame.is_empty() || frame.len() > 2 {
            return Err(Error::InvalidConfig(format!(
                "tangent frame size must be 1 or 2, got {}",
                frame.len()
            )));
        }
        let k = frame.len();
        Ok(Self { base, frame, log_norms: vec![0.0; k] })
    }

    /// Resets the accumulated log norms (e.g. after a transient spin-up).
    pub fn reset_log_norms(&mut self) {
        for l in &mut self.log_norms {
            *l = 0.0;
        }
    }
}

/// Gram-Schmidt pass over a small frame: orthogonalizes against earlier
/// vectors, records ln‖·‖ of the remainder, normalizes.
pub fn gram_schmidt<const N: usize>(frame: &mut [[f64; N]], log_norms: &mut [f64]) {
    for i in 0..frame.len() {
        for j in 0..i {
            let dot: f64 = (0..N).map(|d| frame[i][d] * frame[j][d]).sum();
            let (head, tail) = frame.split_at_mut(i);
            for (v, w) in tail[0].iter_mut().zip(head[j].iter()) {
                *v -= dot * w;
            }
        }
        let norm = frame[i].iter().map(|v| v * v).sum::<f64>().sqrt();
        log_norms[i] += norm.ln();
        let inv = 1.0 / norm;
        for v in &mut frame[i] {
            *v *= inv;
        }
    }
}

// ---------------------------------------------------------------------------
// Forcing evaluation along the fixed step grid.
//
// RK4 needs F at t, t + h/2 and t + h for every step. Direct summation of
// the 35-term series is exact but dominates the cost of long sweeps, so the
// series gets a streaming evaluator: per-term (sin, cos) phasors advanced by
// an exact half-step rotation (trig addition theorem) and re-anchored with a
// direct evaluation every few thousand steps, which keeps the accumulated
// rounding below 1e-11 while being ~20x faster. Values are identical to
// direct summation to well below the integration error.
// ---------------------------------------------------------------------------

const PHASOR_ANCHOR_HALF_STEPS: usize = 8192;

pub(crate) struct SeriesPhasor {
    omega: Vec<f64>,
    s_coef: Vec<f64>,
    c_coef: Vec<f64>,
    sin: Vec<f64>,
    cos: Vec<f64>,
    rot_sin: Vec<f64>,
    rot_cos: Vec<f64>,
    scale: f64,
    t0: f64,
    half_h: f64,
    half_index: usize,
}

impl SeriesPhasor {
    fn new(terms: &[crate::forcing::HarmonicTerm], scale: f64, t0: f64, h: f64) -> Self {
        let half_h = 0.5 * h;
        let n = terms.len();
        let mut p = Self {
            omega: Vec::with_capacity(n),
            s_coef: Vec::with_capacity(n),
            c_coef: Vec::with_capacity(n),
            sin: vec![0.0; n],
            cos: vec![0.0; n],
            rot_sin: Vec::with_capacity(n),
            rot_cos: Vec::with_capacity(n),
            scale,
            t0,
            half_h,
            half_index: 0,
        };
        for term in terms {
            p.omega.push(term.omega);
            p.s_coef.push(term.s);
            p.c_coef.push(term.c);
            let (rs, rc) = (term.omega * half_h).sin_cos();
            p.rot_sin.push(rs);
            p.rot_cos.push(rc);
        }
        p.anchor();
        p
    }

    /// Recomputes the phasors by direct evaluation at the current grid time.
    fn anchor(&mut self) {
        let t = self.t0 + self.half_index as f64 * self.half_h;
        for i in 0..self.omega.len() {
            let (s, c) = (self.omega[i] * t).sin_cos();
            self.sin[i] = s;
            self.cos[i] = c;
        }
    }

    #[inline]
    fn value(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.omega.len() {
            acc += self.s_coef[i] * self.sin[i] + self.c_coef[i] * self.cos[i];
        }
        self.scale * acc
    }

    #[inline]
    fn advance_half(&mut self) {
        for i in 0..self.omega.len() {
            let (s, c) = (self.sin[i], self.cos[i]);
            self.sin[i] = s * self.rot_cos[i] + c * self.rot_sin[i];
            self.cos[i] = c * self.rot_cos[i] - s * self.rot_sin[i];
        }
        self.half_index += 1;
        if self.half_index.is_multiple_of(PHASOR_ANCHOR_HALF_STEPS) {
            self.anchor();
        }
    }
}

/// Sequential per-step forcing values on the grid t0 + k·h.
pub(crate) enum ForcingSeq<'a> {
    Zero,
    Direct { model: &'a ForcingModel, t0: f64, h: f64, next_f0: f64 },
    Phasor(Box<SeriesPhasor>, &'a ForcingModel),
}

impl<'a> ForcingSeq<'a> {
    pub(crate) fn new(model: &'a ForcingModel, t0: f64, h: f64) -> Self {
        match &model.kind {
            ForcingKind::Zero => ForcingSeq::Zero,
            ForcingKind::Sinusoid { .. } => {
                ForcingSeq::Direct { model, t0, h, next_f0: model.eval(t0) }
            }
            ForcingKind::Series(terms) => {
                ForcingSeq::Phasor(Box::new(SeriesPhasor::new(terms, model.scale, t0, h)), model)
            }
        }
    }

    /// Values (f(t_k), f(t_k + h/2), f(t_k + h)). Steps must be consumed in
    /// order k = 0, 1, 2, ...
    #[inline]
    pub(crate) fn triple(&mut self, k: usize) -> (f64, f64, f64) {
        match self {
            ForcingSeq::Zero => (0.0, 0.0, 0.0),
            ForcingSeq::Direct { model, t0, h, next_f0 } => {
                let f0 = *next_f0;
                let tk = *t0 + k as f64 * *h;
                let fm = model.eval(tk + 0.5 * *h);
                let f1 = model.eval(tk + *h);
                *next_f0 = f1;
                (f0, fm, f1)
            }
            ForcingSeq::Phasor(p, _) => {
                let f0 = p.value();
                p.advance_half();
                let fm = p.value();
                p.advance_half();
                let f1 = p.value();
                (f0, fm, f1)
            }
        }
    }

    /// Direct evaluation at an arbitrary time (final partial steps).
    #[inline]
    pub(crate) fn at(&self, model_time: f64) -> f64 {
        match self {
            ForcingSeq::Zero => 0.0,
            ForcingSeq::Direct { model, .. } => model.eval(model_time),
            ForcingSeq::Phasor(_, model) => model.eval(model_time),
        }
    }
}

// ---------------------------------------------------------------------------
// RK4 steps for the oscillator, with and without the tangent frame.
// ---------------------------------------------------------------------------

/// One RK4 step of the forced oscillator; forcing values supplied for the
/// step start, midpoint and end.
#[inline]
pub(crate) fn rk4_step(
    x: f64,
    y: f64,
    p: &OscillatorParams,
    f0: f64,
    fm: f64,
    f1: f64,
    h: f64,
) -> (f64, f64) {
    let (k1x, k1y) = derivative_with_forcing(x, y, p, f0);
    let (k2x, k2y) = derivative_with_forcing(x + 0.5 * h * k1x, y + 0.5 * h * k1y, p, fm);
    let (k3x, k3y) = derivative_with_forcing(x + 0.5 * h * k2x, y + 0.5 * h * k2y, p, fm);
    let (k4x, k4y) = derivative_with_forcing(x + h * k3x, y + h * k3y, p, f1);
    (
        x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
    )
}

/// Tangent derivative J(y)·v, with J(y) = −[[0, 1], [−α, αΦ''(y)]]/τ.
#[inline]
fn tangent_derivative(v: [f64; 2], y: f64, p: &OscillatorParams) -> [f64; 2] {
    let phi2 = potential_second_derivative(y, p.potential);
    [
        -v[1] / p.tau,
        (p.alpha * v[0] - p.alpha * phi2 * v[1]) / p.tau,
    ]
}

/// One RK4 step of the augmented (base + tangent frame) system. The frame
/// stages use the same substage y values as the base trajectory.
#[inline]
#[allow(clippy::too_many_arguments)]
pub(crate) fn rk4_step_with_frame(
    x: f64,
    y: f64,
    frame: &mut [[f64; 2]],
    p: &OscillatorParams,
    f0: f64,
    fm: f64,
    f1: f64,
    h: f64,
) -> (f64, f64) {
    let (k1x, k1y) = derivative_with_forcing(x, y, p, f0);
    let y1 = y + 0.5 * h * k1y;
    let (k2x, k2y) = derivative_with_forcing(x + 0.5 * h * k1x, y1, p, fm);
    let y2 = y + 0.5 * h * k2y;
    let (k3x, k3y) = derivative_with_forcing(x + 0.5 * h * k2x, y2, p, fm);
    let y3 = y + h * k3y;
    let (k4x, k4y) = derivative_with_forcing(x + h * k3x, y3, p, f1);

    for v in frame.iter_mut() {
        let kv1 = tangent_derivative(*v, y, p);
        let kv2 = tangent_derivative(
            [v[0] + 0.5 * h * kv1[0], v[1] + 0.5 * h * kv1[1]],
            y1,
            p,
        );
        let kv3 = tangent_derivative(
            [v[0] + 0.5 * h * kv2[0], v[1] + 0.5 * h * kv2[1]],
            y2,
            p,
        );
        let kv4 = tangent_derivative([v[0] + h * kv3[0], v[1] + h * kv3[1]], y3, p);
        v[0] += h / 6.0 * (kv1[0] + 2.0 * kv2[0] + 2.0 * kv3[0] + kv4[0]);
        v[1] += h / 6.0 * (kv1[1] + 2.0 * kv2[1] + 2.0 * kv3[1] + kv4[1]);
    }
    (
        x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
    )
}

/// Splits [t_start, t_end] into full steps of h plus an optional remainder.
fn step_plan(t_start: f64, t_end: f64, h: f64) -> (usize, f64) {
    let span = t_end - t_start;
    let n_full = (span / h + 1e-9).floor() as usize;
    let remainder = span - n_full as f64 * h;
    if remainder > 1e-9 * h {
        (n_full, remainder)
    } else {
        (n_full, 0.0)
    }
}

/// Integrates the forced oscillator from `state` to `t_end` with classical
/// RK4. The observer is invoked with the initial state and after every step.
pub fn integrate(
    state: SystemState,
    params: &OscillatorParams,
    forcing: &ForcingModel,
    t_end: f64,
    config: &IntegratorConfig,
    mut observer: impl FnMut(&SystemState),
) -> Result<SystemState> {
    params.validate()?;
    config.validate()?;
    if t_end < state.t {
        return Err(Error::InvalidConfig(format!(
            "t_end ({t_end}) must be >= state.t ({})",
            state.t
        )));
    }
    let h = config.h;
    let (n_full, remainder) = step_plan(state.t, t_end, h);
    let mut seq = ForcingSeq::new(forcing, state.t, h);
    let (mut x, mut y) = (state.x, state.y);
    let t0 = state.t;
    observer(&state);
    for k in 0..n_full {
        let (f0, fm, f1) = seq.triple(k);
        let (nx, ny) = rk4_step(x, y, params, f0, fm, f1, h);
        if !nx.is_finite() || !ny.is_finite() {
            return Err(Error::Diverged { t: t0 + k as f64 * h, x, y });
        }
        x = nx;
        y = ny;
        observer(&SystemState::new(x, y, t0 + (k + 1) as f64 * h));
    }
    let mut t = t0 + n_full as f64 * h;
    if remainder > 0.0 {
        let f0 = seq.at(t);
        let fm = seq.at(t + 0.5 * remainder);
        let f1 = seq.at(t + remainder);
        let (nx, ny) = rk4_step(x, y, params, f0, fm, f1, remainder);
        if !nx.is_finite() || !ny.is_finite() {
            return Err(Error::Diverged { t, x, y });
        }
        x = nx;
        y = ny;
        observer(&SystemState::new(x, y, t_end));
    }
    t = t_end;
    Ok(SystemState::new(x, y, t))
}

/// Advances a tangent bundle to `t_end`: base and frame move with the same
/// RK4 substages, the frame is reorthonormalized every `gsr_interval` and
/// once more at the end, and the removed log stretch accumulates in
/// `log_norms`. The returned frame is orthonormal.
pub fn integrate_with_tangent(
    bundle: TangentBundle,
    params: &OscillatorParams,
    forcing: &ForcingModel,
    t_end: f64,
    config: &IntegratorConfig,
) -> Result<TangentBundle> {
    params.validate()?;
    config.validate()?;
    let TangentBundle { base, mut frame, mut log_norms } = bundle;
    if t_end < base.t {
        return Err(Error::InvalidConfig(format!(
            "t_end ({t_end}) must be >= base.t ({})",
            base.t
        )));
    }
    let h = config.h;
    let (n_full, remainder) = step_plan(base.t, t_end, h);
    let gsr_every = (config.gsr_interval / h).round().max(1.0) as usize;
    let mut seq = ForcingSeq::new(forcing, base.t, h);
    let (mut x, mut y) = (base.x, base.y);
    let t0 = base.t;
    for k in 0..n_full {
        let (f0, fm, f1) = seq.triple(k);
        let (nx, ny) = rk4_step_with_frame(x, y, &mut frame, params, f0, fm, f1, h);
        if !nx.is_finite() || !ny.is_finite() {
            return Err(Error::Diverged { t: t0 + k as f64 * h, x, y });
        }
        x = nx;
        y = ny;
        if (k + 1) % gsr_every == 0 {
            gram_schmidt(&mut frame, &mut log_norms);
        }
    }
    let t = t0 + n_full as f64 * h;
    if remainder > 0.0 {
        let f0 = seq.at(t);
        let fm = seq.at(t + 0.5 * remainder);
        let f1 = seq.at(t + remainder);
        let (nx, ny) = rk4_step_with_frame(x, y, &mut frame, params, f0, fm, f1, remainder);
        if !nx.is_finite() || !ny.is_finite() {
            return Err(Error::Diverged { t, x, y });
        }
        x = nx;
        y = ny;
    }
    gram_schmidt(&mut frame, &mut log_norms);
    Ok(TangentBundle { base: SystemState::new(x, y, t_end), frame, log_norms })
}

/// Euler-Maruyama integration with additive noise on the fast variable:
/// each step adds b·√h·ξ to y, ξ drawn from the seeded stream. With
/// `noise_b = 0` this degenerates to deterministic Euler stepping.
/// Bit-reproducible given (seed, h).
pub fn integrate_sde(
    state: SystemState,
    params: &OscillatorParams,
    forcing: &ForcingModel,
    t_end: f64,
    config: &IntegratorConfig,
) -> Result<SystemState> {
    integrate_sde_observed(state, params, forcing, t_end, config, |_| {})
}

/// [`integrate_sde`] with a per-step observer.
pub fn integrate_sde_observed(
    state: SystemState,
    params: &OscillatorParams,
    forcing: &ForcingModel,
    t_end: f64,
    config: &IntegratorConfig,
    mut observer: impl FnMut(&SystemState),
) -> Result<SystemState> {
    params.validate()?;
    config.validate()?;
    if t_end < state.t {
        return Err(Error::InvalidConfig(format!(
            "t_end ({t_end}) must be >= state.t ({})",
            state.t
        )));
    }
    let h = config.h;
    let (n_full, remainder) = step_plan(state.t, t_end, h);
    let mut seq = ForcingSeq::new(forcing, state.t, h);
    let mut rng = Rng::new(config.seed);
    let sqrt_h = h.sqrt();
    let (mut x, mut y) = (state.x, state.y);
    let t0 = state.t;
    observer(&state);
    for k in 0..n_full {
        let (f0, _, _) = seq.triple(k);
        let (dx, dy) = derivative_with_forcing(x, y, params, f0);
        let nx = x + h * dx;
        let ny = y + h * dy + config.noise_b * sqrt_h * rng.normal();
        if !nx.is_finite() || !ny.is_finite() {
            return Err(Error::Diverged { t: t0 + k as f64 * h, x, y });
        }
        x = nx;
        y = ny;
        observer(&SystemState::new(x, y, t0 + (k + 1) as f64 * h));
    }
    let t = t0 + n_full as f64 * h;
    if remainder > 0.0 {
        let f0 = seq.at(t);
        let (dx, dy) = derivative_with_forcing(x, y, params, f0);
        let nx = x + remainder * dx;
        let ny = y + remainder * dy + config.noise_b * remainder.sqrt() * rng.normal();
        if !nx.is_finite() || !ny.is_finite() {
            return Err(Error::Diverged { t, x, y });
        }
        x = nx;
        y = ny;
        observer(&SystemState::new(x, y, t_end));
    }
    Ok(SystemState::new(x, y, t_end))
}

// ---------------------------------------------------------------------------
// Generic small-dimension flows (validation fixtures and test doubles).
// ---------------------------------------------------------------------------

/// A smooth flow ż = f(t, z) of fixed small dimension with an analytic
/// Jacobian. Used for validation fixtures (Lorenz-63) and as the slow
/// reference route for the specialized oscillator path.
pub trait Flow<const N: usize> {
    fn derivative(&self, t: f64, z: &[f64; N]) -> [f64; N];
    fn jacobian(&self, t: f64, z: &[f64; N]) -> [[f64; N]; N];
}

#[inline]
fn matvec<const N: usize>(m: &[[f64; N]; N], v: &[f64; N]) -> [f64; N] {
    let mut out = [0.0; N];
    for i in 0..N {
        let mut acc = 0.0;
        for j in 0..N {
            acc += m[i][j] * v[j];
        }
        out[i] = acc;
    }
    out
}

#[inline]
fn axpy<const N: usize>(a: f64, x: &[f64; N], y: &[f64; N]) -> [f64; N] {
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = y[i] + a * x[i];
    }
    out
}

/// One RK4 step of a generic flow.
pub fn rk4_flow_step<F: Flow<N>, const N: usize>(
    flow: &F,
    t: f64,
    z: &[f64; N],
    h: f64,
) -> [f64; N] {
    let k1 = flow.derivative(t, z);
    let k2 = flow.derivative(t + 0.5 * h, &axpy(0.5 * h, &k1, z));
    let k3 = flow.derivative(t + 0.5 * h, &axpy(0.5 * h, &k2, z));
    let k4 = flow.derivative(t + h, &axpy(h, &k3, z));
    let mut out = *z;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// One RK4 step of a generic flow together with a tangent frame, sharing
/// the base substage states.
pub fn rk4_flow_step_with_frame<F: Flow<N>, const N: usize>(
    flow: &F,
    t: f64,
    z: &[f64; N],
    frame: &mut [[f64; N]],
    h: f64,
) -> [f64; N] {
    let k1 = flow.derivative(t, z);
    let z1 = axpy(0.5 * h, &k1, z);
    let k2 = flow.derivative(t + 0.5 * h, &z1);
    let z2 = axpy(0.5 * h, &k2, z);
    let k3 = flow.derivative(t + 0.5 * h, &z2);
    let z3 = axpy(h, &k3, z);
    let k4 = flow.derivative(t + h, &z3);

    let j0 = flow.jacobian(t, z);
    let j1 = flow.jacobian(t + 0.5 * h, &z1);
    let j2 = flow.jacobian(t + 0.5 * h, &z2);
    let j3 = flow.jacobian(t + h, &z3);
    for v in frame.iter_mut() {
        let kv1 = matvec(&j0, v);
        let kv2 = matvec(&j1, &axpy(0.5 * h, &kv1, v));
        let kv3 = matvec(&j2, &axpy(0.5 * h, &kv2, v));
        let kv4 = matvec(&j3, &axpy(h, &kv3, v));
        for i in 0..N {
            v[i] += h / 6.0 * (kv1[i] + 2.0 * kv2[i] + 2.0 * kv3[i] + kv4[i]);
        }
    }

    let mut out = *z;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// The forced oscillator as a generic [`Flow`] with direct forcing
/// evaluation. Slow reference route used in tests against the specialized
/// steppers.
pub struct OscillatorFlow<'a> {
    pub params: &'a OscillatorParams,
    pub forcing: &'a ForcingModel,
}

impl Flow<2> for OscillatorFlow<'_> {
    fn derivative(&self, t: f64, z: &[f64; 2]) -> [f64; 2] {
        let (dx, dy) = derivative_with_forcing(z[0], z[1], self.params, self.forcing.eval(t));
        [dx, dy]
    }

    fn jacobian(&self, _t: f64, z: &[f64; 2]) -> [[f64; 2]; 2] {
        crate::oscillator::jacobian(z[1], self.params)
    }
}
