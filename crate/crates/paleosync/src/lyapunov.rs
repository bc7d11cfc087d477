//! Lyapunov exponents along climatic trajectories.
//!
//! The long-term spectrum comes from the standard tangent-space method:
//! integrate the trajectory together with an orthonormal frame of tangent
//! vectors, reorthonormalize periodically (GSR), and average the removed
//! log stretches,
//!
//! ```text
//! λ_k = lim (1/t) ln ‖δZ_k(t)‖ / ‖δZ_k(0)‖
//! ```
//!
//! A negative λ_max certifies an attracting trajectory, i.e. generalized
//! synchronization onto the forcing. The short-term variant λ^H restricts
//! the average to a finite horizon H and reveals temporary
//! desynchronization episodes that the long-term average hides.

use crate::forcing::ForcingModel;
use crate::integrator::{
    gram_schmidt, integrate, integrate_with_tangent, rk4_flow_step_with_frame, Flow,
    IntegratorConfig, TangentBundle,
};
use crate::oscillator::{jacobian, OscillatorParams, SystemState};
use crate::rng::Rng;
use crate::{Error, Result};

/// Insolation-series validity window \[kyr\]; runs leaving it rely on the
/// quasiperiodic extension of the series and are flagged.
pub const SERIES_VALIDITY: (f64, f64) = (-1.0e6, 0.0);

/// A computed Lyapunov spectrum with its provenance.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LyapunovRecord {
    /// Exponents \[1/kyr\], sorted descending; length = tangent frame size.
    pub spectrum: Vec<f64>,
    /// Averaging span after the transient \[kyr\].
    pub t_total: f64,
    /// Skipped transient \[kyr\].
    pub transient_skipped: f64,
    /// Sampled running estimates (t, λ₁[, λ₂]).
    pub convergence_trace: Vec<(f64, Vec<f64>)>,
    /// Set when the running estimate still drifts more than 5% over the
    /// final tenth of the averaging span.
    pub not_converged: bool,
    /// Set when the run leaves the insolation-series validity window and a
    /// series forcing is in use (quasiperiodic extrapolation).
    pub forcing_extrapolated: bool,
}

impl LyapunovRecord {
    pub fn lambda_max(&self) -> f64 {
        self.spectrum[0]
    }
}

/// Protocol knobs for [`long_term_spectrum`].
#[derive(Debug, Clone, Copy)]
pub struct SpectrumProtocol {
    /// Averaging span after the transient \[kyr\].
    pub t_total: f64,
    /// Transient skipped before averaging \[kyr\].
    pub transient: f64,
    /// Tangent frame size (2 for this system).
    pub frame: usize,
    /// Convergence-trace sampling stride \[kyr\]; `None` disables the trace.
    pub trace_stride: Option<f64>,
}

impl Default for SpectrumProtocol {
    fn default() -> Self {
        Self { t_total: 3.0e6, transient: 500.0, frame: 2, trace_stride: Some(10.0) }
    }
}

impl SpectrumProtocol {
    pub fn new(t_total: f64, transient: f64) -> Self {
        Self { t_total, transient, ..Self::default() }
    }

    pub fn without_trace(mut self) -> Self {
        self.trace_stride = None;
        self
    }
}

/// Long-term Lyapunov spectrum of the forced oscillator started at `ic`.
///
/// The tangent frame spins up over the transient (log norms discarded) and
/// then accumulates over `t_total`. Exponents are the accumulated log
/// stretches divided by the averaging span.
pub fn long_term_spectrum(
    params: &OscillatorParams,
    forcing: &ForcingModel,
    ic: SystemState,
    protocol: &SpectrumProtocol,
    config: &IntegratorConfig,
) -> Result<LyapunovRecord> {
    if !(protocol.t_total > 0.0) || protocol.transient < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "spectrum protocol needs t_total > 0 and transient >= 0, got {} / {}",
            protocol.t_total, protocol.transient
        )));
    }
    let mut bundle = TangentBundle::orthonormal(ic, protocol.frame)?;

    // Transient spin-up: aligns the frame and lands on the attracting
    // trajectory; accumulated stretch is discarded.
    if protocol.transient > 0.0 {
        bundle =
            integrate_with_tangent(bundle, params, forcing, ic.t + protocol.transient, config)?;
        bundle.reset_log_norms();
    }

    let t_begin = bundle.base.t;
    let t_final = t_begin + protocol.t_total;
    let stride = protocol.trace_stride.unwrap_or(protocol.t_total / 10.0).max(config.h);
    let mut trace: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut at_90pct: Option<Vec<f64>> = None;

    let mut t = t_begin;
    while t < t_final - 1e-9 {
        let t_next = (t + stride).min(t_final);
        bundle = integrate_with_tangent(bundle, params, forcing, t_next, config)?;
        t = t_next;
        let span = t - t_begin;
        let running: Vec<f64> = bundle.log_norms.iter().map(|l| l / span).collect();
        if protocol.trace_stride.is_some() {
            trace.push((t, running.clone()));
        }
        if at_90pct.is_none() && span >= 0.9 * protocol.t_total {
            at_90pct = Some(running);
        }
    }

    let span = t - t_begin;
    let mut spectrum: Vec<f64> = bundle.log_norms.iter().map(|l| l / span).collect();
    spectrum.sort_by(|a, b| b.total_cmp(a));

    let not_converged = match &at_90pct {
        Some(early) => {
            let mut early = early.clone();
            early.sort_by(|a, b| b.total_cmp(a));
            spectrum.iter().zip(early.iter()).any(|(now, then)| {
                let scale = now.abs().max(0.01);
                (now - then).abs() / scale > 0.05
            })
        }
        None => false,
    };

    let forcing_extrapolated = matches!(forcing.kind, crate::forcing::ForcingKind::Series(_))
        && (ic.t < SERIES_VALIDITY.0 || t_final > SERIES_VALIDITY.1);

    Ok(LyapunovRecord {
        spectrum,
        t_total: span,
        transient_skipped: protocol.transient,
        convergence_trace: trace,
        not_converged,
        forcing_extrapolated,
    })
}

/// Spectrum of a generic flow fixture (e.g. Lorenz-63) by the same
/// tangent/GSR method.
pub fn flow_spectrum<F: Flow<N>, const N: usize>(
    flow: &F,
    z0: [f64; N],
    t_total: f64,
    transient: f64,
    h: f64,
    gsr_interval: f64,
) -> Result<Vec<f64>> {
    if !(h > 0.0) || !(t_total > 0.0) {
        return Err(Error::InvalidConfig("flow_spectrum needs h > 0 and t_total > 0".into()));
    }
    let gsr_every = (gsr_interval / h).round().max(1.0) as usize;
    let mut z = z0;
    let mut t = 0.0;
    // Transient without the frame.
    let n_transient = (transient / h).round() as usize;
    for _ in 0..n_transient {
        z = crate::integrator::rk4_flow_step(flow, t, &z, h);
        t += h;
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged { t, x: z[0], y: z[1] });
        }
    }
    let mut frame = [[0.0; N]; N];
    for (i, v) in frame.iter_mut().enumerate() {
        v[i] = 1.0;
    }
    let mut logs = vec![0.0; N];
    let n_main = (t_total / h).round() as usize;
    for k in 0..n_main {
        z = rk4_flow_step_with_frame(flow, t, &z, &mut frame, h);
        t += h;
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged { t, x: z[0], y: z[1] });
        }
        if (k + 1) % gsr_every == 0 {
            gram_schmidt(&mut frame, &mut logs);
        }
    }
    gram_schmidt(&mut frame, &mut logs);
    let span = n_main as f64 * h;
    let mut spectrum: Vec<f64> = logs.iter().map(|l| l / span).collect();
    spectrum.sort_by(|a, b| b.total_cmp(a));
    Ok(spectrum)
}

/// The Lorenz-63 validation fixture (σ, r, b). Its spectrum sum equals
/// tr J = −(σ + 1 + b) = −13.66 at the classical parameters.
pub struct Lorenz63 {
    pub sigma: f64,
    pub r: f64,
    pub b: f64,
}

impl Lorenz63 {
    pub fn classical() -> Self {
        Self { sigma: 10.0, r: 28.0, b: 8.0 / 3.0 }
    }
}

impl Flow<3> for Lorenz63 {
    fn derivative(&self, _t: f64, z: &[f64; 3]) -> [f64; 3] {
        [
            self.sigma * (z[1] - z[0]),
            z[0] * (self.r - z[2]) - z[1],
            z[0] * z[1] - self.b * z[2],
        ]
    }

    fn jacobian(&self, _t: f64, z: &[f64; 3]) -> [[f64; 3]; 3] {
        [
            [-self.sigma, self.sigma, 0.0],
            [self.r - z[2], -1.0, -z[0]],
            [z[1], z[0], -self.b],
        ]
    }
}

/// Short-term largest Lyapunov exponents λ^H sampled along an attracting
/// trajectory.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ShortTermSeries {
    /// Horizon H \[kyr\].
    pub horizon: f64,
    /// Time-ordered samples (t, λ^H at window [t, t+H]).
    pub samples: Vec<(f64, f64)>,
}

/// Tangent spin-up before each window, to align the vector with the most
/// unstable direction \[kyr\].
pub const SHORT_TERM_SPINUP: f64 = 20.0;

/// λ^H along the trajectory through `attracting_ic` (which the caller has
/// pre-converged onto an attracting trajectory, e.g. with a long
/// [`integrate`] run). At each sample time t ∈ [t0, t1] a unit tangent
/// vector is aligned over a 20-kyr spin-up, then stretched over [t, t+H]:
/// λ^H(t) = ln ‖δZ(t+H)‖ / H.
pub fn short_term_lle(
    params: &OscillatorParams,
    forcing: &ForcingModel,
    attracting_ic: SystemState,
    window: (f64, f64),
    horizon: f64,
    sample_stride: f64,
    config: &IntegratorConfig,
) -> Result<ShortTermSeries> {
    let (t0, t1) = window;
    if !(horizon > 0.0) {
        return Err(Error::InvalidConfig(format!("horizon must be > 0, got {horizon}")));
    }
    if !(t1 >= t0) || !(sample_stride > 0.0) {
        return Err(Error::InvalidConfig("short_term_lle window or stride invalid".into()));
    }
    if attracting_ic.t > t0 - SHORT_TERM_SPINUP {
        return Err(Error::InvalidConfig(format!(
            "attracting_ic.t ({}) must precede the window start minus the {SHORT_TERM_SPINUP} kyr spin-up",
            attracting_ic.t
        )));
    }

    let mut samples = Vec::new();
    let mut carried = attracting_ic;
    let n = ((t1 - t0) / sample_stride).floor() as usize;
    for i in 0..=n {
        let t_sample = t0 + i as f64 * sample_stride;
        // Advance the base trajectory to the spin-up start of this window.
        carried = integrate(carried, params, forcing, t_sample - SHORT_TERM_SPINUP, config, |_| {})?;
        // Spin up a unit vector, renormalize at the window start, stretch
        // over the horizon.
        let bundle = TangentBundle::orthonormal(carried, 1)?;
        let mut bundle = integrate_with_tangent(bundle, params, forcing, t_sample, config)?;
        bundle.reset_log_norms();
        let out = integrate_with_tangent(bundle, params, forcing, t_sample + horizon, config)?;
        samples.push((t_sample, out.log_norms[0] / horizon));
    }
    Ok(ShortTermSeries { horizon, samples })
}

/// Maximal contiguous episodes with λ^H > 0, endpoints linearly
/// interpolated at the sign changes.
pub fn desync_episodes(series: &ShortTermSeries) -> Vec<(f64, f64)> {
    let samples = &series.samples;
    let mut episodes = Vec::new();
    let mut start: Option<f64> = None;
    for w in samples.windows(2) {
        let (t_a, v_a) = w[0];
        let (t_b, v_b) = w[1];
        if v_a <= 0.0 && v_b > 0.0 {
            start = Some(t_a + (t_b - t_a) * (-v_a) / (v_b - v_a));
        } else if v_a > 0.0 && v_b <= 0.0 {
            let t_cross = t_a + (t_b - t_a) * v_a / (v_a - v_b);
            let s = start.take().unwrap_or(samples[0].0);
            episodes.push((s, t_cross));
        }
    }
    if let Some(s) = start {
        episodes.push((s, samples.last().unwrap().0));
    } else if !samples.is_empty() && samples[0].1 > 0.0 && episodes.is_empty() {
        // Entire series positive.
        episodes.push((samples[0].0, samples.last().unwrap().0));
    }
    episodes
}

/// Convenience: converge an arbitrary initial condition onto an attracting
/// trajectory by plain forward integration.
pub fn settle(
    params: &OscillatorParams,
    forcing: &ForcingModel,
    ic: SystemState,
    t_end: f64,
    config: &IntegratorConfig,
) -> Result<SystemState> {
    integrate(ic, params, forcing, t_end, config, |_| {})
}

/// A random orthonormal 2-frame, for frame-independence checks.
pub fn random_frame(seed: u64) -> Vec<[f64; 2]> {
    let mut rng = Rng::new(seed);
    let angle = rng.uniform(0.0, std::f64::consts::TAU);
    let (s, c) = angle.sin_cos();
    vec![[c, s], [-s, c]]
}

/// Time-averaged trace of the Jacobian along a trajectory, by trapezoidal
/// quadrature. Independent route for the Σλᵢ = ⟨tr J⟩ identity.
pub fn mean_jacobian_trace(
    params: &OscillatorParams,
    forcing: &ForcingModel,
    ic: SystemState,
    t_end: f64,
    config: &IntegratorConfig,
) -> Result<f64> {
    let mut acc = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    integrate(ic, params, forcing, t_end, config, |s| {
        let j = jacobian(s.y, params);
        let tr = j[0][0] + j[1][1];
        if let Some((tp, trp)) = prev {
            acc += 0.5 * (trp + tr) * (s.t - tp);
        }
        prev = Some((s.t, tr));
    })?;
    Ok(acc / (t_end - ic.t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forcing::ForcingModel;

    #[test]
    fn unforced_cycle_has_a_zero_and_a_negative_exponent() {
        let p = OscillatorParams::reference(0.0);
        let protocol = SpectrumProtocol { t_total: 20_000.0, transient: 600.0, frame: 2, trace_stride: None };
        let cfg = IntegratorConfig::default();
        let rec = long_term_spectrum(&p, &ForcingModel::zero(), SystemState::new(1.0, 1.5, 0.0), &protocol, &cfg)
            .unwrap();
        assert!(rec.spectrum[0].abs() < 5e-3, "λ1 = {}", rec.spectrum[0]);
        assert!(rec.spectrum[1] < -0.05, "λ2 = {}", rec.spectrum[1]);
        assert!(!rec.forcing_extrapolated);
    }

    #[test]
    fn lorenz_63_spectrum_sum_matches_the_trace() {
        let flow = Lorenz63::classical();
        let spec = flow_spectrum(&flow, [1.0, 1.0, 1.0], 400.0, 20.0, 0.005, 0.5).unwrap();
        let sum: f64 = spec.iter().sum();
        assert!((sum - (-13.6667)).abs() < 0.05, "Σλ = {sum}, spectrum {spec:?}");
        // Classical values: λ ≈ (0.906, 0, −14.57).
        assert!((spec[0] - 0.906).abs() < 0.05, "λ1 = {}", spec[0]);
        assert!(spec[1].abs() < 0.02, "λ2 = {}", spec[1]);
    }

    #[test]
    fn trace_identity_for_the_forced_oscillator() {
        let p = OscillatorParams::reference(0.75);
        let forcing = ForcingModel::insolation_dimensionless();
        let cfg = IntegratorConfig::default().with_h(0.02);
        let protocol = SpectrumProtocol { t_total: 30_000.0, transient: 500.0, frame: 2, trace_stride: None };
        let ic = SystemState::new(-0.24, -0.27, 0.0);
        let rec = long_term_spectrum(&p, &forcing, ic, &protocol, &cfg).unwrap();
        let sum: f64 = rec.spectrum.iter().sum();

        let settled = settle(&p, &forcing, ic, 500.0, &cfg).unwrap();
        let mean_tr = mean_jacobian_trace(&p, &forcing, settled, 500.0 + 30_000.0, &cfg).unwrap();
        assert!(
            (sum - mean_tr).abs() / mean_tr.abs() < 1e-3,
            "Σλ = {sum} vs <tr J> = {mean_tr}"
        );
        assert!(rec.forcing_extrapolated, "3e4 kyr past t = 0 leaves the validity window");
    }

    #[test]
    fn spectrum_is_frame_orientation_independent() {
        let p = OscillatorParams::reference(0.75);
        let forcing = ForcingModel::insolation_dimensionless();
        let cfg = IntegratorConfig::default();
        let protocol = SpectrumProtocol { t_total: 20_000.0, transient: 500.0, frame: 2, trace_stride: None };
        let ic = SystemState::new(0.5, -0.5, 0.0);
        let rec_a = long_term_spectrum(&p, &forcing, ic, &protocol, &cfg).unwrap();

        // Same computation but seeded with a rotated initial frame.
        let mut bundle = TangentBundle::with_frame(ic, random_frame(3)).unwrap();
        bundle = integrate_with_tangent(bundle, &p, &forcing, ic.t + 500.0, &cfg).unwrap();
        bundle.reset_log_norms();
        let out = integrate_with_tangent(bundle, &p, &forcing, ic.t + 500.0 + 20_000.0, &cfg).unwrap();
        let mut spec_b: Vec<f64> = out.log_norms.iter().map(|l| l / 20_000.0).collect();
        spec_b.sort_by(|a, b| b.total_cmp(a));

        for (a, b) in rec_a.spectrum.iter().zip(spec_b.iter()) {
            assert!((a - b).abs() < 1e-3, "{a} vs {b}");
        }
    }

    /// Linear flow ż = a z: λ^H = a exactly, for every H.
    struct ScalarGrowth {
        a: f64,
    }

    impl Flow<2> for ScalarGrowth {
        fn derivative(&self, _t: f64, z: &[f64; 2]) -> [f64; 2] {
            [self.a * z[0], self.a * z[1]]
        }
        fn jacobian(&self, _t: f64, _z: &[f64; 2]) -> [[f64; 2]; 2] {
            [[self.a, 0.0], [0.0, self.a]]
        }
    }

    #[test]
    fn linear_double_gives_exact_short_term_rate() {
        let flow = ScalarGrowth { a: 0.37 };
        for horizon in [5.0, 20.0, 50.0] {
            let mut frame = [[1.0, 0.0]];
            let mut logs = [0.0];
            let h = 0.01_f64;
            let n = (horizon / h).round() as usize;
            let mut z = [1.0, 0.0];
            for k in 0..n {
                z = rk4_flow_step_with_frame(&flow, k as f64 * h, &z, &mut frame, h);
            }
            gram_schmidt(&mut frame, &mut logs);
            let lam = logs[0] / horizon;
            assert!((lam - 0.37).abs() < 1e-9, "H = {horizon}: λ^H = {lam}");
        }
    }

    #[test]
    fn desync_all_negative_is_empty() {
        let series = ShortTermSeries {
            horizon: 50.0,
            samples: (0..20).map(|i| (i as f64, -0.01 - 0.001 * i as f64)).collect(),
        };
        assert!(desync_episodes(&series).is_empty());
    }

    #[test]
    fn desync_interpolates_single_episode() {
        let series = ShortTermSeries {
            horizon: 50.0,
            samples: vec![(0.0, -1.0), (1.0, 1.0), (2.0, 1.0), (3.0, -1.0)],
        };
        let eps = desync_episodes(&series);
        assert_eq!(eps.len(), 1);
        let (a, b) = eps[0];
        assert!((a - 0.5).abs() < 1e-12);
        assert!((b - 2.5).abs() < 1e-12);
    }

    #[test]
    fn short_term_limit_recovers_long_term() {
        // H equal to the full averaging span reproduces λ_max within 2%.
        let p = OscillatorParams::reference(3.33);
        let forcing = ForcingModel::sine_41();
        let cfg = IntegratorConfig::default();
        let protocol = SpectrumProtocol { t_total: 3000.0, transient: 500.0, frame: 1, trace_stride: None };
        let ic = SystemState::new(0.5, 0.5, 0.0);
        let rec = long_term_spectrum(&p, &forcing, ic, &protocol, &cfg).unwrap();

        let settled = settle(&p, &forcing, ic, 480.0 - 20.0, &cfg).unwrap();
        let series =
            short_term_lle(&p, &forcing, settled, (500.0, 500.0), 3000.0, 1.0, &cfg).unwrap();
        let lam_h = series.samples[0].1;
        let tol = (0.02 * rec.lambda_max().abs()).max(5e-4);
        assert!(
            (lam_h - rec.lambda_max()).abs() < tol,
            "λ^H = {lam_h} vs λ_max = {}",
            rec.lambda_max()
        );
    }
}
