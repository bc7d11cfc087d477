//! paleosync — generalized synchronization of a conceptual ice-age
//! oscillator to astronomical forcing.
//!
//! The model is a modified van der Pol relaxation oscillator
//!
//! ```text
//! τ ẋ = −[ y + β − γ F(t) ]
//! τ ẏ = −α [ Φ'(y) − x ]        Φ'(y) = y³/3 − y
//! ```
//!
//! driven by F(t): zero, a pure sinusoid, or the 35-harmonic quasiperiodic
//! insolation anomaly at 65°N summer solstice. The library quantifies
//! whether (and how robustly) the oscillator synchronizes onto the forcing:
//!
//! * [`forcing`] — the forcing models and the insolation coefficient table;
//! * [`oscillator`] — vector field, Jacobian, instantaneous stability,
//!   unforced limit-cycle period;
//! * [`integrator`] — fixed-step RK4, coupled trajectory/tangent
//!   integration with Gram-Schmidt reorthonormalization, Euler-Maruyama
//!   stochastic stepping;
//! * [`lyapunov`] — long-term Lyapunov spectra, short-term windowed
//!   exponents, desynchronization episodes;
//! * [`attractors`] — evolving ensembles onto a fixed-time section and
//!   counting attracting trajectories by threshold clustering;
//! * [`basins`] — basins of attraction on initial-condition grids, evolving
//!   basin sequences, noise-induced jump detection;
//! * [`sweep`] — parallel parameter-space maps of λ_max and of the
//!   attracting-trajectory count N;
//! * [`cli`] — the command-line front end (`forcing`, `trajectory`,
//!   `lyapunov`, `clusters`, `basins`, `sweep`, `jumps`, `repro`).
//!
//! Runnable walkthroughs live under `examples/`; see the README for the
//! map. Everything is deterministic: integrations are fixed-step, random
//! ensembles and noise paths derive from explicit 64-bit seeds, and
//! re-running any experiment with the same configuration reproduces the
//! same bytes.

// Validations use `!(x > 0.0)` so NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attractors;
pub mod basins;
pub mod cli;
pub mod forcing;
pub mod integrator;
pub mod lyapunov;
pub mod oscillator;
pub mod rng;
pub mod sweep;

pub use forcing::{ForcingKind, ForcingModel, HarmonicTerm};
pub use integrator::{IntegratorConfig, TangentBundle};
pub use oscillator::{OscillatorParams, Potential, SystemState};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter or configuration value violates its contract. The
    /// message names the offending field.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A trajectory left the finite domain; carries the last good state.
    #[error("trajectory diverged at t = {t} kyr (last good state x = {x}, y = {y})")]
    Diverged { t: f64, x: f64, y: f64 },

    /// The unforced system has a stable fixed point instead of a limit
    /// cycle (|β| ≥ 1).
    #[error("no limit cycle for beta = {beta}: |beta| >= 1 gives a stable fixed point")]
    NoLimitCycle { beta: f64 },

    /// Cluster counting saturated: none or more than five attracting
    /// trajectories, so no well-defined attractor set exists.
    #[error("attracting-trajectory count saturated: none or more than five")]
    NSaturated,

    /// Attracting trajectories too close to separate numerically.
    #[error("attracting trajectories degenerate: min pairwise distance {min_distance}")]
    DegenerateAttractors { min_distance: f64 },

    /// Basin statistics requested on a map with no resolved cells.
    #[error("basin map has no resolved cells")]
    AllUnresolved,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 0 ok, 2 config error, 3 numerical
    /// divergence, 4 saturated or degenerate result.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_) => 2,
            Error::Diverged { .. } => 3,
            Error::NoLimitCycle { .. }
            | Error::NSaturated
            | Error::DegenerateAttractors { .. }
            | Error::AllUnresolved => 4,
            Error::Io(_) | Error::Json(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
