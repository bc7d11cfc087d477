//! Noise-induced jumps between coexisting attracting trajectories: in the
//! bistable proxy-fit regime, additive fluctuations on the fast variable
//! occasionally push the climate path into the other basin.
//!
//! ```bash
//! cargo run --release -p paleosync --example stochastic_jumps
//! ```

use paleosync::attractors::{locate_attractors, random_ics};
use paleosync::basins::jump_detect;
use paleosync::forcing::{ForcingModel, OMEGA_EPSILON_1};
use paleosync::integrator::IntegratorConfig;
use paleosync::oscillator::OscillatorParams;
use paleosync::rng::mix_seed;

fn main() {
    let params = OscillatorParams::reference(0.75);
    let forcing = ForcingModel::insolation_dimensionless();
    let cfg = IntegratorConfig::default();

    // The two attracting trajectories of the fit regime at t = -700 kyr.
    let ics = random_ics(70, (-1.0, 1.0), (-1.0, 1.0), 99);
    let ats = locate_attractors(&params, &forcing, &ics, -3700.0, -700.0, 0.1, &cfg).unwrap();
    println!(
        "{} attracting trajectories at t = -700 kyr, separation {:.3}",
        ats.points.len(),
        ats.min_distance
    );

    // Noise amplitude of the jump experiment: b = 0.5 sqrt(omega_eps1).
    let b = 0.5 * OMEGA_EPSILON_1.sqrt();
    let jump_cfg = cfg.with_h(0.002);
    let mut first_jumps = Vec::new();
    let n_paths = 20;
    for path in 0..n_paths {
        let jcfg = jump_cfg.with_noise(b, mix_seed(2026, path));
        let jumps =
            jump_detect(&params, &forcing, &ats, (path % 2) as usize, 0.0, &jcfg).unwrap();
        if let Some(j) = jumps.first() {
            first_jumps.push((path, j.t, j.from_at, j.to_at));
        }
    }
    println!(
        "{} of {n_paths} noisy paths jumped over [-700, 0] kyr (b = {b:.4}):",
        first_jumps.len()
    );
    for (path, t, from, to) in &first_jumps {
        println!("   path {path:2}: AT{from} -> AT{to} at t = {t:7.1} kyr");
    }

    // Control: without noise nothing ever jumps.
    let quiet = jump_detect(&params, &forcing, &ats, 0, 0.0, &jump_cfg).unwrap();
    println!("control (b = 0): {} jumps", quiet.len());
}
