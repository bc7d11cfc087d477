//! Counting attracting trajectories in three regimes: unforced (no
//! synchronization), 2:1 frequency locking on a 41-kyr sinusoid (two
//! attracting trajectories), and multistable generalized synchronization
//! on the quasiperiodic insolation (three attracting trajectories).
//!
//! ```bash
//! cargo run --release -p paleosync --example synchronization_regimes
//! ```

use paleosync::attractors::{count_clusters, evolve_section, random_ics};
use paleosync::forcing::ForcingModel;
use paleosync::integrator::IntegratorConfig;
use paleosync::oscillator::OscillatorParams;

fn main() {
    let cfg = IntegratorConfig::default();
    // 70 random initial conditions at t0 = 0, evolved to the t = 550 kyr
    // section of the (x, y, t) phase space.
    let ics = random_ics(70, (-1.0, 1.0), (-1.0, 1.0), 3000);

    let cases = [
        ("unforced (gamma = 0)", OscillatorParams::reference(0.0), ForcingModel::zero()),
        (
            "41-kyr sine, gamma = 3.33 (2:1 locking)",
            OscillatorParams::reference(3.33),
            ForcingModel::sine_41(),
        ),
        (
            "insolation, gamma = 0.75, tau = 43.86",
            OscillatorParams::reference(0.75).with_tau(43.86),
            ForcingModel::insolation_dimensionless(),
        ),
    ];

    for (label, params, forcing) in cases {
        let section = evolve_section(&ics, 0.0, 550.0, &params, &forcing, &cfg).unwrap();
        let report = count_clusters(&section, 0.1).unwrap();
        print!("{label}: ");
        if report.is_saturated() {
            println!("no attracting trajectory (section stays scattered, {} raw clusters)", report.raw_count);
        } else {
            println!("N = {} attracting trajectories", report.n);
            for (k, c) in report.clusters.iter().enumerate() {
                println!(
                    "   AT{k}: ({:+.4}, {:+.4})  members = {:2}  diameter = {:.4}",
                    c.centroid.0,
                    c.centroid.1,
                    c.members.len(),
                    c.diameter
                );
            }
        }
    }

    println!("\nthe same count is robust to the clustering threshold:");
    let params = OscillatorParams::reference(0.75).with_tau(43.86);
    let forcing = ForcingModel::insolation_dimensionless();
    let section = evolve_section(&ics, 0.0, 550.0, &params, &forcing, &cfg).unwrap();
    for d_t in [0.05, 0.1, 0.2] {
        let r = count_clusters(&section, d_t).unwrap();
        println!("   d_T = {d_t:<5} ->  N = {}", r.n);
    }
}
