//! The unforced relaxation cycle: period measurement and the T_ULC ∝ τ
//! scaling that calibrates the slow timescale.
//!
//! ```bash
//! cargo run --release -p paleosync --example unforced_cycle
//! ```

use paleosync::forcing::ForcingModel;
use paleosync::integrator::{integrate, IntegratorConfig};
use paleosync::oscillator::{tau_for_period, unforced_period, OscillatorParams, SystemState};

fn main() {
    // alpha = 11.11, beta = 0.25: the reference oscillator.
    for tau in [35.09, 43.86] {
        let p = OscillatorParams::new(11.11, 0.25, 0.0, tau);
        let t = unforced_period(&p).unwrap();
        println!("tau = {tau:>6.2}  ->  T_ULC = {:>7.2} kyr (omega = {:.5} rad/kyr)", t.period, t.omega);
    }

    // Inversion: which tau gives a 100-kyr cycle?
    let tau100 = tau_for_period(100.0, 11.11, 0.25).unwrap();
    println!("tau for a 100-kyr cycle: {tau100:.3}");

    // Scaling: doubling tau doubles the period exactly.
    let t1 = unforced_period(&OscillatorParams::new(11.11, 0.25, 0.0, 20.0)).unwrap().period;
    let t2 = unforced_period(&OscillatorParams::new(11.11, 0.25, 0.0, 40.0)).unwrap().period;
    println!("T(2 tau)/T(tau) = {:.6}", t2 / t1);

    // No limit cycle outside |beta| < 1.
    let stuck = unforced_period(&OscillatorParams::new(11.11, 1.2, 0.0, 35.09));
    println!("beta = 1.2: {}", stuck.unwrap_err());

    // One settled cycle as CSV.
    let p = OscillatorParams::new(11.11, 0.25, 0.0, 35.09);
    let cfg = IntegratorConfig::default();
    let settled = integrate(
        SystemState::new(-0.24, -0.27, 0.0),
        &p,
        &ForcingModel::zero(),
        600.0,
        &cfg,
        |_| {},
    )
    .unwrap();
    let mut rows = vec!["t,x,y".to_string()];
    let mut next = settled.t;
    integrate(settled, &p, &ForcingModel::zero(), settled.t + 220.0, &cfg, |s| {
        if s.t >= next - 1e-9 {
            rows.push(format!("{},{},{}", s.t - settled.t, s.x, s.y));
            next += 0.5;
        }
    })
    .unwrap();
    std::fs::create_dir_all("out").unwrap();
    std::fs::write("out/unforced_cycle.csv", rows.join("\n") + "\n").unwrap();
    println!("wrote out/unforced_cycle.csv ({} samples over ~2 cycles)", rows.len() - 1);
}
