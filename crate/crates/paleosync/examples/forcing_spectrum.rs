//! The astronomical forcing: spectrum decomposition and basic statistics.
//!
//! ```bash
//! cargo run --release -p paleosync --example forcing_spectrum
//! ```

use paleosync::forcing::{ForcingModel, OBLIQUITY_TERMS};

fn main() {
    let insol = ForcingModel::insolation();

    println!("35-term insolation anomaly at 65N summer solstice");
    println!("(first {OBLIQUITY_TERMS} rows obliquity, remaining 20 precession)\n");

    let rows = insol.spectrum_table().unwrap();
    println!("{:>10}  {:>12}  {:>12}", "T [kyr]", "a [W/m2]", "a^2");
    for row in rows.iter().take(8) {
        println!("{:>10.2}  {:>12.3}  {:>12.2}", row.period, row.power.sqrt(), row.power);
    }
    let total: f64 = rows.iter().map(|r| r.power.sqrt()).sum();
    let top8: f64 = rows.iter().take(8).map(|r| r.power.sqrt()).sum();
    println!(
        "\nthe eight largest amplitudes carry {:.0}% of the summed amplitude",
        100.0 * top8 / total
    );

    let rms = insol.rms_amplitude((-1000.0, 0.0), 10_000).unwrap();
    let mean: f64 = (0..10_000)
        .map(|k| insol.eval(-1000.0 + (k as f64 + 0.5) * 0.1))
        .sum::<f64>()
        / 10_000.0;
    println!("over the validity window [-1000, 0] kyr:");
    println!("  rms  = {rms:.3} W/m2");
    println!("  mean = {mean:+.3} W/m2 (anomaly construction)");

    // The dimensionless variant used by the forced experiments.
    let dimensionless = ForcingModel::insolation_dimensionless();
    println!(
        "  dimensionless (scaled by a_eps1): rms = {:.4}",
        dimensionless.rms_amplitude((-1000.0, 0.0), 10_000).unwrap()
    );

    // A unit sinusoid for comparison: rms = sqrt(2)/2.
    let sine = ForcingModel::sine_41();
    println!(
        "  41-kyr unit sinusoid:             rms = {:.4}",
        sine.rms_amplitude((0.0, 41.0), 10_000).unwrap()
    );
}
