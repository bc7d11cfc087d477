//! Basins of attraction of the three attracting trajectories in the
//! multistable astronomical regime, on a reduced grid.
//!
//! ```bash
//! cargo run --release -p paleosync --example basin_map
//! ```

use paleosync::attractors::{locate_attractors, random_ics};
use paleosync::basins::{basin_areas, classify_grid, GridSpec};
use paleosync::cli::basin_svg;
use paleosync::forcing::ForcingModel;
use paleosync::integrator::IntegratorConfig;
use paleosync::oscillator::OscillatorParams;

fn main() {
    let params = OscillatorParams::reference(0.75).with_tau(43.86);
    let forcing = ForcingModel::insolation_dimensionless();
    let cfg = IntegratorConfig::default().with_h(0.1);

    // Locate the attracting trajectories at the classification time.
    let ics = random_ics(70, (-1.0, 1.0), (-1.0, 1.0), 3000);
    let ats = locate_attractors(&params, &forcing, &ics, 0.0, 550.0, 0.1, &cfg).unwrap();
    println!("{} attracting trajectories at t = 550 kyr:", ats.points.len());
    for (k, (x, y)) in ats.points.iter().enumerate() {
        println!("   AT{k}: ({x:+.4}, {y:+.4})");
    }

    // Classify a grid of initial conditions at t0 = 0 by the circle test
    // (capture radius = min pairwise AT distance / 4).
    let grid = GridSpec { nx: 76, ny: 46, ..GridSpec::default_basin() };
    let map = classify_grid(&params, &forcing, &grid, 0.0, 550.0, &ats.points, &cfg).unwrap();
    println!(
        "classified {} of {} cells (capture radius {:.4})",
        map.resolved_count(),
        grid.len(),
        map.capture_radius
    );
    let areas = basin_areas(&map).unwrap();
    for (k, a) in areas.iter().enumerate() {
        let flag = if map.boundary_proximate[k] { "  [close to its basin boundary]" } else { "" };
        println!("   basin {k}: {:.1}% of resolved cells{flag}", 100.0 * a);
    }

    std::fs::create_dir_all("out").unwrap();
    std::fs::write("out/basin_map.svg", basin_svg(&map)).unwrap();
    println!("wrote out/basin_map.svg");
}
