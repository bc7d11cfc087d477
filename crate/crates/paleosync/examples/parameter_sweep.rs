//! A small (T_ULC, γ) map of the attracting-trajectory count N for the
//! 41-kyr periodic forcing: the Arnol'd tongues rooted at multiples of the
//! forcing period carry N = 1, 2, 3, ...
//!
//! ```bash
//! cargo run --release -p paleosync --example parameter_sweep
//! ```

use paleosync::cli::sweep_svg;
use paleosync::forcing::ForcingModel;
use paleosync::oscillator::OscillatorParams;
use paleosync::sweep::{sweep_count, AxisParam, AxisSpec, CellStatus, SweepBase};

fn main() {
    // 22 x 9 cells: coarse but enough to see the tongue roots at
    // T_ULC = 41, 82 and 123 kyr.
    let x = AxisSpec::linspace(AxisParam::TUlc, 36.9, 127.1, 23).unwrap();
    let y = AxisSpec::linspace(AxisParam::Gamma, 0.25, 2.25, 9).unwrap();
    let mut base = SweepBase::new(
        OscillatorParams::new(11.11, 0.25, 0.0, 35.09),
        ForcingModel::sine_41(),
    );
    base.integrator = base.integrator.with_h(0.1);

    let t0 = std::time::Instant::now();
    let grid = sweep_count(x, y, base).unwrap();
    println!("swept {} cells in {:.1} s\n", grid.cells.len(), t0.elapsed().as_secs_f64());

    // Text rendering, gamma increasing upward.
    for iy in (0..grid.y_axis.values.len()).rev() {
        let mut line = format!("gamma {:4.2} | ", grid.y_axis.values[iy]);
        for ix in 0..grid.x_axis.values.len() {
            let c = grid.cell(ix, iy);
            line.push(match c.status {
                CellStatus::Ok => char::from_digit(c.value as u32, 10).unwrap_or('?'),
                CellStatus::Saturated => '.',
                CellStatus::Diverged => 'x',
            });
        }
        println!("{line}");
    }
    let labels: Vec<String> =
        grid.x_axis.values.iter().map(|v| format!("{v:.0}")).collect();
    println!("             T_ULC = {} ... {}", labels.first().unwrap(), labels.last().unwrap());
    println!("             (. = none or more than five attracting trajectories)");

    std::fs::create_dir_all("out").unwrap();
    std::fs::write("out/tongues_count.svg", sweep_svg(&grid)).unwrap();
    println!("\nwrote out/tongues_count.svg");
}
