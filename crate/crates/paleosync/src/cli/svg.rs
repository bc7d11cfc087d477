//! Minimal native SVG emitters: colored cell rasters with attractor
//! markers. CSV remains the canonical output; these exist for quick looks.

use crate::basins::{BasinLabel, BasinMap};
use crate::sweep::{CellStatus, SweepGrid, SweepKind};

/// Basin palette, one color per attracting trajectory.
const BASIN_COLORS: [&str; 6] =
    ["#d95f02", "#7570b3", "#e6ab02", "#1b9e77", "#e7298a", "#66a61e"];

/// The six-region count palette: N = 1..5 plus white for saturated.
fn count_color(n: f64, status: CellStatus) -> &'static str {
    if status != CellStatus::Ok {
        return "#ffffff";
    }
    match n as usize {
        1 => "#2c7bb6",
        2 => "#abd9e9",
        3 => "#ffffbf",
        4 => "#fdae61",
        5 => "#d7191c",
        _ => "#ffffff",
    }
}

/// Diverging blue/red ramp for λ_max (blue negative, red positive).
fn lle_color(value: f64, scale: f64) -> String {
    if !value.is_finite() {
        return "#dddddd".into();
    }
    let x = (value / scale).clamp(-1.0, 1.0);
    let (r, g, b) = if x < 0.0 {
        let f = -x;
        (
            (255.0 * (1.0 - f) + 33.0 * f) as u8,
            (255.0 * (1.0 - f) + 102.0 * f) as u8,
            (255.0 * (1.0 - f) + 172.0 * f) as u8,
        )
    } else {
        let f = x;
        (
            (255.0 * (1.0 - f) + 178.0 * f) as u8,
            (255.0 * (1.0 - f) + 24.0 * f) as u8,
            (255.0 * (1.0 - f) + 43.0 * f) as u8,
        )
    };
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn svg_open(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n<rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n"
    )
}

/// Renders a basin map: one rect per cell, circles at the attracting
/// trajectories.
pub fn basin_svg(map: &BasinMap) -> String {
    let cell = 4.0;
    let w = map.grid.nx as f64 * cell;
    let h = map.grid.ny as f64 * cell;
    let mut out = svg_open(w, h);
    for iy in 0..map.grid.ny {
        for ix in 0..map.grid.nx {
            let color = match map.label(ix, iy) {
                BasinLabel::Basin(k) => BASIN_COLORS[k % BASIN_COLORS.len()],
                BasinLabel::Unresolved => "#f2f2f2",
            };
            // y axis points up.
            let py = h - (iy + 1) as f64 * cell;
            out.push_str(&format!(
                "<rect x=\"{:.1}\" y=\"{py:.1}\" width=\"{cell}\" height=\"{cell}\" fill=\"{color}\"/>\n",
                ix as f64 * cell
            ));
        }
    }
    let (dx, dy) = map.grid.cell_size();
    for (k, &(ax, ay)) in map.at_points.iter().enumerate() {
        let px = (ax - map.grid.x_min) / dx * cell + 0.5 * cell;
        let py = h - ((ay - map.grid.y_min) / dy * cell + 0.5 * cell);
        out.push_str(&format!(
            "<circle cx=\"{px:.1}\" cy=\"{py:.1}\" r=\"{:.1}\" fill=\"black\" stroke=\"white\" stroke-width=\"1.5\"><title>AT {k}</title></circle>\n",
            1.5 * cell
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Renders a sweep heatmap with the six-region count palette or the
/// diverging λ ramp.
pub fn sweep_svg(grid: &SweepGrid) -> String {
    let cell = 10.0;
    let nx = grid.x_axis.values.len();
    let ny = grid.y_axis.values.len();
    let w = nx as f64 * cell;
    let h = ny as f64 * cell;
    let mut out = svg_open(w, h);
    let lle_scale = grid
        .cells
        .iter()
        .filter(|c| c.value.is_finite())
        .map(|c| c.value.abs())
        .fold(1e-6, f64::max);
    for iy in 0..ny {
        for ix in 0..nx {
            let c = grid.cell(ix, iy);
            let color = match grid.kind {
                SweepKind::Count => count_color(c.value, c.status).to_string(),
                SweepKind::Lle => lle_color(c.value, lle_scale),
            };
            let py = h - (iy + 1) as f64 * cell;
            out.push_str(&format!(
                "<rect x=\"{:.1}\" y=\"{py:.1}\" width=\"{cell}\" height=\"{cell}\" fill=\"{color}\"><title>{}={:.4} {}={:.4} value={:.5} ({})</title></rect>\n",
                ix as f64 * cell,
                grid.x_axis.param.name(),
                grid.x_axis.values[ix],
                grid.y_axis.param.name(),
                grid.y_axis.values[iy],
                c.value,
                c.status.as_str(),
            ));
        }
    }
    out.push_str("</svg>\n");
    out
}
