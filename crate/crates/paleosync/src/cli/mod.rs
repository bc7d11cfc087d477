//! Command-line front end: configuration files, provenance-stamped
//! artifacts, SVG emitters and the figure reproduction recipes.

mod config;
mod provenance;
mod repro;
mod run;
mod svg;

pub use config::RunConfig;
pub use provenance::Provenance;
pub use run::{execute, main_with_args, Cli, THREADS_ENV};
pub use svg::{basin_svg, sweep_svg};
