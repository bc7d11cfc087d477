//! Subcommand dispatch: merges config file and flags, validates, runs the
//! experiment and writes provenance-stamped artifacts.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::config::{parse_grid_shape, parse_range, Required, RunConfig};
use super::provenance::Provenance;
use super::{basin_svg, repro, sweep_svg};
use crate::attractors::{count_clusters, evolve_section, grid_ics, locate_attractors, random_ics, AttractorSet};
use crate::basins::{basin_areas, basin_sequence, jump_detect, BasinLabel, BasinMap, GridSpec};
use crate::forcing::ForcingModel;
use crate::integrator::{integrate, integrate_sde_observed, integrate_with_tangent, IntegratorConfig, TangentBundle};
use crate::lyapunov::{long_term_spectrum, SpectrumProtocol};
use crate::oscillator::{tau_for_period, OscillatorParams, Potential, SystemState};
use crate::rng::mix_seed;
use crate::{Error, Result};

/// Environment variable controlling the worker-pool size.
pub const THREADS_ENV: &str = "PALEOSYNC_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "paleosync",
    version,
    about = "Forced ice-age oscillator: synchronization diagnostics",
    propagate_version = true
)]
pub struct Cli {
    /// Config file (sectioned key = value); flags override its keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads (overrides PALEOSYNC_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: CommandKind,
}

#[derive(Args, Debug, Default)]
pub struct ModelArgs {
    /// Timescale-separation ratio α.
    #[arg(long)]
    alpha: Option<f64>,
    /// Asymmetry parameter β.
    #[arg(long)]
    beta: Option<f64>,
    /// Forcing efficiency γ.
    #[arg(long)]
    gamma: Option<f64>,
    /// Slow timescale τ \[kyr\].
    #[arg(long)]
    tau: Option<f64>,
    /// Unforced period T_ULC \[kyr\]; alternative to --tau.
    #[arg(long)]
    t_ulc: Option<f64>,
    /// Potential: cubic (default) or quintic.
    #[arg(long)]
    potential: Option<String>,
}

#[derive(Args, Debug, Default)]
pub struct ForcingArgs {
    /// Forcing model: insol | insol-raw | zero | sine[:PERIOD].
    #[arg(long)]
    forcing: Option<String>,
    /// Sinusoid period \[kyr\].
    #[arg(long)]
    period: Option<f64>,
    /// Sinusoid amplitude.
    #[arg(long)]
    amplitude: Option<f64>,
    /// Sinusoid phase \[kyr\].
    #[arg(long)]
    phase: Option<f64>,
    /// Extra dimensionless multiplier on the forcing.
    #[arg(long)]
    forcing_scale: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct NumericsArgs {
    /// Integration step h \[kyr\].
    #[arg(long)]
    h: Option<f64>,
    /// Gram-Schmidt reorthonormalization interval \[kyr\].
    #[arg(long)]
    gsr_interval: Option<f64>,
    /// Seed for random ensembles and noise.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path (file, base name or directory depending on command).
    #[arg(long, short)]
    out: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum CommandKind {
    /// Evaluate the forcing on a time grid and write t,f CSV.
    #[command(allow_negative_numbers = true)]
    Forcing {
        #[command(flatten)]
        forcing: ForcingArgs,
        /// Model name: insol | sine | zero (spec'd spelling of --forcing).
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, short)]
        out: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Integrate one trajectory and write t,x,y CSV.
    #[command(allow_negative_numbers = true)]
    Trajectory {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        forcing: ForcingArgs,
        #[command(flatten)]
        numerics: NumericsArgs,
        #[arg(long)]
        x0: Option<f64>,
        #[arg(long)]
        y0: Option<f64>,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        /// Output sampling stride \[kyr\]; defaults to the step h.
        #[arg(long)]
        stride: Option<f64>,
        /// Also integrate a 2-frame tangent bundle and write log norms.
        #[arg(long)]
        tangent: bool,
        /// Additive noise amplitude on y (Euler-Maruyama path).
        #[arg(long)]
        noise_b: Option<f64>,
        /// Proxy CSV (t,value) joined onto the output for comparison.
        #[arg(long)]
        overlay: Option<String>,
    },
    /// Long-term Lyapunov spectrum; writes a JSON record.
    #[command(allow_negative_numbers = true)]
    Lyapunov {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        forcing: ForcingArgs,
        #[command(flatten)]
        numerics: NumericsArgs,
        #[arg(long)]
        t_total: Option<f64>,
        #[arg(long)]
        transient: Option<f64>,
        #[arg(long)]
        x0: Option<f64>,
        #[arg(long)]
        y0: Option<f64>,
        #[arg(long)]
        t0: Option<f64>,
    },
    /// Evolve an IC ensemble to a section and count attracting
    /// trajectories by threshold clustering; writes a JSON report.
    #[command(allow_negative_numbers = true)]
    Clusters {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        forcing: ForcingArgs,
        #[command(flatten)]
        numerics: NumericsArgs,
        #[arg(long)]
        t0: Option<f64>,
        /// Section time t.
        #[arg(long)]
        t: Option<f64>,
        /// Alias for --h.
        #[arg(long)]
        dt: Option<f64>,
        /// IC grid shape, e.g. 7x7, over --x-range/--y-range.
        #[arg(long)]
        grid: Option<String>,
        /// Use N random ICs instead of a grid.
        #[arg(long)]
        random_ics: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        x_range: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        y_range: Option<String>,
        /// Clustering threshold distance.
        #[arg(long = "dT")]
        d_t: Option<f64>,
    },
    /// Basins of attraction over a grid of ICs, one map per frame.
    #[command(allow_negative_numbers = true)]
    Basins {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        forcing: ForcingArgs,
        #[command(flatten)]
        numerics: NumericsArgs,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long)]
        t0_step: Option<f64>,
        #[arg(long)]
        frames: Option<usize>,
        /// Gap between t0 and the classification time \[kyr\].
        #[arg(long)]
        gap: Option<f64>,
        /// Pre-run length for locating the attracting trajectories \[kyr\].
        #[arg(long)]
        at_prerun: Option<f64>,
        /// Grid shape, e.g. 201x121.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        x_range: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        y_range: Option<String>,
        #[arg(long = "dT")]
        d_t: Option<f64>,
        /// Also render an SVG per frame.
        #[arg(long)]
        svg: bool,
    },
    /// Parameter-space map of lambda_max or of the count N.
    #[command(allow_negative_numbers = true)]
    Sweep {
        /// Map type: lle or count.
        kind: String,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        forcing: ForcingArgs,
        #[command(flatten)]
        numerics: NumericsArgs,
        /// X axis, e.g. tulc:80:180:40.
        #[arg(long)]
        x: Option<String>,
        /// Y axis, e.g. gamma:0:2:40.
        #[arg(long)]
        y: Option<String>,
        #[arg(long)]
        t_total: Option<f64>,
        #[arg(long)]
        transient: Option<f64>,
        #[arg(long = "dT")]
        d_t: Option<f64>,
        #[arg(long)]
        svg: bool,
    },
    /// Stochastic paths on an attracting trajectory; detect jumps.
    #[command(allow_negative_numbers = true)]
    Jumps {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        forcing: ForcingArgs,
        #[command(flatten)]
        numerics: NumericsArgs,
        /// Number of seeded paths.
        #[arg(long)]
        paths: Option<usize>,
        /// Noise amplitude b; defaults to 0.5·√ω_ε1.
        #[arg(long)]
        noise_b: Option<f64>,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        at_prerun: Option<f64>,
        #[arg(long = "dT")]
        d_t: Option<f64>,
    },
    /// Reproduce a bundled figure recipe into a directory.
    #[command(allow_negative_numbers = true)]
    Repro {
        /// One of: fig3 fig4 fig5a fig5b fig5c fig5d fig7 fig9 fig12
        /// fig14 fig15 appE.
        figure: String,
        #[arg(long, short)]
        out: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Reduced-resolution quick pass.
        #[arg(long)]
        fast: bool,
    },
}

/// Entry point used by the binary: parses, runs, maps errors to exit codes.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn init_thread_pool(threads: Option<usize>) {
    let n = threads.or_else(|| {
        std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok())
    });
    if let Some(n) = n {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Runs a parsed command line.
pub fn execute(cli: Cli) -> Result<()> {
    init_thread_pool(cli.threads);
    let file_cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    let cfg = file_cfg.merged_with(&command_overrides(&cli.command));
    match &cli.command {
        CommandKind::Forcing { .. } => cmd_forcing(&cfg),
        CommandKind::Trajectory { .. } => cmd_trajectory(&cfg),
        CommandKind::Lyapunov { .. } => cmd_lyapunov(&cfg),
        CommandKind::Clusters { .. } => cmd_clusters(&cfg),
        CommandKind::Basins { .. } => cmd_basins(&cfg),
        CommandKind::Sweep { kind, .. } => cmd_sweep(&cfg, kind),
        CommandKind::Jumps { .. } => cmd_jumps(&cfg),
        CommandKind::Repro { figure, fast, .. } => repro::run(&cfg, figure, *fast),
    }
}

fn apply_model(cfg: &mut RunConfig, m: &ModelArgs) {
    cfg.alpha = m.alpha;
    cfg.beta = m.beta;
    cfg.gamma = m.gamma;
    cfg.tau = m.tau;
    cfg.t_ulc = m.t_ulc;
    cfg.potential = m.potential.clone();
}

fn apply_forcing(cfg: &mut RunConfig, f: &ForcingArgs) {
    cfg.forcing_model = f.forcing.clone();
    cfg.period = f.period;
    cfg.amplitude = f.amplitude;
    cfg.phase = f.phase;
    cfg.forcing_scale = f.forcing_scale;
}

fn apply_numerics(cfg: &mut RunConfig, n: &NumericsArgs) {
    cfg.h = n.h;
    cfg.gsr_interval = n.gsr_interval;
    cfg.seed = n.seed;
    cfg.out = n.out.clone();
}

/// Gathers the command's flags into a RunConfig overlay.
fn command_overrides(cmd: &CommandKind) -> RunConfig {
    let mut cfg = RunConfig::default();
    match cmd {
        CommandKind::Forcing { forcing, model, from, to, dt, out, seed } => {
            apply_forcing(&mut cfg, forcing);
            if cfg.forcing_model.is_none() {
                cfg.forcing_model = model.clone();
            }
            cfg.from = *from;
            cfg.to = *to;
            cfg.dt = *dt;
            cfg.out = out.clone();
            cfg.seed = *seed;
        }
        CommandKind::Trajectory {
            model,
            forcing,
            numerics,
            x0,
            y0,
            t0,
            t_end,
            stride,
            tangent,
            noise_b,
            overlay,
        } => {
            apply_model(&mut cfg, model);
            apply_forcing(&mut cfg, forcing);
            apply_numerics(&mut cfg, numerics);
            cfg.x0 = *x0;
            cfg.y0 = *y0;
            cfg.t0 = *t0;
            cfg.t_end = *t_end;
            cfg.stride = *stride;
            if *tangent {
                cfg.tangent = Some(true);
            }
            cfg.noise_b = *noise_b;
            cfg.overlay = overlay.clone();
        }
        CommandKind::Lyapunov { model, forcing, numerics, t_total, transient, x0, y0, t0 } => {
            apply_model(&mut cfg, model);
            apply_forcing(&mut cfg, forcing);
            apply_numerics(&mut cfg, numerics);
            cfg.t_total = *t_total;
            cfg.transient = *transient;
            cfg.x0 = *x0;
            cfg.y0 = *y0;
            cfg.t0 = *t0;
        }
        CommandKind::Clusters {
            model,
            forcing,
            numerics,
            t0,
            t,
            dt,
            grid,
            random_ics,
            x_range,
            y_range,
            d_t,
        } => {
            apply_model(&mut cfg, model);
            apply_forcing(&mut cfg, forcing);
            apply_numerics(&mut cfg, numerics);
            cfg.t0 = *t0;
            cfg.t_section = *t;
            if cfg.h.is_none() {
                cfg.h = *dt;
            }
            cfg.grid = grid.clone();
            cfg.random_ics = *random_ics;
            cfg.x_range = x_range.clone();
            cfg.y_range = y_range.clone();
            cfg.d_t = *d_t;
        }
        CommandKind::Basins {
            model,
            forcing,
            numerics,
            t0,
            t0_step,
            frames,
            gap,
            at_prerun,
            grid,
            x_range,
            y_range,
            d_t,
            svg,
        } => {
            apply_model(&mut cfg, model);
            apply_forcing(&mut cfg, forcing);
            apply_numerics(&mut cfg, numerics);
            cfg.t0 = *t0;
            cfg.t0_step = *t0_step;
            cfg.frames = *frames;
            cfg.gap = *gap;
            cfg.at_prerun = *at_prerun;
            cfg.grid = grid.clone();
            cfg.x_range = x_range.clone();
            cfg.y_range = y_range.clone();
            cfg.d_t = *d_t;
            if *svg {
                cfg.svg = Some(true);
            }
        }
        CommandKind::Sweep { kind: _, model, forcing, numerics, x, y, t_total, transient, d_t, svg } => {
            apply_model(&mut cfg, model);
            apply_forcing(&mut cfg, forcing);
            apply_numerics(&mut cfg, numerics);
            cfg.x_axis = x.clone();
            cfg.y_axis = y.clone();
            cfg.t_total = *t_total;
            cfg.transient = *transient;
            cfg.d_t = *d_t;
            if *svg {
                cfg.svg = Some(true);
            }
        }
        CommandKind::Jumps { model, forcing, numerics, paths, noise_b, t0, t_end, at_prerun, d_t } => {
            apply_model(&mut cfg, model);
            apply_forcing(&mut cfg, forcing);
            apply_numerics(&mut cfg, numerics);
            cfg.paths = *paths;
            cfg.noise_b = *noise_b;
            cfg.t0 = *t0;
            cfg.t_end = *t_end;
            cfg.at_prerun = *at_prerun;
            cfg.d_t = *d_t;
        }
        CommandKind::Repro { figure, out, seed, fast: _ } => {
            cfg.figure = Some(figure.clone());
            cfg.out = out.clone();
            cfg.seed = *seed;
        }
    }
    cfg
}

// ---------------------------------------------------------------------------
// Shared resolution helpers.
// ---------------------------------------------------------------------------

pub(super) fn resolve_params(cfg: &RunConfig, req: &mut Required) -> OscillatorParams {
    let alpha = req.f64(cfg.alpha, "model.alpha (--alpha)");
    let beta = req.f64(cfg.beta, "model.beta (--beta)");
    let gamma = req.f64(cfg.gamma, "model.gamma (--gamma)");
    let tau = match (cfg.tau, cfg.t_ulc) {
        (Some(tau), _) => tau,
        (None, Some(t_ulc)) => {
            if alpha.is_finite() && beta.is_finite() {
                tau_for_period(t_ulc, alpha, beta).unwrap_or(f64::NAN)
            } else {
                f64::NAN
            }
        }
        (None, None) => req.f64(None, "model.tau (--tau) or model.t_ulc (--t-ulc)"),
    };
    let potential = match cfg.potential.as_deref() {
        None | Some("cubic") => Potential::Cubic,
        Some("quintic") => Potential::Quintic,
        Some(other) => {
            req.f64(None, &format!("model.potential: unknown `{other}`"));
            Potential::Cubic
        }
    };
    OscillatorParams { alpha, beta, gamma, tau, potential }
}

pub(super) fn resolve_forcing(cfg: &RunConfig, req: &mut Required) -> ForcingModel {
    let name = req.string(&cfg.forcing_model, "forcing.model (--forcing)");
    let (base, inline_period) = match name.split_once(':') {
        Some((head, tail)) => (head.to_string(), tail.parse::<f64>().ok()),
        None => (name.clone(), None),
    };
    let mut model = match base.as_str() {
        "zero" => ForcingModel::zero(),
        "insol" => ForcingModel::insolation_dimensionless(),
        "insol-raw" => ForcingModel::insolation(),
        "sine" => {
            let period = inline_period
                .or(cfg.period)
                .unwrap_or_else(|| req.f64(None, "forcing.period (--period or sine:PERIOD)"));
            ForcingModel::sinusoid(
                cfg.amplitude.unwrap_or(1.0),
                period,
                cfg.phase.unwrap_or(0.0),
            )
        }
        "" => ForcingModel::zero(), // already reported missing
        other => {
            req.f64(None, &format!("forcing.model: unknown `{other}` (insol|insol-raw|sine|zero)"));
            ForcingModel::zero()
        }
    };
    if let Some(scale) = cfg.forcing_scale {
        model = model.with_scale(scale);
    }
    model
}

pub(super) fn resolve_integrator(cfg: &RunConfig) -> IntegratorConfig {
    let mut ic = IntegratorConfig::default();
    if let Some(h) = cfg.h {
        ic = ic.with_h(h);
    }
    if let Some(g) = cfg.gsr_interval {
        ic = ic.with_gsr_interval(g);
    }
    if let Some(b) = cfg.noise_b {
        ic.noise_b = b;
    }
    if let Some(seed) = cfg.seed {
        ic.seed = seed;
    }
    ic
}

fn provenance(cfg: &RunConfig) -> Provenance {
    Provenance::new(&cfg.to_config_string(), cfg.seed.unwrap_or(0))
}

fn out_path(cfg: &RunConfig, req: &mut Required) -> PathBuf {
    PathBuf::from(req.string(&cfg.out, "run.out (--out)"))
}

fn create_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    Ok(())
}

fn write_csv(path: &Path, prov: &Provenance, header: &str, rows: &[String]) -> Result<()> {
    create_parent(path)?;
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(prov.csv_header().as_bytes())?;
    writeln!(file, "{header}")?;
    for row in rows {
        writeln!(file, "{row}")?;
    }
    Ok(())
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    create_parent(path)?;
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Formats a float with enough digits to round-trip.
fn fmt(v: f64) -> String {
    format!("{v}")
}

// ---------------------------------------------------------------------------
// Subcommands.
// ---------------------------------------------------------------------------

fn cmd_forcing(cfg: &RunConfig) -> Result<()> {
    let mut req = Required::new(cfg);
    let forcing = resolve_forcing(cfg, &mut req);
    let from = req.f64(cfg.from, "experiment.from (--from)");
    let to = req.f64(cfg.to, "experiment.to (--to)");
    let dt = req.f64(cfg.dt, "experiment.dt (--dt)");
    let out = out_path(cfg, &mut req);
    req.finish()?;
    forcing.validate()?;
    if !(to > from) || !(dt > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "need to > from and dt > 0, got from={from} to={to} dt={dt}"
        )));
    }
    let n = ((to - from) / dt).floor() as usize;
    let rows: Vec<String> = (0..=n)
        .map(|k| {
            let t = from + k as f64 * dt;
            format!("{},{}", fmt(t), fmt(forcing.eval(t)))
        })
        .collect();
    write_csv(&out, &provenance(cfg), "t,f", &rows)?;
    println!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

fn cmd_trajectory(cfg: &RunConfig) -> Result<()> {
    let mut req = Required::new(cfg);
    let params = resolve_params(cfg, &mut req);
    let forcing = resolve_forcing(cfg, &mut req);
    let x0 = req.f64(cfg.x0, "experiment.x0 (--x0)");
    let y0 = req.f64(cfg.y0, "experiment.y0 (--y0)");
    let t0 = req.f64(cfg.t0, "experiment.t0 (--t0)");
    let t_end = req.f64(cfg.t_end, "experiment.t_end (--t-end)");
    let out = out_path(cfg, &mut req);
    req.finish()?;
    params.validate()?;
    forcing.validate()?;
    let icfg = resolve_integrator(cfg);
    let stride = cfg.stride.unwrap_or(icfg.h).max(icfg.h);
    let tangent = cfg.tangent.unwrap_or(false);
    let start = SystemState::new(x0, y0, t0);

    let mut rows: Vec<(f64, f64, f64)> = Vec::new();
    let mut lognorms: Vec<(f64, f64)> = Vec::new();
    if tangent {
        if icfg.noise_b > 0.0 {
            return Err(Error::InvalidConfig(
                "experiment.tangent cannot be combined with integrator.noise_b > 0".into(),
            ));
        }
        let mut bundle = TangentBundle::orthonormal(start, 2)?;
        rows.push((t0, x0, y0));
        lognorms.push((0.0, 0.0));
        let mut t = t0;
        while t < t_end - 1e-9 {
            let next = (t + stride).min(t_end);
            bundle = integrate_with_tangent(bundle, &params, &forcing, next, &icfg)?;
            t = next;
            rows.push((t, bundle.base.x, bundle.base.y));
            lognorms.push((bundle.log_norms[0], bundle.log_norms[1]));
        }
    } else {
        let mut next_sample = t0;
        let observer = |s: &SystemState| {
            if s.t >= next_sample - 1e-9 {
                rows.push((s.t, s.x, s.y));
                next_sample += stride;
            }
        };
        if icfg.noise_b > 0.0 {
            integrate_sde_observed(start, &params, &forcing, t_end, &icfg, observer)?;
        } else {
            integrate(start, &params, &forcing, t_end, &icfg, observer)?;
        }
    }

    let overlay = match &cfg.overlay {
        Some(path) => Some(load_overlay(Path::new(path))?),
        None => None,
    };

    let mut header = String::from("t,x,y");
    if tangent {
        header.push_str(",lognorm1,lognorm2");
    }
    if overlay.is_some() {
        header.push_str(",proxy");
    }
    let lines: Vec<String> = rows
        .iter()
        .enumerate()
        .map(|(i, &(t, x, y))| {
            let mut line = format!("{},{},{}", fmt(t), fmt(x), fmt(y));
            if tangent {
                line.push_str(&format!(",{},{}", fmt(lognorms[i].0), fmt(lognorms[i].1)));
            }
            if let Some(ov) = &overlay {
                match interp_overlay(ov, t) {
                    Some(v) => line.push_str(&format!(",{}", fmt(v))),
                    None => line.push(','),
                }
            }
            line
        })
        .collect();
    write_csv(&out, &provenance(cfg), &header, &lines)?;
    println!("wrote {} rows to {}", lines.len(), out.display());
    Ok(())
}

/// Loads a proxy CSV of (t, value) rows; tolerates a header line.
fn load_overlay(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path)?;
    let mut points = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',');
        let (Some(a), Some(b)) = (parts.next(), parts.next()) else { continue };
        if let (Ok(t), Ok(v)) = (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
            points.push((t, v));
        }
    }
    if points.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "overlay file {} has no numeric t,value rows",
            path.display()
        )));
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(points)
}

fn interp_overlay(points: &[(f64, f64)], t: f64) -> Option<f64> {
    if t < points.first()?.0 || t > points.last()?.0 {
        return None;
    }
    let idx = points.partition_point(|p| p.0 <= t);
    if idx == 0 {
        return Some(points[0].1);
    }
    if idx >= points.len() {
        return Some(points[points.len() - 1].1);
    }
    let (t0, v0) = points[idx - 1];
    let (t1, v1) = points[idx];
    if t1 == t0 {
        return Some(v0);
    }
    Some(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
}

#[derive(serde::Serialize)]
struct LyapunovArtifact {
    provenance: Provenance,
    params: OscillatorParams,
    forcing: ForcingModel,
    t_total: f64,
    transient: f64,
    h: f64,
    gsr_interval: f64,
    record: crate::lyapunov::LyapunovRecord,
}

fn cmd_lyapunov(cfg: &RunConfig) -> Result<()> {
    let mut req = Required::new(cfg);
    let params = resolve_params(cfg, &mut req);
    let forcing = resolve_forcing(cfg, &mut req);
    let out = out_path(cfg, &mut req);
    req.finish()?;
    params.validate()?;
    forcing.validate()?;
    let icfg = resolve_integrator(cfg);
    let protocol = SpectrumProtocol {
        t_total: cfg.t_total.unwrap_or(3.0e6),
        transient: cfg.transient.unwrap_or(500.0),
        frame: 2,
        trace_stride: Some(cfg.stride.unwrap_or(10.0)),
    };
    let ic = SystemState::new(cfg.x0.unwrap_or(1.0), cfg.y0.unwrap_or(1.0), cfg.t0.unwrap_or(0.0));
    let record = long_term_spectrum(&params, &forcing, ic, &protocol, &icfg)?;
    println!(
        "lambda = [{}]  (not_converged: {}, extrapolated forcing: {})",
        record.spectrum.iter().map(|l| format!("{l:+.5}")).collect::<Vec<_>>().join(", "),
        record.not_converged,
        record.forcing_extrapolated
    );
    write_json(
        &out,
        &LyapunovArtifact {
            provenance: provenance(cfg),
            params,
            forcing,
            t_total: protocol.t_total,
            transient: protocol.transient,
            h: icfg.h,
            gsr_interval: icfg.gsr_interval,
            record,
        },
    )?;
    println!("wrote {}", out.display());
    Ok(())
}

#[derive(serde::Serialize)]
struct ClustersArtifact {
    provenance: Provenance,
    params: OscillatorParams,
    forcing: ForcingModel,
    t0: f64,
    t_section: f64,
    ic_count: usize,
    diverged: Vec<usize>,
    report: crate::attractors::ClusterReport,
    points: Vec<crate::attractors::SectionPoint>,
}

fn resolve_ics(cfg: &RunConfig) -> Result<Vec<(f64, f64)>> {
    let x_range = match &cfg.x_range {
        Some(r) => parse_range(r, "experiment.x_range")?,
        None => (-2.2, 2.2),
    };
    let y_range = match &cfg.y_range {
        Some(r) => parse_range(r, "experiment.y_range")?,
        None => (-2.2, 2.2),
    };
    if let Some(n) = cfg.random_ics {
        return Ok(random_ics(n, x_range, y_range, cfg.seed.unwrap_or(3000)));
    }
    let (nx, ny) = match &cfg.grid {
        Some(g) => parse_grid_shape(g, "experiment.grid")?,
        None => (7, 7),
    };
    Ok(grid_ics(x_range, y_range, nx, ny))
}

fn cmd_clusters(cfg: &RunConfig) -> Result<()> {
    let mut req = Required::new(cfg);
    let params = resolve_params(cfg, &mut req);
    let forcing = resolve_forcing(cfg, &mut req);
    let t0 = req.f64(cfg.t0, "experiment.t0 (--t0)");
    let t_section = req.f64(cfg.t_section, "experiment.t_section (--t)");
    let out = out_path(cfg, &mut req);
    req.finish()?;
    params.validate()?;
    forcing.validate()?;
    let icfg = resolve_integrator(cfg);
    let ics = resolve_ics(cfg)?;
    let section = evolve_section(&ics, t0, t_section, &params, &forcing, &icfg)?;
    let report = count_clusters(&section, cfg.d_t.unwrap_or(crate::attractors::DEFAULT_D_T))?;
    println!(
        "N = {} ({} raw clusters, {} of {} ICs diverged)",
        report.n,
        report.raw_count,
        section.diverged.len(),
        ics.len()
    );
    let artifact = ClustersArtifact {
        provenance: provenance(cfg),
        params,
        forcing,
        t0,
        t_section,
        ic_count: ics.len(),
        diverged: section.diverged.clone(),
        report,
        points: section.points.clone(),
    };
    write_json(&out, &artifact)?;
    println!("wrote {}", out.display());
    if artifact.report.is_saturated() {
        return Err(Error::NSaturated);
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct BasinSidecar {
    provenance: Provenance,
    params: OscillatorParams,
    t0: f64,
    t_target: f64,
    grid: GridSpec,
    at_points: Vec<(f64, f64)>,
    capture_radius: f64,
    areas: Vec<f64>,
    boundary_proximate: Vec<bool>,
    resolved: usize,
    unresolved: usize,
}

pub(super) fn basin_grid(cfg: &RunConfig) -> Result<GridSpec> {
    let (x_min, x_max) = match &cfg.x_range {
        Some(r) => parse_range(r, "experiment.x_range")?,
        None => (-1.5, 1.5),
    };
    let (y_min, y_max) = match &cfg.y_range {
        Some(r) => parse_range(r, "experiment.y_range")?,
        None => (-2.5, 2.5),
    };
    let (nx, ny) = match &cfg.grid {
        Some(g) => parse_grid_shape(g, "experiment.grid")?,
        None => (201, 121),
    };
    let grid = GridSpec { x_min, x_max, nx, y_min, y_max, ny };
    grid.validate()?;
    Ok(grid)
}

pub(super) fn write_basin_map(
    dir: &Path,
    stem: &str,
    map: &BasinMap,
    params: &OscillatorParams,
    prov: &Provenance,
    svg: bool,
) -> Result<()> {
    let rows: Vec<String> = (0..map.grid.len())
        .map(|idx| {
            let (ix, iy) = (idx % map.grid.nx, idx / map.grid.nx);
            let (x0, y0) = map.grid.point(ix, iy);
            let label = match map.labels[idx] {
                BasinLabel::Basin(k) => k as i64,
                BasinLabel::Unresolved => -1,
            };
            format!("{ix},{iy},{},{},{label}", fmt(x0), fmt(y0))
        })
        .collect();
    write_csv(&dir.join(format!("{stem}.csv")), prov, "ix,iy,x0,y0,label", &rows)?;
    let resolved = map.resolved_count();
    let sidecar = BasinSidecar {
        provenance: prov.clone(),
        params: *params,
        t0: map.t0,
        t_target: map.t_target,
        grid: map.grid,
        at_points: map.at_points.clone(),
        capture_radius: map.capture_radius,
        areas: basin_areas(map).unwrap_or_default(),
        boundary_proximate: map.boundary_proximate.clone(),
        resolved,
        unresolved: map.grid.len() - resolved,
    };
    write_json(&dir.join(format!("{stem}.json")), &sidecar)?;
    if svg {
        std::fs::write(dir.join(format!("{stem}.svg")), prov.stamp_svg(&basin_svg(map)))?;
    }
    Ok(())
}

/// Locates the attracting trajectories with a seeded 70-IC ensemble started
/// `at_prerun` before the reference time.
pub(super) fn locate_for_basins(
    params: &OscillatorParams,
    forcing: &ForcingModel,
    t_ref: f64,
    at_prerun: f64,
    d_t: f64,
    seed: u64,
    icfg: &IntegratorConfig,
) -> Result<AttractorSet> {
    let ics = random_ics(70, (-1.0, 1.0), (-1.0, 1.0), seed);
    locate_attractors(params, forcing, &ics, t_ref - at_prerun, t_ref, d_t, icfg)
}

fn cmd_basins(cfg: &RunConfig) -> Result<()> {
    let mut req = Required::new(cfg);
    let params = resolve_params(cfg, &mut req);
    let forcing = resolve_forcing(cfg, &mut req);
    let t0_first = req.f64(cfg.t0, "experiment.t0 (--t0)");
    let out = out_path(cfg, &mut req);
    req.finish()?;
    params.validate()?;
    forcing.validate()?;
    let icfg = resolve_integrator(cfg);
    let grid = basin_grid(cfg)?;
    let frames = cfg.frames.unwrap_or(1);
    let t0_step = cfg.t0_step.unwrap_or(10.0);
    let gap = cfg.gap.unwrap_or(550.0);
    let at_prerun = cfg.at_prerun.unwrap_or(1600.0);
    let d_t = cfg.d_t.unwrap_or(crate::attractors::DEFAULT_D_T);
    let svg = cfg.svg.unwrap_or(false);
    let t0_list: Vec<f64> = (0..frames).map(|i| t0_first + i as f64 * t0_step).collect();

    let ats = locate_for_basins(
        &params,
        &forcing,
        t0_first + gap,
        at_prerun,
        d_t,
        cfg.seed.unwrap_or(3000),
        &icfg,
    )?;
    println!("located {} attracting trajectories at t = {}", ats.points.len(), ats.t);
    let maps = basin_sequence(&params, &forcing, &grid, &t0_list, gap, &ats, &icfg)?;
    std::fs::create_dir_all(&out)?;
    let prov = provenance(cfg);
    for (i, map) in maps.iter().enumerate() {
        write_basin_map(&out, &format!("basin_{i:03}"), map, &params, &prov, svg)?;
        println!(
            "frame {i}: t0 = {}, resolved {}/{} cells",
            map.t0,
            map.resolved_count(),
            map.grid.len()
        );
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct SweepSidecar {
    provenance: Provenance,
    grid: crate::sweep::SweepGrid,
}

fn cmd_sweep(cfg: &RunConfig, kind: &str) -> Result<()> {
    use crate::sweep::{sweep_count, sweep_lle, AxisSpec, SweepBase};
    let mut req = Required::new(cfg);
    let x_spec = req.string(&cfg.x_axis, "experiment.x_axis (--x)");
    let y_spec = req.string(&cfg.y_axis, "experiment.y_axis (--y)");
    // Swept parameters need no base value: the axis overrides them per
    // cell, so placeholders satisfy the resolver.
    let swept = |name: &str| x_spec.starts_with(name) || y_spec.starts_with(name);
    let mut filled = cfg.clone();
    if swept("gamma") && filled.gamma.is_none() {
        filled.gamma = Some(0.0);
    }
    if (swept("tulc") || swept("t_ulc")) && filled.tau.is_none() && filled.t_ulc.is_none() {
        filled.tau = Some(35.09);
    }
    if swept("beta") && filled.beta.is_none() {
        filled.beta = Some(0.25);
    }
    let params = resolve_params(&filled, &mut req);
    let forcing = resolve_forcing(cfg, &mut req);
    let out = out_path(cfg, &mut req);
    req.finish()?;
    forcing.validate()?;
    let x_axis = AxisSpec::parse(&x_spec)?;
    let y_axis = AxisSpec::parse(&y_spec)?;
    let mut base = SweepBase::new(params, forcing);
    base.integrator = resolve_integrator(cfg);
    base.seed = cfg.seed.unwrap_or(base.seed);
    if let Some(t) = cfg.t_total {
        base.t_total = t;
    }
    if let Some(t) = cfg.transient {
        base.transient = t;
    }
    if let Some(d) = cfg.d_t {
        base.d_t = d;
    }
    let grid = match kind {
        "lle" => sweep_lle(x_axis, y_axis, base)?,
        "count" => sweep_count(x_axis, y_axis, base)?,
        other => {
            return Err(Error::InvalidConfig(format!(
                "sweep kind must be `lle` or `count`, got `{other}`"
            )))
        }
    };
    let prov = provenance(cfg);
    let nx = grid.x_axis.values.len();
    let rows: Vec<String> = (0..grid.cells.len())
        .map(|idx| {
            let (ix, iy) = (idx % nx, idx / nx);
            let c = &grid.cells[idx];
            format!(
                "{},{},{},{}",
                fmt(grid.x_axis.values[ix]),
                fmt(grid.y_axis.values[iy]),
                fmt(c.value),
                c.status.as_str()
            )
        })
        .collect();
    let csv_path = out.with_extension("csv");
    write_csv(&csv_path, &prov, "x_param,y_param,value,status", &rows)?;
    if cfg.svg.unwrap_or(false) {
        std::fs::write(out.with_extension("svg"), prov.stamp_svg(&sweep_svg(&grid)))?;
    }
    write_json(&out.with_extension("json"), &SweepSidecar { provenance: prov, grid: grid.clone() })?;
    let _ = kind_summary(&grid, kind);
    println!("wrote {}", csv_path.display());
    Ok(())
}

fn kind_summary(grid: &crate::sweep::SweepGrid, kind: &str) -> usize {
    use crate::sweep::CellStatus;
    let ok = grid.cells.iter().filter(|c| c.status == CellStatus::Ok).count();
    println!(
        "{kind} sweep: {} cells, {} ok, {} saturated, {} diverged",
        grid.cells.len(),
        ok,
        grid.cells.iter().filter(|c| c.status == CellStatus::Saturated).count(),
        grid.cells.iter().filter(|c| c.status == CellStatus::Diverged).count()
    );
    ok
}

#[derive(serde::Serialize)]
pub(super) struct JumpsArtifact {
    pub provenance: Provenance,
    pub params: OscillatorParams,
    pub noise_b: f64,
    pub t0: f64,
    pub t_end: f64,
    pub at_points: Vec<(f64, f64)>,
    pub paths: usize,
    pub jumps: Vec<PathJumps>,
    pub total_jumps: usize,
    pub paths_with_jumps: usize,
}

#[derive(serde::Serialize)]
pub(super) struct PathJumps {
    pub path: usize,
    pub seed: u64,
    pub start_at: usize,
    pub jumps: Vec<crate::basins::Jump>,
}

#[allow(clippy::too_many_arguments)]
pub(super) fn run_jump_ensemble(
    params: &OscillatorParams,
    forcing: &ForcingModel,
    ats: &AttractorSet,
    n_paths: usize,
    noise_b: f64,
    t_end: f64,
    base_seed: u64,
    icfg: &IntegratorConfig,
) -> Result<Vec<PathJumps>> {
    use rayon::prelude::*;
    (0..n_paths)
        .into_par_iter()
        .map(|path| {
            let seed = mix_seed(base_seed, path as u64);
            let start_at = path % ats.points.len();
            let jcfg = IntegratorConfig { noise_b, seed, ..*icfg };
            let jumps = jump_detect(params, forcing, ats, start_at, t_end, &jcfg)?;
            Ok(PathJumps { path, seed, start_at, jumps })
        })
        .collect()
}

fn cmd_jumps(cfg: &RunConfig) -> Result<()> {
    let mut req = Required::new(cfg);
    let params = resolve_params(cfg, &mut req);
    let forcing = resolve_forcing(cfg, &mut req);
    let out = out_path(cfg, &mut req);
    req.finish()?;
    params.validate()?;
    forcing.validate()?;
    let icfg = resolve_integrator(cfg);
    let t0 = cfg.t0.unwrap_or(-700.0);
    let t_end = cfg.t_end.unwrap_or(0.0);
    let at_prerun = cfg.at_prerun.unwrap_or(3000.0);
    let noise_b = cfg.noise_b.unwrap_or(0.5 * crate::forcing::OMEGA_EPSILON_1.sqrt());
    let n_paths = cfg.paths.unwrap_or(100);
    let seed = cfg.seed.unwrap_or(2026);
    let d_t = cfg.d_t.unwrap_or(crate::attractors::DEFAULT_D_T);

    let ats = locate_for_basins(&params, &forcing, t0, at_prerun, d_t, seed, &icfg)?;
    // Euler path vs RK4 attractors: default to a fine jump step so scheme
    // drift stays below the capture radius.
    let jump_cfg = if cfg.h.is_none() { icfg.with_h(0.002) } else { icfg };
    let jumps = run_jump_ensemble(&params, &forcing, &ats, n_paths, noise_b, t_end, seed, &jump_cfg)?;
    let total: usize = jumps.iter().map(|p| p.jumps.len()).sum();
    let with_jumps = jumps.iter().filter(|p| !p.jumps.is_empty()).count();
    println!(
        "{with_jumps} of {n_paths} paths jumped ({total} jumps total) between {} attracting trajectories",
        ats.points.len()
    );
    write_json(
        &out,
        &JumpsArtifact {
            provenance: provenance(cfg),
            params,
            noise_b,
            t0,
            t_end,
            at_points: ats.points.clone(),
            paths: n_paths,
            jumps,
            total_jumps: total,
            paths_with_jumps: with_jumps,
        },
    )?;
    println!("wrote {}", out.display());
    Ok(())
}
