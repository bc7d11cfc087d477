//! Property tests for the order- and scale-invariances the library leans
//! on, plus slower structural invariants that don't fit a unit test.

use proptest::prelude::*;

use paleosync::attractors::{count_clusters, evolve_section, random_ics, SectionPoint, SectionPoints};
use paleosync::cli::RunConfig;
use paleosync::forcing::{ForcingModel, HarmonicTerm};
use paleosync::integrator::IntegratorConfig;
use paleosync::oscillator::OscillatorParams;

fn section_from(points: Vec<(f64, f64)>) -> SectionPoints {
    SectionPoints {
        t_section: 0.0,
        t0: 0.0,
        points: points
            .into_iter()
            .enumerate()
            .map(|(i, (x, y))| SectionPoint { x, y, source: i })
            .collect(),
        diverged: Vec::new(),
    }
}

proptest! {
    #[test]
    fn clustering_is_permutation_invariant(
        points in proptest::collection::vec((-2.5f64..2.5, -2.5f64..2.5), 1..40),
        seed in 0u64..1000,
    ) {
        let base = count_clusters(&section_from(points.clone()), 0.1).unwrap();
        // Deterministic shuffle of the input order.
        let mut shuffled = points.clone();
        let mut rng = paleosync::rng::Rng::new(seed);
        for i in (1..shuffled.len()).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            shuffled.swap(i, j);
        }
        let re = count_clusters(&section_from(shuffled), 0.1).unwrap();
        prop_assert_eq!(base.n, re.n);
        prop_assert_eq!(base.raw_count, re.raw_count);
        // Cluster membership (as source-index sets) must match exactly.
        // Sources were renumbered by the shuffle, so compare via sorted
        // centroids instead.
        let c1: Vec<(f64, f64)> = base.clusters.iter().map(|c| c.centroid).collect();
        let c2: Vec<(f64, f64)> = re.clusters.iter().map(|c| c.centroid).collect();
        for (a, b) in c1.iter().zip(c2.iter()) {
            prop_assert!((a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9);
        }
    }

    #[test]
    fn raw_cluster_count_never_grows_with_the_threshold(
        points in proptest::collection::vec((-2.5f64..2.5, -2.5f64..2.5), 1..30),
    ) {
        let s = section_from(points);
        let mut last = usize::MAX;
        for d_t in [0.02, 0.05, 0.1, 0.2, 0.5] {
            let n = count_clusters(&s, d_t).unwrap().raw_count;
            prop_assert!(n <= last, "raw count grew from {} to {} at d_T = {}", last, n, d_t);
            last = n;
        }
    }

    #[test]
    fn zero_forcing_is_identically_zero(t in -1.0e7f64..1.0e7) {
        prop_assert_eq!(ForcingModel::zero().eval(t), 0.0);
    }

    #[test]
    fn forcing_scale_is_linear(
        t in -5000.0f64..5000.0,
        scale in -3.0f64..3.0,
    ) {
        let base = ForcingModel::insolation();
        let scaled = ForcingModel::insolation().with_scale(scale);
        prop_assert!((scaled.eval(t) - scale * base.eval(t)).abs() < 1e-9);
    }

    #[test]
    fn sinusoid_is_periodic(
        t in -1000.0f64..1000.0,
        period in 1.0f64..200.0,
        amplitude in 0.1f64..5.0,
    ) {
        let f = ForcingModel::sinusoid(amplitude, period, 0.0);
        prop_assert!((f.eval(t) - f.eval(t + period)).abs() < 1e-9 * amplitude.max(1.0));
        prop_assert!(f.eval(t).abs() <= amplitude * (1.0 + 1e-12));
    }

    #[test]
    fn config_round_trip(
        alpha in proptest::option::of(0.1f64..200.0),
        gamma in proptest::option::of(0.0f64..10.0),
        seed in proptest::option::of(any::<u64>()),
        t_total in proptest::option::of(1.0f64..1e7),
        forcing in proptest::option::of("(insol|zero|sine)"),
        out in proptest::option::of("[a-z][a-z0-9_/]{0,20}\\.csv"),
    ) {
        let cfg = RunConfig {
            alpha,
            gamma,
            seed,
            t_total,
            forcing_model: forcing,
            out,
            ..RunConfig::default()
        };
        let text = cfg.to_config_string();
        let parsed = RunConfig::from_config_str(&text).unwrap();
        prop_assert_eq!(&parsed, &cfg);
        prop_assert_eq!(parsed.to_config_string(), text);
    }

    #[test]
    fn custom_series_eval_matches_hand_sum(
        omega in 0.01f64..1.0,
        s in -5.0f64..5.0,
        c in -5.0f64..5.0,
        t in -1000.0f64..1000.0,
    ) {
        let f = ForcingModel::series(vec![HarmonicTerm::new(omega, s, c)]).unwrap();
        let expected = s * (omega * t).sin() + c * (omega * t).cos();
        prop_assert!((f.eval(t) - expected).abs() < 1e-12);
    }
}

/// Contraction onto the attracting trajectories: cluster diameters 200 kyr
/// past the section are no larger (λ_max < 0 regime).
#[test]
fn cluster_diameters_contract_past_the_section() {
    let params = OscillatorParams::new(11.11, 0.25, 0.75, 43.86);
    let forcing = ForcingModel::insolation_dimensionless();
    let cfg = IntegratorConfig::default().with_h(0.1);
    let ics = random_ics(70, (-1.0, 1.0), (-1.0, 1.0), 3000);
    let at_550 = evolve_section(&ics, 0.0, 550.0, &params, &forcing, &cfg).unwrap();
    let at_750 = evolve_section(&ics, 0.0, 750.0, &params, &forcing, &cfg).unwrap();
    let r_550 = count_clusters(&at_550, 0.1).unwrap();
    let r_750 = count_clusters(&at_750, 0.1).unwrap();
    assert_eq!(r_550.n, r_750.n, "cluster count must persist");
    let max_550 = r_550.clusters.iter().map(|c| c.diameter).fold(0.0, f64::max);
    let max_750 = r_750.clusters.iter().map(|c| c.diameter).fold(0.0, f64::max);
    assert!(
        max_750 <= max_550 + 1e-9,
        "diameters grew: {max_550} -> {max_750}"
    );
}

/// The two basins of the 2:1-locked periodic regime swap exactly under a
/// 41-kyr shift of t0 (the attracting trajectories are 41-kyr-shifted
/// copies of each other), so their areas are equal on average over t0 even
/// though a single t0 can split unevenly.
#[test]
fn periodic_basins_swap_under_a_forcing_period_shift() {
    use paleosync::attractors::locate_attractors;
    use paleosync::basins::{basin_areas, basin_sequence, GridSpec};
    let params = OscillatorParams::new(11.11, 0.25, 3.33, 35.09);
    let sine = ForcingModel::sine_41();
    let cfg = IntegratorConfig::default().with_h(0.1);
    let ics = random_ics(70, (-1.0, 1.0), (-1.0, 1.0), 3000);
    let ats = locate_attractors(&params, &sine, &ics, -1100.0, 550.0, 0.1, &cfg).unwrap();
    let grid = GridSpec { nx: 51, ny: 31, ..GridSpec::default_basin() };
    let maps = basin_sequence(&params, &sine, &grid, &[0.0, 41.0], 550.0, &ats, &cfg).unwrap();
    let a0 = basin_areas(&maps[0]).unwrap();
    let a41 = basin_areas(&maps[1]).unwrap();
    // Swap symmetry: basin 0 at t0 = 0 has the area of basin 1 at t0 = 41.
    assert!((a0[0] - a41[1]).abs() < 0.02, "a0 = {a0:?}, a41 = {a41:?}");
    assert!((a0[1] - a41[0]).abs() < 0.02);
    // Averaged over half the response period, both attracting trajectories
    // are (roughly) equally likely.
    let mean0 = 0.5 * (a0[0] + a41[0]);
    assert!((mean0 - 0.5).abs() < 0.1, "mean share = {mean0}");
}

/// Refining the basin grid 2x changes the area fractions by < 2% absolute.
#[test]
fn basin_areas_are_resolution_independent() {
    use paleosync::attractors::locate_attractors;
    use paleosync::basins::{basin_areas, classify_grid, GridSpec};
    let params = OscillatorParams::new(11.11, 0.25, 3.33, 35.09);
    let sine = ForcingModel::sine_41();
    let cfg = IntegratorConfig::default().with_h(0.1);
    let ics = random_ics(70, (-1.0, 1.0), (-1.0, 1.0), 3000);
    let ats = locate_attractors(&params, &sine, &ics, -1100.0, 550.0, 0.1, &cfg).unwrap();
    let coarse = GridSpec { nx: 51, ny: 31, ..GridSpec::default_basin() };
    let fine = GridSpec { nx: 101, ny: 61, ..GridSpec::default_basin() };
    let map_c = classify_grid(&params, &sine, &coarse, 0.0, 550.0, &ats.points, &cfg).unwrap();
    let map_f = classify_grid(&params, &sine, &fine, 0.0, 550.0, &ats.points, &cfg).unwrap();
    let a_c = basin_areas(&map_c).unwrap();
    let a_f = basin_areas(&map_f).unwrap();
    for (c, f) in a_c.iter().zip(a_f.iter()) {
        assert!((c - f).abs() < 0.02, "coarse {a_c:?} vs fine {a_f:?}");
    }
}

/// The probability interpretation of basin areas is t0-dependent under
/// quasiperiodic forcing: the smallest basin at t0 = 0 changes its share
/// by more than 20% by t0 = 90 kyr.
#[test]
fn astro_basin_areas_vary_materially_with_t0() {
    use paleosync::attractors::locate_attractors;
    use paleosync::basins::{basin_areas, basin_sequence, GridSpec};
    let params = OscillatorParams::new(11.11, 0.25, 0.75, 43.86);
    let astro = ForcingModel::insolation_dimensionless();
    let cfg = IntegratorConfig::default().with_h(0.1);
    let ics = random_ics(70, (-1.0, 1.0), (-1.0, 1.0), 3000);
    let ats = locate_attractors(&params, &astro, &ics, 0.0, 550.0, 0.1, &cfg).unwrap();
    let grid = GridSpec { nx: 51, ny: 31, ..GridSpec::default_basin() };
    let maps = basin_sequence(&params, &astro, &grid, &[0.0, 90.0], 550.0, &ats, &cfg).unwrap();
    let a0 = basin_areas(&maps[0]).unwrap();
    let a90 = basin_areas(&maps[1]).unwrap();
    let smallest = a0
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .map(|(i, _)| i)
        .unwrap();
    let change = (a90[smallest] - a0[smallest]).abs() / a0[smallest];
    assert!(change > 0.2, "smallest basin changed by {:.1}%", 100.0 * change);
}

/// Dominant-cluster location picks out the formed attracting trajectories
/// even when a weakly contracting ensemble still carries stragglers.
#[test]
fn dominant_attractors_survive_stragglers() {
    use paleosync::attractors::{locate_attractors, locate_dominant_attractors};
    let params = OscillatorParams::new(11.11, 0.25, 0.12, 35.09);
    let astro = ForcingModel::insolation_dimensionless();
    let cfg = IntegratorConfig::default().with_h(0.1);
    let ics = random_ics(70, (-1.0, 1.0), (-1.0, 1.0), 3000);
    // Strict location saturates on the straggler tail...
    assert!(matches!(
        locate_attractors(&params, &astro, &ics, 550.0 - 20_000.0, 550.0, 0.1, &cfg),
        Err(paleosync::Error::NSaturated)
    ));
    // ...while the dominant clusters are plainly formed.
    let ats = locate_dominant_attractors(
        &params,
        &astro,
        &ics,
        550.0 - 20_000.0,
        550.0,
        0.1,
        0.15,
        &cfg,
    )
    .unwrap();
    assert!(
        (2..=4).contains(&ats.points.len()),
        "dominant clusters: {:?}",
        ats.points
    );
}

/// A deliberately short forced run is flagged as not converged while the
/// estimate still drifts.
#[test]
fn short_spectrum_runs_raise_the_not_converged_flag() {
    use paleosync::lyapunov::{long_term_spectrum, SpectrumProtocol};
    use paleosync::oscillator::SystemState;
    let params = OscillatorParams::new(11.11, 0.25, 0.75, 35.09);
    let astro = ForcingModel::insolation_dimensionless();
    let protocol =
        SpectrumProtocol { t_total: 3000.0, transient: 0.0, frame: 1, trace_stride: Some(10.0) };
    let rec = long_term_spectrum(
        &params,
        &astro,
        SystemState::new(1.5, 2.0, 0.0),
        &protocol,
        &IntegratorConfig::default(),
    )
    .unwrap();
    assert!(rec.not_converged, "drifting estimate must be flagged");
    assert!(!rec.convergence_trace.is_empty());
}

/// Arnol'd tongue roots sit at integer multiples of the forcing period:
/// with a T_ULC row passing exactly through 41, 82 and 123 kyr at moderate
/// γ, the locked cells there carry N = 1, 2 and 3.
#[test]
fn tongue_roots_sit_at_multiples_of_the_forcing_period() {
    use paleosync::sweep::{sweep_count, AxisParam, AxisSpec, CellStatus, SweepBase};
    let x = AxisSpec::linspace(AxisParam::TUlc, 36.9, 127.1, 23).unwrap();
    assert!((x.values[1] - 41.0).abs() < 1e-9);
    assert!((x.values[11] - 82.0).abs() < 1e-9);
    assert!((x.values[21] - 123.0).abs() < 1e-9);
    let y = AxisSpec::linspace(AxisParam::Gamma, 0.5, 1.0, 2).unwrap();
    let mut base = SweepBase::new(
        OscillatorParams::new(11.11, 0.25, 0.0, 35.09),
        ForcingModel::sine_41(),
    );
    base.integrator = base.integrator.with_h(0.1);
    let grid = sweep_count(x, y, base).unwrap();
    for (ix, expected) in [(1usize, 1.0), (11, 2.0), (21, 3.0)] {
        let cell = grid.cell(ix, 0);
        assert_eq!(cell.status, CellStatus::Ok, "tongue root cell {ix} not locked");
        assert_eq!(
            cell.value, expected,
            "N at T_ULC = {} is {}",
            grid.x_axis.values[ix], cell.value
        );
    }
}
