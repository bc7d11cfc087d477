//! Counting attracting trajectories by clustering on a fixed-time section.
//!
//! An ensemble of initial conditions at t₀ is integrated to a section time
//! t; every attracting trajectory shows up as one tight cluster of points
//! in the (x, y)-section, so counting attracting trajectories reduces to
//! single-linkage threshold clustering: two points belong to the same
//! cluster iff they are connected by a chain of pairwise distances ≤ d_T
//! (default 0.1). The count N saturates at [`N_SATURATED`], meaning "none
//! or more than five attracting trajectories".

use rayon::prelude::*;

use crate::forcing::ForcingModel;
use crate::integrator::{integrate, IntegratorConfig};
use crate::oscillator::{OscillatorParams, SystemState};
use crate::rng::Rng;
use crate::{Error, Result};

/// Default clustering threshold distance.
pub const DEFAULT_D_T: f64 = 0.1;
/// Saturated count: none or more than five attracting trajectories.
pub const N_SATURATED: usize = 6;

/// Points of an evolved ensemble on the (x, y)-section at `t_section`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SectionPoints {
    pub t_section: f64,
    pub t0: f64,
    /// Surviving points with the index of their source initial condition.
    pub points: Vec<SectionPoint>,
    /// Indices of initial conditions whose trajectories diverged.
    pub diverged: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SectionPoint {
    pub x: f64,
    pub y: f64,
    /// Index into the initial-condition list.
    pub source: usize,
}

impl SectionPoint {
    fn distance(&self, other: &SectionPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// One cluster of section points.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Cluster {
    /// Mean of the member points.
    pub centroid: (f64, f64),
    /// Source indices of the members.
    pub members: Vec<usize>,
    /// Max pairwise distance within the cluster.
    pub diameter: f64,
}

/// Result of threshold clustering a section.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ClusterReport {
    /// Saturating count: min(raw cluster count, 6); 6 ⇔ saturated.
    pub n: usize,
    /// Raw number of clusters before saturation.
    pub raw_count: usize,
    /// Clusters sorted by centroid (x, then y).
    pub clusters: Vec<Cluster>,
    /// Threshold distance used.
    pub d_t: f64,
}

impl ClusterReport {
    pub fn is_saturated(&self) -> bool {
        self.n >= N_SATURATED
    }
}

/// Integrates every initial condition from t0 to the section time.
/// Divergent trajectories are recorded, not fatal.
pub fn evolve_section(
    ics: &[(f64, f64)],
    t0: f64,
    t_section: f64,
    params: &OscillatorParams,
    forcing: &ForcingModel,
    config: &IntegratorConfig,
) -> Result<SectionPoints> {
    if t_section < t0 {
        return Err(Error::InvalidConfig(format!(
            "t_section ({t_section}) must be >= t0 ({t0})"
        )));
    }
    let results: Vec<(usize, Option<SystemState>)> = ics
        .par_iter()
        .enumerate()
        .map(|(i, &(x, y))| {
            let out = integrate(SystemState::new(x, y, t0), params, forcing, t_section, config, |_| {});
            (i, out.ok())
        })
        .collect();
    let mut points = Vec::with_capacity(ics.len());
    let mut diverged = Vec::new();
    for (i, state) in results {
        match state {
            Some(s) => points.push(SectionPoint { x: s.x, y: s.y, source: i }),
            None => diverged.push(i),
        }
    }
    Ok(SectionPoints { t_section, t0, points, diverged })
}

/// Single-linkage threshold clustering: points are in the same cluster iff
/// connected by a chain of pairwise distances ≤ d_T. Deterministic and
/// permutation-invariant. Empty input gives an empty report with N = 0.
pub fn count_clusters(section: &SectionPoints, d_t: f64) -> Result<ClusterReport> {
    if !(d_t > 0.0) {
        return Err(Error::InvalidConfig(format!("d_T must be > 0, got {d_t}")));
    }
    let pts = &section.points;
    if pts.is_empty() {
        return Ok(ClusterReport { n: 0, raw_count: 0, clusters: Vec::new(), d_t });
    }

    // Union-find over all pairs within threshold.
    let mut parent: Vec<usize> = (0..pts.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            if pts[i].distance(&pts[j]) <= d_t {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }

    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..pts.len() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }

    let mut clusters: Vec<Cluster> = groups
        .values()
        .map(|idx| {
            let n = idx.len() as f64;
            let cx = idx.iter().map(|&i| pts[i].x).sum::<f64>() / n;
            let cy = idx.iter().map(|&i| pts[i].y).sum::<f64>() / n;
            let mut diameter: f64 = 0.0;
            for (a, &i) in idx.iter().enumerate() {
                for &j in idx.iter().skip(a + 1) {
                    diameter = diameter.max(pts[i].distance(&pts[j]));
                }
            }
            let mut members: Vec<usize> = idx.iter().map(|&i| pts[i].source).collect();
            members.sort_unstable();
            Cluster { centroid: (cx, cy), members, diameter }
        })
        .collect();
    clusters.sort_by(|a, b| {
        a.centroid
            .0
            .total_cmp(&b.centroid.0)
            .then(a.centroid.1.total_cmp(&b.centroid.1))
    });

    let raw_count = clusters.len();
    Ok(ClusterReport { n: raw_count.min(N_SATURATED), raw_count, clusters, d_t })
}

/// Uniform IC grid covering the given ranges (inclusive endpoints), row
/// major over y then x. The 7×7 grid over [−2.2, 2.2]² is the counting
/// protocol default.
pub fn grid_ics(x_range: (f64, f64), y_range: (f64, f64), nx: usize, ny: usize) -> Vec<(f64, f64)> {
    let mut ics = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        let fy = if ny > 1 { iy as f64 / (ny - 1) as f64 } else { 0.5 };
        let y = y_range.0 + fy * (y_range.1 - y_range.0);
        for ix in 0..nx {
            let fx = if nx > 1 { ix as f64 / (nx - 1) as f64 } else { 0.5 };
            let x = x_range.0 + fx * (x_range.1 - x_range.0);
            ics.push((x, y));
        }
    }
    ics
}

/// The 49-point counting ensemble of the N-map protocol.
pub fn protocol_grid_49() -> Vec<(f64, f64)> {
    grid_ics((-2.2, 2.2), (-2.2, 2.2), 7, 7)
}

/// `n` random initial conditions, uniform over the box, seeded.
pub fn random_ics(n: usize, x_range: (f64, f64), y_range: (f64, f64), seed: u64) -> Vec<(f64, f64)> {
    let mut rng = Rng::new(seed);
    (0..n)
        .map(|_| (rng.uniform(x_range.0, x_range.1), rng.uniform(y_range.0, y_range.1)))
        .collect()
}

/// Located attracting trajectories: cluster centroids at the section time.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AttractorSet {
    /// Section time the centroids refer to.
    pub t: f64,
    /// Centroids sorted by (x, y).
    pub points: Vec<(f64, f64)>,
    /// Minimum pairwise centroid distance (∞ for a single attractor).
    pub min_distance: f64,
}

/// Locates the attracting trajectories for downstream basin analysis:
/// evolve the ensemble, cluster, return the centroids. Fails with
/// [`Error::NSaturated`] when the count saturates (no well-defined
/// attractor set).
pub fn locate_attractors(
    params: &OscillatorParams,
    forcing: &ForcingModel,
    ics: &[(f64, f64)],
    t0: f64,
    t_section: f64,
    d_t: f64,
    config: &IntegratorConfig,
) -> Result<AttractorSet> {
    let section = evolve_section(ics, t0, t_section, params, forcing, config)?;
    let report = count_clusters(&section, d_t)?;
    if report.is_saturated() || report.n == 0 {
        return Err(Error::NSaturated);
    }
    attractor_set(t_section, report.clusters.iter().map(|c| c.centroid).collect())
}

/// Like [`locate_attractors`], but keeps only clusters holding at least
/// `min_share` of the surviving ensemble and ignores straggler points.
/// Very weakly contracting regimes (|λ_max| of a few 1e-3 kyr⁻¹) keep a
/// tail of unconverged trajectories for tens of thousands of kyr, so the
/// saturating count never settles even though the dominant clusters are
/// plainly formed; this picks those dominant clusters.
#[allow(clippy::too_many_arguments)]
pub fn locate_dominant_attractors(
    params: &OscillatorParams,
    forcing: &ForcingModel,
    ics: &[(f64, f64)],
    t0: f64,
    t_section: f64,
    d_t: f64,
    min_share: f64,
    config: &IntegratorConfig,
) -> Result<AttractorSet> {
    if !(0.0 < min_share && min_share <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "min_share must be in (0, 1], got {min_share}"
        )));
    }
    let section = evolve_section(ics, t0, t_section, params, forcing, config)?;
    let report = count_clusters(&section, d_t)?;
    let surviving = section.points.len();
    let points: Vec<(f64, f64)> = report
        .clusters
        .iter()
        .filter(|c| c.members.len() as f64 >= min_share * surviving as f64)
        .map(|c| c.centroid)
        .collect();
    if points.is_empty() {
        return Err(Error::NSaturated);
    }
    attractor_set(t_section, points)
}

fn attractor_set(t: f64, points: Vec<(f64, f64)>) -> Result<AttractorSet> {
    let mut min_distance = f64::INFINITY;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let d = (points[i].0 - points[j].0).hypot(points[i].1 - points[j].1);
            min_distance = min_distance.min(d);
        }
    }
    Ok(AttractorSet { t, points, min_distance })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn section_from(points: &[(f64, f64)]) -> SectionPoints {
        SectionPoints {
            t_section: 0.0,
            t0: 0.0,
            points: points
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| SectionPoint { x, y, source: i })
                .collect(),
            diverged: Vec::new(),
        }
    }

    #[test]
    fn identical_points_form_one_cluster() {
        let s = section_from(&[(0.5, -0.5); 12]);
        let r = count_clusters(&s, 0.1).unwrap();
        assert_eq!(r.n, 1);
        assert_eq!(r.clusters[0].members.len(), 12);
        assert_eq!(r.clusters[0].diameter, 0.0);
    }

    #[test]
    fn two_points_beyond_threshold_split() {
        let s = section_from(&[(0.0, 0.0), (0.2, 0.0)]);
        let r = count_clusters(&s, 0.1).unwrap();
        assert_eq!(r.n, 2);
        let s2 = section_from(&[(0.0, 0.0), (0.09, 0.0)]);
        assert_eq!(count_clusters(&s2, 0.1).unwrap().n, 1);
    }

    #[test]
    fn chains_link_through_intermediate_points() {
        // Three points, neighbours within d_T but endpoints not.
        let s = section_from(&[(0.0, 0.0), (0.09, 0.0), (0.18, 0.0)]);
        let r = count_clusters(&s, 0.1).unwrap();
        assert_eq!(r.n, 1);
        assert!((r.clusters[0].diameter - 0.18).abs() < 1e-12);
    }

    #[test]
    fn empty_input_reports_zero() {
        let s = section_from(&[]);
        let r = count_clusters(&s, 0.1).unwrap();
        assert_eq!(r.n, 0);
        assert!(r.clusters.is_empty());
    }

    #[test]
    fn saturation_caps_at_six() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 0.0)).collect();
        let r = count_clusters(&section_from(&pts), 0.1).unwrap();
        assert_eq!(r.raw_count, 10);
        assert_eq!(r.n, N_SATURATED);
        assert!(r.is_saturated());
    }

    #[test]
    fn clustering_is_permutation_invariant() {
        let base = [(0.0, 0.0), (0.05, 0.0), (1.0, 1.0), (1.04, 1.02), (-1.5, 0.3)];
        let r1 = count_clusters(&section_from(&base), 0.1).unwrap();
        let mut flipped: Vec<(f64, f64)> = base.to_vec();
        flipped.reverse();
        let r2 = count_clusters(&section_from(&flipped), 0.1).unwrap();
        assert_eq!(r1.n, r2.n);
        let c1: Vec<(f64, f64)> = r1.clusters.iter().map(|c| c.centroid).collect();
        let c2: Vec<(f64, f64)> = r2.clusters.iter().map(|c| c.centroid).collect();
        for (a, b) in c1.iter().zip(c2.iter()) {
            assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_gap_returns_the_ics() {
        let p = OscillatorParams::reference(0.0);
        let ics = protocol_grid_49();
        let s = evolve_section(&ics, 5.0, 5.0, &p, &ForcingModel::zero(), &IntegratorConfig::default())
            .unwrap();
        assert_eq!(s.points.len(), 49);
        for (pt, ic) in s.points.iter().zip(ics.iter()) {
            assert_eq!((pt.x, pt.y), *ic);
        }
    }

    #[test]
    fn grid_covers_the_requested_box() {
        let g = grid_ics((-2.2, 2.2), (-2.2, 2.2), 7, 7);
        assert_eq!(g.len(), 49);
        assert_eq!(g[0], (-2.2, -2.2));
        assert_eq!(g[48], (2.2, 2.2));
    }

    #[test]
    fn rejects_nonpositive_threshold() {
        let s = section_from(&[(0.0, 0.0)]);
        assert!(count_clusters(&s, 0.0).is_err());
        assert!(count_clusters(&s, -1.0).is_err());
    }
}
