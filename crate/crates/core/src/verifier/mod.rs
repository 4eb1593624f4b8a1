//! Numerical bijectivity checks for harmonic maps.
//!
//! The checks run on the piecewise-affine discretization: Jacobian sampling,
//! image-triangle orientation and overlap, coverage of the target by inverse
//! evaluation, and directional extrema counts along the image boundary.

mod extrema;
mod injectivity;
mod sampling;

pub use extrema::{alpha_grid, count_cyclic_extrema, directional_extrema_profile, polyline_extrema, ExtremaRecord};
pub use injectivity::{
    check_boundary_orientation, check_injectivity, check_surjectivity, polyline_is_simple, CoverageReport,
    InjectivityReport, MAX_REPORTED_OVERLAPS,
};
pub use sampling::{
    halton, interior_samples, sample_jacobian_determinants, DetSample, DetSource, FiniteDifferenceDets,
    JacobianSampling,
};

use serde::Serialize;

use crate::mapping::HarmonicMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifierConfig {
    pub samples: usize,
    pub threshold: f64,
    pub alpha_count: usize,
    pub coverage_resolution: usize,
    /// Allowed uncovered fraction; `None` picks 0 for convex targets and 1e-3 otherwise.
    pub coverage_epsilon: Option<f64>,
    /// Low-determinant samples within this many mesh sizes of the source
    /// boundary only make a map suspect.
    pub boundary_band: f64,
}

impl Default for VerifierConfig {
    fn default() -> Self {
        VerifierConfig {
            samples: 25_000,
            threshold: 1e-5,
            alpha_count: 16,
            coverage_resolution: 100,
            coverage_epsilon: None,
            boundary_band: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Suspect,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BijectivityReport {
    pub sample_count: usize,
    pub threshold: f64,
    pub min_det: f64,
    pub below_threshold: Vec<DetSample>,
    pub boundary_orientation_ok: bool,
    pub orientation_ok: bool,
    pub overlap_count: usize,
    pub coverage: f64,
    pub coverage_epsilon: f64,
    pub area_ratio: f64,
    pub extrema: Vec<ExtremaRecord>,
    pub verdict: Verdict,
}

impl BijectivityReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs every check and combines them into a verdict.
///
/// Certified: positive orientation, no overlaps, full coverage (up to the
/// coverage tolerance), all sampled determinants above the threshold and all
/// extrema profiles `(1, 1)`. Suspect: the structural checks pass but some
/// sub-threshold determinants (all near the source boundary) or extrema
/// profiles fail. Failed: anything else.
pub fn certify(map: &HarmonicMap, config: &VerifierConfig) -> BijectivityReport {
    let sampling = sample_jacobian_determinants(map, config.samples, config.threshold);
    let boundary_orientation_ok = check_boundary_orientation(map);
    let target = map.target_polygon();
    let target_area = target.map_or(f64::NAN, |t| t.area());
    let inj = check_injectivity(map.affine(), target_area);
    let coverage_epsilon = config
        .coverage_epsilon
        .unwrap_or(if target.is_some_and(|t| t.is_convex()) { 0.0 } else { 1e-3 });
    let coverage = target.map_or(0.0, |t| {
        check_surjectivity(map.affine(), t, config.coverage_resolution).fraction
    });
    let extrema = directional_extrema_profile(map.affine(), &alpha_grid(config.alpha_count));

    let structural_ok =
        boundary_orientation_ok && inj.orientation_ok && inj.overlap_count == 0 && coverage >= 1.0 - coverage_epsilon;
    let det_ok = sampling.min_det > config.threshold;
    let extrema_ok = extrema.iter().all(ExtremaRecord::is_unimodal);
    let band = config.boundary_band * map.affine().source_mesh().mesh_size_absolute();
    let dets_near_boundary = sampling
        .below_threshold
        .iter()
        .all(|s| map.source().boundary_distance(&nalgebra::Point2::new(s.x, s.y)) <= band);
    let verdict = if structural_ok && det_ok && extrema_ok {
        Verdict::Certified
    } else if structural_ok && dets_near_boundary {
        Verdict::Suspect
    } else {
        Verdict::Failed
    };
    BijectivityReport {
        sample_count: sampling.sample_count,
        threshold: config.threshold,
        min_det: sampling.min_det,
        below_threshold: sampling.below_threshold,
        boundary_orientation_ok,
        orientation_ok: inj.orientation_ok,
        overlap_count: inj.overlap_count,
        coverage,
        coverage_epsilon,
        area_ratio: inj.area_ratio,
        extrema,
        verdict,
    }
}
