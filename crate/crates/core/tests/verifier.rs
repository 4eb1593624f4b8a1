mod common;

use std::sync::Arc;

use harmonic_gbc::geometry::{BoundaryCorrespondence, Polygon};
use harmonic_gbc::verifier::{
    alpha_grid, check_boundary_orientation, check_injectivity, check_surjectivity, directional_extrema_profile,
    polyline_extrema, sample_jacobian_determinants,
};
use harmonic_gbc::{
    boundary_correspondence, build_map, certify, compute_gbc, AnalyticMap, GbcBasis, HarmonicMap, Verdict,
    VerifierConfig,
};
use nalgebra::Point2;

use common::*;

fn basis(poly: &Polygon, h: f64) -> Arc<GbcBasis> {
    Arc::new(compute_gbc(poly, h).unwrap())
}

fn map_to(source: &Polygon, target: &Polygon, h: f64) -> HarmonicMap {
    build_map(basis(source, h), &boundary_correspondence(source, target).unwrap()).unwrap()
}

fn quick() -> VerifierConfig {
    VerifierConfig {
        samples: 4000,
        ..VerifierConfig::default()
    }
}

#[test]
fn determinant_sampling_of_affine_maps() {
    let sq = unit_square();
    let id = map_to(&sq, &sq, 1.0 / 32.0);
    let s = sample_jacobian_determinants(&id, 25_000, 1e-5);
    assert_eq!(s.sample_count, 25_000);
    assert!((s.min_det - 1.0).abs() <= 1e-9 && s.below_threshold.is_empty());
    let big = map_to(&sq, &sq.scaled(2.0), 1.0 / 32.0);
    let s = sample_jacobian_determinants(&big, 25_000, 1e-5);
    assert!((s.min_det - 4.0).abs() <= 1e-9 && s.below_threshold.is_empty());
    // Reruns are bit-for-bit identical.
    assert_eq!(s, sample_jacobian_determinants(&big, 25_000, 1e-5));
}

#[test]
fn boundary_orientation_cases() {
    let sq = unit_square();
    let b = basis(&sq, 0.1);
    let ok = build_map(b.clone(), &boundary_correspondence(&sq, &sq).unwrap()).unwrap();
    assert!(check_boundary_orientation(&ok));
    let rotated = build_map(b.clone(), &BoundaryCorrespondence::with_offset(&sq, &sq, 3).unwrap()).unwrap();
    assert!(check_boundary_orientation(&rotated));

    let v = sq.vertices();
    let reversed = HarmonicMap::from_targets(b.clone(), v.iter().rev().copied().collect()).unwrap();
    assert!(!check_boundary_orientation(&reversed));
    let swapped = HarmonicMap::from_targets(b.clone(), vec![v[0], v[2], v[1], v[3]]).unwrap();
    assert!(!check_boundary_orientation(&swapped));
    // Swapping two neighbours on a convex hexagon keeps a valid polygon but
    // breaks the cyclic order.
    let hex = square_with(6);
    let bh = basis(&hex, 0.1);
    let w = hex.vertices();
    let nonmonotone = HarmonicMap::from_targets(bh, vec![w[0], w[1], w[2], w[3], w[5], w[4]]).unwrap();
    assert!(!check_boundary_orientation(&nonmonotone));
}

#[test]
fn injectivity_reports() {
    let sq = unit_square();
    let id = map_to(&sq, &sq, 1.0 / 32.0);
    let r = check_injectivity(id.affine(), 1.0);
    assert!(r.orientation_ok && r.overlap_count == 0 && r.is_injective());
    assert!((r.area_ratio - 1.0).abs() <= 1e-9);

    let l_map = map_to(&l_shape(), &square_with(6), 1.0 / 32.0);
    let r = check_injectivity(l_map.affine(), 1.0);
    assert!(r.is_injective());
    assert!((r.area_ratio - 1.0).abs() <= 1e-9);

    // Two equal targets collapse the square onto a triangle of half its area.
    let collapsed = HarmonicMap::from_targets(
        basis(&sq, 1.0 / 32.0),
        vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0), Point2::new(1.0, 1.0)],
    )
    .unwrap();
    assert!(collapsed.target_polygon().is_none());
    let r = check_injectivity(collapsed.affine(), sq.area());
    assert!(r.area_ratio < 1.0);
    assert!((r.area_ratio - 0.5).abs() <= 1e-9);
    assert_eq!(certify(&collapsed, &quick()).verdict, Verdict::Failed);
}

#[test]
fn coverage_cases() {
    let l_map = map_to(&l_shape(), &square_with(6), 1.0 / 32.0);
    let c = check_surjectivity(l_map.affine(), &square_with(6), 100);
    assert_eq!(c.probes, 100 * 100);
    assert_eq!(c.fraction, 1.0);

    // Probe centres on the hypotenuse x + y = 1 are dropped.
    let tri = Polygon::new(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
    let tri_map = map_to(&tri, &tri, 1.0 / 32.0);
    let c = check_surjectivity(tri_map.affine(), &tri, 100);
    assert_eq!(c.probes, (0..99).map(|i| 99 - i).sum::<usize>());
    assert_eq!(c.fraction, 1.0);

    let sq = unit_square();
    let reversed = HarmonicMap::from_targets(basis(&sq, 1.0 / 32.0), sq.vertices().into_iter().rev().collect()).unwrap();
    let rep = certify(&reversed, &quick());
    assert!(rep.coverage.is_finite());
    assert_eq!(rep.verdict, Verdict::Failed);
}

#[test]
fn extrema_profiles() {
    let sq = unit_square();
    let id = map_to(&sq, &sq, 0.1);
    let prof = directional_extrema_profile(id.affine(), &[0.0]);
    assert_eq!((prof[0].n_max, prof[0].n_min), (1, 1));
    assert!((prof[0].min_grad - 1.0).abs() <= 1e-9);

    let hept = map_to(&heptagon(), &square_with(7), 1.0 / 32.0);
    assert!(directional_extrema_profile(hept.affine(), &alpha_grid(16)).iter().all(|e| e.is_unimodal()));

    let f = AnalyticMap::default();
    let trace = f.boundary_trace(400);
    assert!(alpha_grid(16).iter().any(|&a| polyline_extrema(&trace, a).0 >= 2));
}

#[test]
fn analytic_map_is_locally_but_not_globally_injective() {
    let f = AnalyticMap::default();
    let disc = f.discretize(256, 256);
    let dets: Vec<f64> = (0..disc.source_mesh().triangle_count()).map(|t| disc.det(t)).collect();
    let lo = dets.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(lo > 0.4, "{lo}");
    let r = check_injectivity(&disc, f64::NAN);
    assert!(r.orientation_ok);
    assert!(r.overlap_count > 0);
    assert!(directional_extrema_profile(&disc, &alpha_grid(16)).iter().any(|e| !e.is_unimodal()));
}

#[test]
fn verdicts() {
    let l_map = map_to(&l_shape(), &square_with(6), 1.0 / 32.0);
    let r = certify(&l_map, &VerifierConfig::default());
    assert_eq!(r.verdict, Verdict::Certified);
    assert_eq!(r.to_json_string(), certify(&l_map, &VerifierConfig::default()).to_json_string());

    // Convex source onto a nonconvex target folds.
    let bad = map_to(&square_with(6), &l_shape(), 1.0 / 32.0);
    assert_ne!(certify(&bad, &quick()).verdict, Verdict::Certified);

    let c = BoundaryCorrespondence::with_offset(&j_shape(), &l_target(), 2).unwrap();
    let jl = build_map(basis(&j_shape(), 1.0 / 32.0), &c).unwrap();
    let r = certify(&jl, &VerifierConfig::default());
    assert_eq!(r.verdict, Verdict::Suspect);
    assert_eq!(r.coverage, 1.0);
    assert!(r.below_threshold.len() <= 10);

    let json: serde_json::Value = serde_json::from_str(&r.to_json_string()).unwrap();
    for key in ["min_det", "below_threshold", "orientation_ok", "coverage", "area_ratio", "extrema", "verdict"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    assert_eq!(json["verdict"], "suspect");
}
