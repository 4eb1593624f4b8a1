mod common;

use std::sync::Arc;

use harmonic_gbc::geometry::{insert_inactive_vertices, BoundaryCorrespondence, Polygon};
use harmonic_gbc::mapping::{AnalyticMap, MapError};
use harmonic_gbc::{boundary_correspondence, build_map, compose_maps, compute_gbc, GbcBasis, HarmonicMap};
use nalgebra::{Matrix2, Point2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

fn basis(poly: &Polygon, h: f64) -> Arc<GbcBasis> {
    Arc::new(compute_gbc(poly, h).unwrap())
}

fn map_to(source: &Polygon, target: &Polygon, h: f64) -> HarmonicMap {
    build_map(basis(source, h), &boundary_correspondence(source, target).unwrap()).unwrap()
}

fn random_interior(poly: &Polygon, rng: &mut ChaCha8Rng) -> Point2<f64> {
    let bb = poly.bounding_box();
    loop {
        let q = Point2::new(rng.random_range(bb.min.x..bb.max.x), rng.random_range(bb.min.y..bb.max.y));
        if poly.contains_strict(&q) {
            return q;
        }
    }
}

#[test]
fn identity_and_scaling_maps() {
    let sq = unit_square();
    let b = basis(&sq, 1.0 / 32.0);
    let id = build_map(b.clone(), &boundary_correspondence(&sq, &sq).unwrap()).unwrap();
    for (p, q) in b.mesh().nodes().iter().zip(id.image_nodes()) {
        assert!((p - q).norm() <= 1e-6);
    }
    assert!((id.eval(&Point2::new(0.3, 0.7)).unwrap() - Point2::new(0.3, 0.7)).norm() <= 1e-6);
    for t in [0, b.mesh().triangle_count() / 2] {
        assert!((id.jacobian(t) - Matrix2::identity()).norm() <= 1e-9);
    }
    let big = build_map(b.clone(), &boundary_correspondence(&sq, &sq.scaled(2.0)).unwrap()).unwrap();
    assert!((big.eval(&Point2::new(0.5, 0.5)).unwrap() - Point2::new(1.0, 1.0)).norm() <= 1e-6);
    let j = big.jacobian(3);
    assert!((j - Matrix2::identity() * 2.0).norm() <= 1e-9);
    assert!((j.determinant() - 4.0).abs() <= 1e-9);
    assert!(matches!(id.eval(&Point2::new(-0.1, 0.5)), Err(MapError::OutsideDomain { .. })));
}

#[test]
fn vertices_and_edge_midpoints_follow_the_correspondence() {
    let (l, sq6) = (l_shape(), square_with(6));
    let b = basis(&l, 1.0 / 32.0);
    let c = BoundaryCorrespondence::with_offset(&l, &sq6, 1).unwrap();
    let m = build_map(b.clone(), &c).unwrap();
    let w = c.targets();
    for (j, &node) in b.mesh().vertex_nodes().iter().enumerate() {
        assert_eq!(m.image_nodes()[node], w[j]);
    }
    let v = l.vertices();
    for j in 0..6 {
        let mid = Point2::from((v[j].coords + v[(j + 1) % 6].coords) / 2.0);
        let want = Point2::from((w[j].coords + w[(j + 1) % 6].coords) / 2.0);
        assert!((m.eval(&mid).unwrap() - want).norm() <= 1e-6);
    }
    let json = m.to_json_value();
    assert_eq!(json["image"].as_array().unwrap().len(), b.mesh().node_count());
}

#[test]
fn round_trip_through_inverse() {
    let sq = unit_square();
    let quad = Polygon::new(&[[0.0, 0.0], [2.0, 0.2], [1.7, 1.5], [0.3, 1.1]]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for target in [sq.clone(), quad] {
        let m = map_to(&sq, &target, 1.0 / 32.0);
        for _ in 0..1000 {
            let q = random_interior(&sq, &mut rng);
            let back = m.invert(&m.eval(&q).unwrap()).unwrap();
            assert!((back - q).norm() <= 1e-9, "{q} -> {back}");
        }
        for (v, w) in sq.vertices().iter().zip(m.targets()) {
            assert!((m.invert(w).unwrap() - v).norm() <= 1e-9);
        }
        assert!(matches!(m.invert(&Point2::new(5.0, 5.0)), Err(MapError::OutsideImage { .. })));
    }
}

#[test]
fn convex_targets_contain_the_image() {
    let l = l_shape();
    let hex6 = Polygon::new(
        &(0..6)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / 6.0;
                [a.cos(), a.sin()]
            })
            .collect::<Vec<_>>(),
    )
    .unwrap();
    let m = map_to(&l, &hex6, 1.0 / 32.0);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10_000 {
        let w = m.eval(&random_interior(&l, &mut rng)).unwrap();
        assert!(hex6.contains(&w) || hex6.boundary_distance(&w) <= 1e-9, "{w} escapes");
    }
}

#[test]
fn triangle_target_has_no_ambiguous_probes() {
    let l = l_shape();
    let tri = insert_inactive_vertices(&triangle(), &[(0, 0.5), (1, 0.4), (2, 0.5)]).unwrap();
    let m = map_to(&l, &tri, 1.0 / 32.0);
    let aff = m.affine();
    assert!((0..aff.source_mesh().triangle_count()).all(|t| aff.det(t) > 0.0));
    let bb = tri.bounding_box();
    let mut inside = 0;
    for k in 0..200 * 200 {
        let (i, j) = (k % 200, k / 200);
        let w = Point2::new(
            bb.min.x + bb.width() * (i as f64 + 0.5) / 200.0,
            bb.min.y + bb.height() * (j as f64 + 0.5) / 200.0,
        );
        match m.invert(&w) {
            Err(MapError::Ambiguous { .. }) => panic!("ambiguous probe at {w}"),
            Ok(_) => inside += 1,
            Err(_) => assert!(!tri.contains_strict(&w) || tri.boundary_distance(&w) < 1e-9),
        }
    }
    assert!(inside > 10_000);
}

#[test]
fn folded_map_reports_ambiguity() {
    let u = Polygon::new(&[[0.0, 0.0], [3.0, 0.0], [3.0, 3.0], [2.0, 3.0], [2.0, 1.0], [1.0, 1.0], [1.0, 3.0], [0.0, 3.0]]).unwrap();
    let m = map_to(&square_with(8), &u, 0.05);
    let ambiguous = (0..100 * 100)
        .map(|k| Point2::new(3.0 * ((k % 100) as f64 + 0.5) / 100.0, 3.0 * ((k / 100) as f64 + 0.5) / 100.0))
        .filter(|w| matches!(m.invert(w), Err(MapError::Ambiguous { multiplicity, .. }) if multiplicity >= 2))
        .count();
    assert!(ambiguous > 0);
}

#[test]
fn analytic_jacobian_matches_finite_differences() {
    let f = AnalyticMap::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..2000 {
        let p = Point2::new(rng.random_range(0.0..1.0), rng.random_range(0.0..4.0 * std::f64::consts::PI));
        let exact = f.jacobian(&p);
        let fd = f.fd_jacobian(&p, 1e-5);
        assert!((exact - fd).abs().max() <= 1e-6, "at {p}");
        assert!((exact.determinant() - 0.5).abs() <= 1e-12);
        assert!((fd.determinant() - 0.5).abs() <= 1e-6);
    }
    let a = f.eval(&Point2::new(0.0, 0.0));
    let b = f.eval(&Point2::new(0.0, 2.0 * std::f64::consts::PI));
    assert!((a - b).norm() <= 1e-9);
}

#[test]
fn composition_checks_the_intermediate_polygon() {
    let (l, sq6) = (l_shape(), square_with(6));
    let bl = basis(&l, 1.0 / 24.0);
    let phi0 = Arc::new(build_map(bl.clone(), &boundary_correspondence(&l, &sq6).unwrap()).unwrap());
    let other = sq6.scaled(1.5);
    let phi1 = Arc::new(build_map(bl.clone(), &boundary_correspondence(&l, &other).unwrap()).unwrap());
    assert!(matches!(compose_maps(phi0.clone(), phi1), Err(MapError::IntermediateMismatch(_))));
    let sq = unit_square();
    let small = Arc::new(map_to(&sq, &sq, 0.1));
    assert!(matches!(compose_maps(phi0.clone(), small), Err(MapError::IntermediateMismatch(_))));

    // A rotated pairing onto the same intermediate polygon still composes.
    let rotated = Arc::new(build_map(bl.clone(), &BoundaryCorrespondence::with_offset(&l, &sq6, 2).unwrap()).unwrap());
    let composed = compose_maps(phi0.clone(), rotated).unwrap();
    let v = l.vertices();
    for k in 0..6 {
        let w = composed.eval(&v[k]).unwrap();
        assert!((w - v[(k + 4) % 6]).norm() <= 1e-9, "vertex {k} -> {w}");
    }

    let identity = compose_maps(phi0.clone(), phi0).unwrap();
    for p in bl.mesh().nodes() {
        assert!((identity.eval(p).unwrap() - p).norm() <= 1e-6);
        assert!((identity.pullback(p).unwrap() - p).norm() <= 1e-6);
    }
}
