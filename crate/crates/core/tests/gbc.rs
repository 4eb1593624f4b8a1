mod common;

use std::sync::Arc;

use harmonic_gbc::gbc::{compute_basis, hat_value, GbcError};
use harmonic_gbc::geometry::{triangulate, Polygon};
use harmonic_gbc::solver::{assemble_stiffness, DirichletSolver, LinearSolver};
use harmonic_gbc::{compute_gbc, compute_gbc_with_holes, GbcBasis};
use nalgebra::Point2;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

#[test]
fn square_corner_function_at_center() {
    let basis = compute_gbc(&unit_square(), H).unwrap();
    let phi = basis.evaluate(&Point2::new(0.5, 0.5)).unwrap();
    assert!((phi[2] - 0.25).abs() <= 5e-3, "{}", phi[2]);
    // Symmetry puts every corner at the same value.
    for v in &phi {
        assert!((v - 0.25).abs() <= 5e-3);
    }
}

#[test]
fn evaluation_at_vertices_and_edge_midpoints() {
    let poly = l_shape();
    let basis = compute_gbc(&poly, 1.0 / 32.0).unwrap();
    let v = poly.vertices();
    let n = v.len();
    for j in 0..n {
        let at_vertex = basis.evaluate(&v[j]).unwrap();
        for (i, x) in at_vertex.iter().enumerate() {
            assert!((x - if i == j { 1.0 } else { 0.0 }).abs() <= 1e-14);
        }
        let mid = Point2::from((v[j].coords + v[(j + 1) % n].coords) / 2.0);
        let at_mid = basis.evaluate(&mid).unwrap();
        for (i, x) in at_mid.iter().enumerate() {
            let want = if i == j || i == (j + 1) % n { 0.5 } else { 0.0 };
            assert!((x - want).abs() <= 1e-12, "phi_{i}({mid}) = {x}");
        }
    }
    assert!(matches!(basis.evaluate(&Point2::new(1.5, 1.5)), Err(GbcError::OutsideDomain { .. })));
}

#[test]
fn hole_basis_properties() {
    let poly = square_with_hole();
    let basis = compute_gbc_with_holes(&poly, 1.0 / 48.0).unwrap();
    assert_eq!(basis.len(), 8);
    let verts = poly.vertices();
    for (node, x) in basis.mesh().nodes().iter().enumerate() {
        let w = basis.node_weights(node);
        let sum: f64 = w.iter().sum();
        assert!((sum - 1.0).abs() <= 1e-8);
        let rep = w.iter().zip(&verts).fold(nalgebra::Vector2::zeros(), |acc, (wi, v)| acc + v.coords * *wi);
        assert!((rep - x.coords).norm() <= 1e-6);
    }
    for lp in &basis.mesh().boundary_loops()[1..] {
        for &node in lp {
            assert_eq!(basis.function(0).values()[node], 0.0);
        }
    }
    assert!(matches!(compute_gbc(&poly, 0.1), Err(GbcError::HolesPresent)));
    assert!(matches!(compute_gbc_with_holes(&unit_square(), 0.1), Err(GbcError::NoHoles)));
}

#[test]
fn interior_values_stay_below_one() {
    let basis = compute_gbc(&j_shape(), 1.0 / 32.0).unwrap();
    for f in basis.functions() {
        let (mut inner, mut outer) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for (i, v) in f.values().iter().enumerate() {
            if basis.mesh().is_boundary(i) {
                outer = outer.max(*v);
            } else {
                inner = inner.max(*v);
            }
        }
        assert_eq!(outer, 1.0);
        assert!(inner < 1.0, "interior maximum {inner}");
    }
}

/// Re-solves every function one at a time in reverse order with a fresh
/// solver and compares bit for bit with the parallel batch.
#[test]
fn parallel_and_sequential_solves_are_bitwise_equal() {
    let poly = h_shape();
    let batch = compute_gbc(&poly, 1.0 / 32.0).unwrap();
    let again = compute_gbc(&poly, 1.0 / 32.0).unwrap();
    let mesh = triangulate(&poly, 1.0 / 32.0).unwrap();
    let sys = assemble_stiffness(&mesh).unwrap();
    let solver = DirichletSolver::new(&sys, LinearSolver::Cholesky).unwrap();
    let n = poly.vertex_count();
    for i in (0..n).rev() {
        let data: Vec<f64> = mesh
            .boundary_tags()
            .iter()
            .map(|t| t.as_ref().map_or(0.0, |t| hat_value(t, 0, i, n)))
            .collect();
        let single = solver.solve_full(&data).unwrap();
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(single.values()), bits(batch.function(i).values()), "function {i}");
        assert_eq!(bits(again.function(i).values()), bits(batch.function(i).values()));
    }
}

#[test]
fn cg_basis_matches_cholesky_basis() {
    let poly = heptagon();
    let a = compute_basis(&poly, 1.0 / 32.0, LinearSolver::Cholesky).unwrap();
    let b = compute_basis(&poly, 1.0 / 32.0, LinearSolver::JacobiCg).unwrap();
    for (fa, fb) in a.functions().iter().zip(b.functions()) {
        for (x, y) in fa.values().iter().zip(fb.values()) {
            assert!((x - y).abs() <= 1e-7);
        }
    }
}

fn check_point_axioms(basis: &GbcBasis, poly: &Polygon, rng: &mut ChaCha8Rng, count: usize) {
    let bb = poly.bounding_box();
    let verts = poly.vertices();
    let mut seen = 0;
    while seen < count {
        let q = Point2::new(
            rng.random_range(bb.min.x..bb.max.x),
            rng.random_range(bb.min.y..bb.max.y),
        );
        if !poly.contains_strict(&q) {
            continue;
        }
        seen += 1;
        let phi = basis.evaluate(&q).unwrap();
        let sum: f64 = phi.iter().sum();
        assert!((sum - 1.0).abs() <= 1e-8);
        assert!(phi.iter().all(|&v| v >= -1e-8));
        let rep = phi.iter().zip(&verts).fold(nalgebra::Vector2::zeros(), |acc, (w, v)| acc + v.coords * *w);
        assert!((rep - q.coords).norm() <= 1e-6 * poly.diameter());
    }
}

#[test]
fn axioms_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for poly in [l_shape(), j_shape(), square_with_hole()] {
        let basis = Arc::new(GbcBasis::from_mesh(&poly, triangulate(&poly, 1.0 / 32.0).unwrap(), LinearSolver::Cholesky).unwrap());
        check_point_axioms(&basis, &poly, &mut rng, 1000);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn axioms_on_random_star_polygons(n in 4usize..9, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<[f64; 2]> = (0..n)
            .map(|k| {
                let a = std::f64::consts::TAU * (k as f64 + rng.random_range(0.0..0.4)) / n as f64;
                let r = rng.random_range(0.35..1.0);
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        let poly = Polygon::new(&pts).unwrap();
        let basis = compute_gbc(&poly, 0.08).unwrap();
        let rep = basis.check_axioms();
        prop_assert!(rep.partition_of_unity <= 1e-8);
        prop_assert!(rep.linear_precision <= 1e-6);
        prop_assert!(rep.min_value >= -1e-8);
        prop_assert!(rep.lagrange_exact && rep.boundary_exact);
        check_point_axioms(&basis, &poly, &mut rng, 200);
    }
}
