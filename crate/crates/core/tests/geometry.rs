mod common;

use harmonic_gbc::geometry::{
    boundary_correspondence, insert_inactive_vertices, signed_area, triangulate, BoundaryCorrespondence,
    BoundaryLocation, GeometryError, Polygon, TriMesh,
};
use nalgebra::Point2;
use proptest::prelude::*;

use common::*;

/// Star-shaped polygon around the origin: strictly increasing angles with
/// gaps below pi and radii in `[0.35, 1]`, so the origin is in its kernel.
fn star_polygon() -> impl Strategy<Value = Vec<[f64; 2]>> {
    (4usize..10).prop_flat_map(|n| {
        (prop::collection::vec(0.0f64..0.4, n), prop::collection::vec(0.35f64..1.0, n)).prop_map(
            move |(jitter, radii)| {
                (0..n)
                    .map(|k| {
                        let a = std::f64::consts::TAU * (k as f64 + jitter[k]) / n as f64;
                        [radii[k] * a.cos(), radii[k] * a.sin()]
                    })
                    .collect()
            },
        )
    })
}

#[test]
fn polygon_examples() {
    let sq = unit_square();
    assert_eq!(sq.area(), 1.0);
    let cw = Polygon::new(&[[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).unwrap();
    let reversed: Vec<_> = [[1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]].iter().map(|p| Point2::new(p[0], p[1])).collect();
    assert_eq!(cw.outer(), reversed.as_slice());
    assert!(signed_area(cw.outer()) > 0.0);
    assert!(matches!(
        Polygon::new(&[[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]),
        Err(GeometryError::SelfIntersection { .. })
    ));
    let tri = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
    assert_eq!(signed_area(&tri), 0.5);
}

#[test]
fn inactive_vertex_examples() {
    let sq = unit_square();
    let five = insert_inactive_vertices(&sq, &[(0, 0.5)]).unwrap();
    assert_eq!(five.vertex_count(), 5);
    assert_eq!(five.area(), 1.0);
    assert_eq!(five.outer()[1], Point2::new(0.5, 0.0));
    let six = insert_inactive_vertices(&sq, &[(0, 2.0 / 3.0), (0, 1.0 / 3.0)]).unwrap();
    assert_eq!(six.vertex_count(), 6);
    assert_eq!(six.area(), 1.0);
    assert!(six.outer()[1].x < six.outer()[2].x);
    assert!(matches!(
        insert_inactive_vertices(&sq, &[(0, 0.0)]),
        Err(GeometryError::ParameterOutOfRange { .. })
    ));
    assert!(insert_inactive_vertices(&sq, &[(4, 0.5)]).is_err());
}

#[test]
fn square_mesh_at_default_size() {
    let mesh = triangulate(&unit_square(), H).unwrap();
    let n = mesh.node_count();
    assert!((2000..=10_000).contains(&n), "{n} nodes");
    assert!((mesh.total_area() - 1.0).abs() <= 1e-10);
    assert!(mesh.max_circumradius() <= 1.5 * H);
    // Halving h roughly quadruples the node count.
    let coarse = triangulate(&unit_square(), 2.0 * H).unwrap().node_count();
    let growth = n as f64 / coarse as f64;
    assert!((3.0..5.0).contains(&growth), "growth {growth}");
}

#[test]
fn mesh_handles_holes_and_nonconvex_shapes() {
    for poly in [square_with_hole(), j_shape(), h_shape(), l_target()] {
        let mesh = triangulate(&poly, 1.0 / 32.0).unwrap();
        assert!((mesh.total_area() - poly.area()).abs() <= 1e-10 * poly.area());
        for (k, &node) in mesh.vertex_nodes().iter().enumerate() {
            assert_eq!(mesh.nodes()[node], poly.vertices()[k]);
        }
        for t in 0..mesh.triangle_count() {
            assert!(mesh.triangle_area(t) > 0.0);
        }
    }
}

#[test]
fn locate_examples() {
    let mesh = triangulate(&unit_square(), 0.25).unwrap();
    let loc = mesh.locate(&Point2::new(0.5, 0.5)).unwrap();
    assert!((loc.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    assert!(mesh.locate(&Point2::new(2.0, 2.0)).is_none());
    for (i, p) in mesh.nodes().iter().enumerate() {
        let loc = mesh.locate(p).unwrap();
        let tri = mesh.triangles()[loc.triangle];
        let k = tri.iter().position(|&v| v == i).expect("node belongs to its triangle");
        let mut e = [0.0; 3];
        e[k] = 1.0;
        assert_eq!(loc.weights, e);
    }
}

#[test]
fn correspondence_examples() {
    let sq = unit_square();
    let c = boundary_correspondence(&sq, &sq).unwrap();
    assert_eq!(c.targets(), sq.vertices());
    let big = sq.scaled(2.0);
    let c2 = boundary_correspondence(&sq, &big).unwrap();
    let mid = c2.map_boundary(&BoundaryLocation::Edge { loop_index: 0, edge: 0, t: 0.5 });
    assert_eq!(mid, Point2::new(1.0, 0.0));
    let pent = insert_inactive_vertices(&sq, &[(2, 0.5)]).unwrap();
    assert!(matches!(
        boundary_correspondence(&sq, &pent),
        Err(GeometryError::CountMismatch { .. })
    ));
}

#[test]
fn raw_mesh_rejects_clockwise_triangles() {
    let nodes = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
    assert!(TriMesh::from_raw(nodes.clone(), vec![[0, 1, 2]]).is_ok());
    assert!(TriMesh::from_raw(nodes.clone(), vec![[0, 2, 1]]).is_err());
    assert!(TriMesh::from_raw(nodes, vec![[0, 1, 3]]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn validated_loops_are_oriented(pts in star_polygon(), reverse in any::<bool>()) {
        let mut pts = pts;
        if reverse {
            pts.reverse();
        }
        let poly = Polygon::new(&pts).unwrap();
        prop_assert!(signed_area(poly.outer()) > 0.0);
        let hole: Vec<[f64; 2]> = pts.iter().map(|p| [0.1 * p[0], 0.1 * p[1]]).collect();
        let holed = Polygon::with_holes(&pts, &[hole]).unwrap();
        prop_assert!(signed_area(&holed.holes()[0]) < 0.0);
    }

    #[test]
    fn inactive_insertion_preserves_area(
        pts in star_polygon(),
        picks in prop::collection::vec((0usize..100, 0.01f64..0.99), 1..6),
    ) {
        let poly = Polygon::new(&pts).unwrap();
        let n = poly.vertex_count();
        let mut positions: Vec<(usize, f64)> = picks.iter().map(|&(e, t)| (e % n, t)).collect();
        positions.sort_by(|a, b| a.partial_cmp(b).unwrap());
        positions.dedup_by(|a, b| a.0 == b.0 && (a.1 - b.1).abs() < 1e-3);
        let ext = insert_inactive_vertices(&poly, &positions).unwrap();
        prop_assert_eq!(ext.vertex_count(), n + positions.len());
        // Collinear points add nothing to the shoelace sum beyond rounding.
        prop_assert!((ext.area() - poly.area()).abs() <= 1e-14 * poly.area().max(1.0));
        let exact: Vec<[f64; 2]> = ext.outer().iter().map(|p| [p.x, p.y]).collect();
        prop_assert!((shoelace(&exact) - poly.area()).abs() <= 1e-14);
    }

    #[test]
    fn triangulation_covers_polygon(pts in star_polygon()) {
        let poly = Polygon::new(&pts).unwrap();
        let mesh = triangulate(&poly, 0.15).unwrap();
        let sum: f64 = (0..mesh.triangle_count()).map(|t| mesh.triangle_area(t)).sum();
        prop_assert!((sum - poly.area()).abs() <= 1e-10 * poly.area());
        prop_assert_eq!(mesh.vertex_nodes().len(), poly.vertex_count());
    }

    #[test]
    fn locate_reconstructs_query(pts in star_polygon(), u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let poly = Polygon::new(&pts).unwrap();
        let mesh = triangulate(&poly, 0.2).unwrap();
        let bb = poly.bounding_box();
        let q = Point2::new(bb.min.x + u * bb.width(), bb.min.y + v * bb.height());
        match mesh.locate(&q) {
            Some(loc) => {
                let tri = mesh.triangle_points(loc.triangle);
                let r = tri[0].coords * loc.weights[0] + tri[1].coords * loc.weights[1] + tri[2].coords * loc.weights[2];
                prop_assert!((r - q.coords).norm() <= 1e-12);
            }
            None => prop_assert!(!poly.contains_strict(&q)),
        }
    }

    #[test]
    fn correspondence_is_monotone_along_edges(pts in star_polygon(), offset in 0usize..10, t in 0.0f64..1.0, dt in 0.0f64..0.5) {
        let src = Polygon::new(&pts).unwrap();
        let n = src.vertex_count();
        let tgt = src.scaled(1.7);
        let c = BoundaryCorrespondence::with_offset(&src, &tgt, offset % n).unwrap();
        for k in 0..n {
            prop_assert_eq!(c.targets()[k], tgt.outer()[(k + offset) % n]);
            let (a, b) = tgt.edge(0, (k + offset) % n);
            let p = c.map_boundary(&BoundaryLocation::Edge { loop_index: 0, edge: k, t });
            let q = c.map_boundary(&BoundaryLocation::Edge { loop_index: 0, edge: k, t: (t + dt).min(1.0) });
            prop_assert!((p - a).norm() <= (q - a).norm() + 1e-12);
            prop_assert!(((p - a).norm() + (b - p).norm() - (b - a).norm()).abs() <= 1e-12);
        }
    }
}
