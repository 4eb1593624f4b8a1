//! Conforming triangulation of a polygon with boundary bookkeeping.
//!
//! Meshing runs on a copy of the polygon rescaled to a unit bounding box:
//! boundary edges are subdivided to the local target size, an equilateral
//! lattice seeds the interior, and a constrained Delaunay refinement enforces
//! the minimum angle and the area bound. Near reflex vertices the target size
//! drops by a factor of four.

use std::collections::{HashMap, VecDeque};

use nalgebra::{Point2, Vector2};
use serde::Serialize;
use spade::handles::FixedVertexHandle;
use spade::{
    AngleLimit, ConstrainedDelaunayTriangulation, Point2 as SPoint, RefinementParameters,
    Triangulation,
};

use super::locate::{Location, TriangleGrid};
use super::polygon::{loop_edges, point_in_loop, point_segment_distance, signed_area, Polygon};
use super::predicates::orient2d;
use super::GeometryError;

/// Minimum interior angle requested from the Delaunay refinement.
pub const MIN_ANGLE_DEG: f64 = 25.0;
/// Mesh size reduction near reflex vertices.
pub const REFLEX_REFINEMENT: f64 = 4.0;

/// Where a boundary node sits on the polygon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BoundaryLocation {
    /// Exactly on vertex `vertex` of loop `loop_index`.
    Vertex { loop_index: usize, vertex: usize },
    /// Strictly inside edge `edge` of loop `loop_index`, at arclength fraction `t`.
    Edge { loop_index: usize, edge: usize, t: f64 },
}

impl BoundaryLocation {
    pub fn loop_index(&self) -> usize {
        match *self {
            BoundaryLocation::Vertex { loop_index, .. } | BoundaryLocation::Edge { loop_index, .. } => {
                loop_index
            }
        }
    }

    /// Sort key `(edge, t)` along the loop; a vertex is the start of its edge.
    pub fn loop_position(&self) -> (usize, f64) {
        match *self {
            BoundaryLocation::Vertex { vertex, .. } => (vertex, 0.0),
            BoundaryLocation::Edge { edge, t, .. } => (edge, t),
        }
    }
}

/// A conforming triangulation of a polygon.
#[derive(Debug, Clone)]
pub struct TriMesh {
    nodes: Vec<Point2<f64>>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<Option<BoundaryLocation>>,
    boundary_loops: Vec<Vec<usize>>,
    vertex_nodes: Vec<usize>,
    mesh_size: f64,
    length_scale: f64,
    locator: TriangleGrid,
}

impl TriMesh {
    pub fn nodes(&self) -> &[Point2<f64>] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    /// Boundary tag per node, `None` for interior nodes.
    pub fn boundary_tags(&self) -> &[Option<BoundaryLocation>] {
        &self.boundary
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.boundary[node].is_some()
    }

    /// Boundary nodes of each loop in traversal order (cyclic, no repetition).
    pub fn boundary_loops(&self) -> &[Vec<usize>] {
        &self.boundary_loops
    }

    /// Mesh node of each polygon vertex, in global vertex order.
    pub fn vertex_nodes(&self) -> &[usize] {
        &self.vertex_nodes
    }

    /// Target edge length relative to the unit-normalized bounding box.
    pub fn mesh_size(&self) -> f64 {
        self.mesh_size
    }

    /// Target edge length in polygon units.
    pub fn mesh_size_absolute(&self) -> f64 {
        self.mesh_size * self.length_scale
    }

    pub fn triangle_points(&self, t: usize) -> [Point2<f64>; 3] {
        let [a, b, c] = self.triangles[t];
        [self.nodes[a], self.nodes[b], self.nodes[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        0.5 * orient2d(&a, &b, &c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Largest circumradius over all triangles.
    pub fn max_circumradius(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| {
                let [a, b, c] = self.triangle_points(t);
                let (la, lb, lc) = ((b - c).norm(), (c - a).norm(), (a - b).norm());
                la * lb * lc / (4.0 * self.triangle_area(t))
            })
            .fold(0.0, f64::max)
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_deg(&self) -> f64 {
        let mut best = f64::INFINITY;
        for t in 0..self.triangles.len() {
            let p = self.triangle_points(t);
            for i in 0..3 {
                let u = p[(i + 1) % 3] - p[i];
                let v = p[(i + 2) % 3] - p[i];
                let ang = (u.dot(&v) / (u.norm() * v.norm())).clamp(-1.0, 1.0).acos();
                best = best.min(ang.to_degrees());
            }
        }
        best
    }

    /// Locates `q`; ties on shared edges go to the lowest triangle index.
    pub fn locate(&self, q: &Point2<f64>) -> Option<Location> {
        self.locator.locate(&self.nodes, &self.triangles, q)
    }

    pub fn locator(&self) -> &TriangleGrid {
        &self.locator
    }

    /// Debug dump: `{"nodes": [[x,y],...], "triangles": [[i,j,k],...]}`.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "nodes": self.nodes.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>(),
            "triangles": self.triangles,
        })
    }

    /// Builds a mesh from raw parts. Used by analytic adapters and for
    /// reloading dumps; boundary tags are left empty.
    pub fn from_raw(nodes: Vec<Point2<f64>>, triangles: Vec<[usize; 3]>) -> Result<Self, GeometryError> {
        for (i, t) in triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= nodes.len()) {
                return Err(GeometryError::MeshingFailure(format!("triangle {i} references a missing node")));
            }
            if orient2d(&nodes[t[0]], &nodes[t[1]], &nodes[t[2]]) <= 0.0 {
                return Err(GeometryError::MeshingFailure(format!("triangle {i} is not counter-clockwise")));
            }
        }
        let locator = TriangleGrid::new(&nodes, &triangles);
        let n = nodes.len();
        Ok(TriMesh {
            nodes,
            triangles,
            boundary: vec![None; n],
            boundary_loops: Vec::new(),
            vertex_nodes: Vec::new(),
            mesh_size: 0.0,
            length_scale: 1.0,
            locator,
        })
    }

    /// Structured mesh of an axis-aligned rectangle split into `nx * ny`
    /// cells, each cut along its rising diagonal.
    pub fn rectangle(min: Point2<f64>, max: Point2<f64>, nx: usize, ny: usize) -> Self {
        let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                nodes.push(Point2::new(
                    min.x + (max.x - min.x) * i as f64 / nx as f64,
                    min.y + (max.y - min.y) * j as f64 / ny as f64,
                ));
            }
        }
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut triangles = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        let mut mesh = Self::from_raw(nodes, triangles).expect("structured rectangle mesh is valid");
        let mut ring = Vec::new();
        ring.extend((0..nx).map(|i| id(i, 0)));
        ring.extend((0..ny).map(|j| id(nx, j)));
        ring.extend((1..=nx).rev().map(|i| id(i, ny)));
        ring.extend((1..=ny).rev().map(|j| id(0, j)));
        mesh.boundary_loops = vec![ring];
        mesh
    }
}

/// Piecewise target size: `h / 4` within `h` of a reflex vertex, growing
/// linearly back to `h` at distance `2h`.
struct Sizing {
    h: f64,
    reflex: Vec<Point2<f64>>,
}

impl Sizing {
    fn reflex_distance(&self, p: &Point2<f64>) -> f64 {
        self.reflex.iter().map(|r| (r - p).norm()).fold(f64::INFINITY, f64::min)
    }

    fn at(&self, p: &Point2<f64>) -> f64 {
        let fine = self.h / REFLEX_REFINEMENT;
        let d = self.reflex_distance(p);
        if d <= self.h {
            fine
        } else if d >= 2.0 * self.h {
            self.h
        } else {
            fine + (self.h - fine) * (d - self.h) / self.h
        }
    }
}

/// Edge parameters `0 = t_0 < t_1 < ... < t_m = 1` equidistributing `1 / size`.
fn edge_parameters(a: &Point2<f64>, b: &Point2<f64>, sizing: &Sizing) -> Vec<f64> {
    let len = (b - a).norm();
    let samples = ((len / (sizing.h / REFLEX_REFINEMENT)) * 16.0).ceil().max(64.0) as usize;
    let mut cumulative = Vec::with_capacity(samples + 1);
    cumulative.push(0.0);
    let mut acc = 0.0;
    for k in 0..samples {
        let tm = (k as f64 + 0.5) / samples as f64;
        acc += len / samples as f64 / sizing.at(&(a + (b - a) * tm));
        cumulative.push(acc);
    }
    let segments = (acc - 1e-9).ceil().max(1.0) as usize;
    let mut ts = Vec::with_capacity(segments + 1);
    ts.push(0.0);
    let mut k = 0;
    for s in 1..segments {
        let target = acc * s as f64 / segments as f64;
        while cumulative[k + 1] < target {
            k += 1;
        }
        let frac = (target - cumulative[k]) / (cumulative[k + 1] - cumulative[k]);
        ts.push((k as f64 + frac) / samples as f64);
    }
    ts.push(1.0);
    ts
}

type Cdt = ConstrainedDelaunayTriangulation<SPoint<f64>>;

/// Triangulates `polygon` with target edge length `h` (relative to the
/// polygon's bounding box, whose longer side is rescaled to 1).
pub fn triangulate(polygon: &Polygon, h: f64) -> Result<TriMesh, GeometryError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(GeometryError::InvalidMeshSize(h));
    }
    let bb = polygon.bounding_box();
    let scale = bb.extent();
    let origin = bb.min;
    let to_unit = |p: &Point2<f64>| Point2::from((p - origin) / scale);
    let unit_loops: Vec<Vec<Point2<f64>>> = polygon.loops().map(|l| l.iter().map(to_unit).collect()).collect();

    let reflex: Vec<Point2<f64>> = polygon
        .reflex_vertices()
        .into_iter()
        .map(|g| {
            let (li, k) = polygon.resolve_index(g).unwrap();
            unit_loops[li][k]
        })
        .collect();
    let sizing = Sizing { h, reflex };

    let mut cdt = Cdt::new();
    let mut known: HashMap<usize, BoundaryLocation> = HashMap::new();
    let insert = |cdt: &mut Cdt, p: &Point2<f64>| -> Result<FixedVertexHandle, GeometryError> {
        cdt.insert(SPoint::new(p.x, p.y))
            .map_err(|e| GeometryError::MeshingFailure(format!("insertion at ({}, {}) failed: {e:?}", p.x, p.y)))
    };

    // Boundary vertices and subdivision points, chained by constraint edges.
    for (li, lp) in unit_loops.iter().enumerate() {
        let n = lp.len();
        let mut chain = Vec::new();
        for k in 0..n {
            let (a, b) = (lp[k], lp[(k + 1) % n]);
            let ts = edge_parameters(&a, &b, &sizing);
            let hv = insert(&mut cdt, &a)?;
            known.insert(hv.index(), BoundaryLocation::Vertex { loop_index: li, vertex: k });
            chain.push(hv);
            for &t in &ts[1..ts.len() - 1] {
                let hp = insert(&mut cdt, &(a + (b - a) * t))?;
                known.insert(hp.index(), BoundaryLocation::Edge { loop_index: li, edge: k, t });
                chain.push(hp);
            }
        }
        for i in 0..chain.len() {
            let (from, to) = (chain[i], chain[(i + 1) % chain.len()]);
            if !cdt.can_add_constraint(from, to) {
                return Err(GeometryError::MeshingFailure(format!(
                    "boundary segment of loop {li} crosses another constraint"
                )));
            }
            cdt.add_constraint(from, to);
        }
    }

    // Interior lattice seeds.
    let inside = |p: &Point2<f64>| unit_loops.iter().filter(|l| point_in_loop(l, p)).count() % 2 == 1;
    let boundary_distance = |p: &Point2<f64>| {
        unit_loops
            .iter()
            .flat_map(|l| loop_edges(l))
            .map(|(a, b)| point_segment_distance(p, &a, &b).0)
            .fold(f64::INFINITY, f64::min)
    };
    let unit_bb = (
        Point2::new(0.0, 0.0),
        Point2::new(bb.width() / scale, bb.height() / scale),
    );
    let mut seed = |spacing: f64, keep: &dyn Fn(&Point2<f64>) -> bool| -> Result<(), GeometryError> {
        let dy = spacing * 3f64.sqrt() / 2.0;
        let rows = (unit_bb.1.y / dy).ceil() as usize + 1;
        let cols = (unit_bb.1.x / spacing).ceil() as usize + 2;
        for j in 0..rows {
            let y = j as f64 * dy;
            let shift = if j % 2 == 1 { 0.5 * spacing } else { 0.0 };
            for i in 0..cols {
                let p = Point2::new(i as f64 * spacing + shift, y);
                if inside(&p) && boundary_distance(&p) >= 0.5 * spacing && keep(&p) {
                    insert(&mut cdt, &p)?;
                }
            }
        }
        Ok(())
    };
    seed(h, &|p| sizing.reflex_distance(p) >= 2.0 * h)?;
    if !sizing.reflex.is_empty() {
        seed(h / REFLEX_REFINEMENT, &|p| sizing.reflex_distance(p) < h)?;
    }

    let initial = cdt.num_vertices();
    let max_area = 1.5 * 3f64.sqrt() / 4.0 * h * h;
    let params = RefinementParameters::<f64>::new()
        .with_angle_limit(AngleLimit::from_deg(MIN_ANGLE_DEG))
        .with_max_allowed_area(max_area)
        .exclude_outer_faces(true)
        .with_max_additional_vertices(initial * 20 + 10_000);
    let result = cdt.refine(params);
    if !result.refinement_complete {
        return Err(GeometryError::MeshingFailure(
            "Delaunay refinement ran out of Steiner points".into(),
        ));
    }

    let on_boundary = boundary_vertex_flags(&cdt);
    let interior = interior_faces(&cdt);
    // Split triangles whose three corners all lie on the boundary; otherwise a
    // corner mapped onto a straight target edge yields a flat image triangle.
    let ears: Vec<Point2<f64>> = cdt
        .inner_faces()
        .filter_map(|f| {
            let vs = f.vertices();
            let pos = f.positions();
            let c = Point2::new(
                (pos[0].x + pos[1].x + pos[2].x) / 3.0,
                (pos[0].y + pos[1].y + pos[2].y) / 3.0,
            );
            (interior[f.fix().index()] && vs.iter().all(|v| on_boundary[v.fix().index()])).then_some(c)
        })
        .collect();
    for c in &ears {
        insert(&mut cdt, c)?;
    }

    let on_boundary = boundary_vertex_flags(&cdt);
    let interior = interior_faces(&cdt);
    let mut node_of: HashMap<usize, usize> = HashMap::new();
    let mut unit_nodes = Vec::new();
    let mut handles = Vec::new();
    let mut triangles = Vec::new();
    for f in cdt.inner_faces() {
        if !interior[f.fix().index()] {
            continue;
        }
        let mut tri = [0usize; 3];
        for (k, v) in f.vertices().iter().enumerate() {
            let idx = v.fix().index();
            let next = node_of.len();
            tri[k] = *node_of.entry(idx).or_insert_with(|| {
                let p = v.position();
                unit_nodes.push(Point2::new(p.x, p.y));
                handles.push(idx);
                next
            });
        }
        triangles.push(tri);
    }

    // Back to polygon units, with boundary nodes placed exactly on their edges.
    let mut nodes = Vec::with_capacity(unit_nodes.len());
    let mut boundary = Vec::with_capacity(unit_nodes.len());
    for (i, up) in unit_nodes.iter().enumerate() {
        let handle = handles[i];
        let tag = if let Some(tag) = known.get(&handle) {
            Some(*tag)
        } else if on_boundary[handle] {
            Some(classify_boundary_point(&unit_loops, up)?)
        } else {
            None
        };
        let p = match tag {
            Some(BoundaryLocation::Vertex { loop_index, vertex }) => polygon.loop_points(loop_index)[vertex],
            Some(BoundaryLocation::Edge { loop_index, edge, t }) => {
                let (a, b) = polygon.edge(loop_index, edge);
                a + (b - a) * t
            }
            None => origin + Vector2::new(up.x, up.y) * scale,
        };
        nodes.push(p);
        boundary.push(tag);
    }

    let offsets = polygon.loop_offsets();
    let mut vertex_nodes = vec![usize::MAX; polygon.vertex_count()];
    let mut boundary_loops: Vec<Vec<usize>> = vec![Vec::new(); polygon.loop_count()];
    for (i, tag) in boundary.iter().enumerate() {
        if let Some(tag) = tag {
            if let BoundaryLocation::Vertex { loop_index, vertex } = tag {
                vertex_nodes[offsets[*loop_index] + vertex] = i;
            }
            boundary_loops[tag.loop_index()].push(i);
        }
    }
    if let Some(missing) = vertex_nodes.iter().position(|&v| v == usize::MAX) {
        return Err(GeometryError::MeshingFailure(format!("polygon vertex {missing} is not a mesh node")));
    }
    for lp in &mut boundary_loops {
        lp.sort_by(|&a, &b| {
            let (ea, ta) = boundary[a].unwrap().loop_position();
            let (eb, tb) = boundary[b].unwrap().loop_position();
            ea.cmp(&eb).then(ta.total_cmp(&tb))
        });
    }

    for (k, t) in triangles.iter().enumerate() {
        if orient2d(&nodes[t[0]], &nodes[t[1]], &nodes[t[2]]) <= 0.0 {
            return Err(GeometryError::MeshingFailure(format!(
                "triangle {k} is not positively oriented: {:?} {:?}",
                t.map(|i| nodes[i]),
                t.map(|i| boundary[i])
            )));
        }
    }
    let locator = TriangleGrid::new(&nodes, &triangles);
    let mesh = TriMesh {
        nodes,
        triangles,
        boundary,
        boundary_loops,
        vertex_nodes,
        mesh_size: h,
        length_scale: scale,
        locator,
    };
    let area = polygon.area();
    if ((mesh.total_area() - area) / area).abs() > 1e-10 {
        return Err(GeometryError::MeshingFailure(format!(
            "mesh area {} does not match polygon area {area}",
            mesh.total_area()
        )));
    }
    Ok(mesh)
}

/// Inside/outside flag per face index, by parity of constraint crossings
/// from the unbounded face.
fn interior_faces(cdt: &Cdt) -> Vec<bool> {
    let mut state: Vec<Option<bool>> = vec![None; cdt.num_all_faces()];
    let mut queue = VecDeque::new();
    for f in cdt.inner_faces() {
        for e in f.adjacent_edges() {
            if e.rev().face().is_outer() && state[f.fix().index()].is_none() {
                state[f.fix().index()] = Some(e.is_constraint_edge());
                queue.push_back(f.fix());
            }
        }
    }
    while let Some(fh) = queue.pop_front() {
        let inside = state[fh.index()].expect("queued faces are classified");
        for e in cdt.face(fh).adjacent_edges() {
            if let Some(g) = e.rev().face().as_inner() {
                let slot = &mut state[g.fix().index()];
                if slot.is_none() {
                    *slot = Some(inside ^ e.is_constraint_edge());
                    queue.push_back(g.fix());
                }
            }
        }
    }
    state.into_iter().map(|s| s.unwrap_or(false)).collect()
}

fn boundary_vertex_flags(cdt: &Cdt) -> Vec<bool> {
    let mut flags = vec![false; cdt.num_vertices()];
    for e in cdt.undirected_edges() {
        if e.is_constraint_edge() {
            for v in e.vertices() {
                flags[v.fix().index()] = true;
            }
        }
    }
    flags
}

fn classify_boundary_point(loops: &[Vec<Point2<f64>>], p: &Point2<f64>) -> Result<BoundaryLocation, GeometryError> {
    let mut best: Option<(f64, usize, usize, f64)> = None;
    for (li, lp) in loops.iter().enumerate() {
        for (k, (a, b)) in loop_edges(lp).enumerate() {
            let (d, t) = point_segment_distance(p, &a, &b);
            if best.is_none_or(|(bd, ..)| d < bd) {
                best = Some((d, li, k, t));
            }
        }
    }
    match best {
        Some((d, li, k, t)) if d < 1e-9 && t > 0.0 && t < 1.0 => Ok(BoundaryLocation::Edge {
            loop_index: li,
            edge: k,
            t,
        }),
        _ => Err(GeometryError::MeshingFailure(format!(
            "Steiner point ({}, {}) is not on a polygon edge",
            p.x, p.y
        ))),
    }
}

/// Signed area of the boundary loop formed by `nodes` in loop order.
pub fn loop_area(nodes: &[Point2<f64>], lp: &[usize]) -> f64 {
    let pts: Vec<_> = lp.iter().map(|&i| nodes[i]).collect();
    signed_area(&pts)
}
