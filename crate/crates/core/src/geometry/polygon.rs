use nalgebra::{Point2, Vector2};
use serde::{Deserialize, Serialize};

use super::predicates::{orient2d, segments_intersect};
use super::GeometryError;

/// Relative tolerance for geometric predicates. Coordinates are compared after
/// scaling by the bounding box of the polygon, so this acts on an O(1) range.
pub const GEOMETRY_TOLERANCE: f64 = 1e-12;

/// A simple polygon, optionally with holes.
///
/// After validation the outer loop is counter-clockwise and every hole loop is
/// clockwise, so the domain always lies to the left of each directed edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    outer: Vec<Point2<f64>>,
    holes: Vec<Vec<Point2<f64>>>,
}

/// On-disk representation: `{"outer": [[x,y],...], "holes": [[[x,y],...],...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolygonJson {
    pub outer: Vec<[f64; 2]>,
    #[serde(default)]
    pub holes: Vec<Vec<[f64; 2]>>,
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min: Point2<f64>,
    pub max: Point2<f64>,
}

impl BoundingBox {
    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Point2<f64>>) -> Option<Self> {
        let mut iter = points.into_iter();
        let first = *iter.next()?;
        let mut bb = BoundingBox {
            min: first,
            max: first,
        };
        for p in iter {
            bb.min.x = bb.min.x.min(p.x);
            bb.min.y = bb.min.y.min(p.y);
            bb.max.x = bb.max.x.max(p.x);
            bb.max.y = bb.max.y.max(p.y);
        }
        Some(bb)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    /// Length of the longer side.
    pub fn extent(&self) -> f64 {
        self.width().max(self.height())
    }

    pub fn diagonal(&self) -> f64 {
        (self.max - self.min).norm()
    }

    pub fn contains(&self, p: &Point2<f64>, tol: f64) -> bool {
        p.x >= self.min.x - tol
            && p.x <= self.max.x + tol
            && p.y >= self.min.y - tol
            && p.y <= self.max.y + tol
    }
}

/// Shoelace area of a closed loop; positive iff counter-clockwise.
pub fn signed_area(points: &[Point2<f64>]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    // Translate to the first vertex to limit cancellation.
    let o = points[0];
    let mut twice = 0.0;
    for i in 1..points.len() - 1 {
        let a = points[i] - o;
        let b = points[i + 1] - o;
        twice += a.x * b.y - a.y * b.x;
    }
    0.5 * twice
}

fn to_points(raw: &[[f64; 2]]) -> Vec<Point2<f64>> {
    raw.iter().map(|p| Point2::new(p[0], p[1])).collect()
}

/// Validates raw loops and returns a [`Polygon`] with normalized orientation.
pub fn validate_polygon(
    points: &[Point2<f64>],
    holes: &[Vec<Point2<f64>>],
) -> Result<Polygon, GeometryError> {
    let all = points.iter().chain(holes.iter().flatten());
    let bb = BoundingBox::from_points(all).ok_or(GeometryError::TooFewVertices { loop_index: 0 })?;
    let scale = bb.extent();
    if !(scale.is_finite()) || scale <= 0.0 {
        return Err(GeometryError::ZeroArea { loop_index: 0 });
    }
    let tol = GEOMETRY_TOLERANCE * scale;

    let mut loops: Vec<Vec<Point2<f64>>> = Vec::with_capacity(holes.len() + 1);
    loops.push(points.to_vec());
    loops.extend(holes.iter().cloned());

    for (li, lp) in loops.iter_mut().enumerate() {
        if lp.len() < 3 {
            return Err(GeometryError::TooFewVertices { loop_index: li });
        }
        if lp.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(GeometryError::NonFinite { loop_index: li });
        }
        let n = lp.len();
        for i in 0..n {
            if (lp[(i + 1) % n] - lp[i]).norm() <= tol {
                return Err(GeometryError::DuplicateVertex {
                    loop_index: li,
                    vertex: (i + 1) % n,
                });
            }
        }
        let area = signed_area(lp);
        if area.abs() <= tol * scale {
            // A figure-eight also has zero net area; report the crossing instead.
            let collinear = lp
                .iter()
                .all(|p| orient2d(&lp[0], &lp[1], p).abs() <= tol * scale);
            if !collinear {
                check_loop_simple(lp, li, tol)?;
            }
            return Err(GeometryError::ZeroArea { loop_index: li });
        }
        check_loop_simple(lp, li, tol)?;
        let want_ccw = li == 0;
        if (area > 0.0) != want_ccw {
            lp.reverse();
        }
    }

    let outer = &loops[0];
    for hi in 1..loops.len() {
        for p in &loops[hi] {
            if boundary_distance_loop(outer, p) <= tol || !point_in_loop(outer, p) {
                return Err(GeometryError::HoleOutsideOuter { hole: hi - 1 });
            }
        }
        for (a0, a1) in loop_edges(&loops[hi]) {
            for (b0, b1) in loop_edges(outer) {
                if segments_intersect(&a0, &a1, &b0, &b1, tol) {
                    return Err(GeometryError::HoleOutsideOuter { hole: hi - 1 });
                }
            }
        }
        for hj in 1..hi {
            for (a0, a1) in loop_edges(&loops[hi]) {
                for (b0, b1) in loop_edges(&loops[hj]) {
                    if segments_intersect(&a0, &a1, &b0, &b1, tol) {
                        return Err(GeometryError::SelfIntersection {
                            loop_index: hi,
                            edges: (0, 0),
                        });
                    }
                }
            }
            // Nested holes: one hole fully inside the other.
            if point_in_loop(&loops[hj], &loops[hi][0]) || point_in_loop(&loops[hi], &loops[hj][0]) {
                return Err(GeometryError::SelfIntersection {
                    loop_index: hi,
                    edges: (0, 0),
                });
            }
        }
    }

    let mut it = loops.into_iter();
    let outer = it.next().expect("outer loop present");
    Ok(Polygon {
        outer,
        holes: it.collect(),
    })
}

fn check_loop_simple(lp: &[Point2<f64>], li: usize, tol: f64) -> Result<(), GeometryError> {
    let n = lp.len();
    for i in 0..n {
        let a0 = lp[i];
        let a1 = lp[(i + 1) % n];
        for j in (i + 1)..n {
            let b0 = lp[j];
            let b1 = lp[(j + 1) % n];
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Shared vertex; only a fold-back along the same line is invalid.
                let (shared, p, q) = if j == i + 1 { (a1, a0, b1) } else { (a0, a1, b0) };
                let u = p - shared;
                let v = q - shared;
                let cross = u.x * v.y - u.y * v.x;
                if cross.abs() <= tol * (u.norm() + v.norm()) && u.dot(&v) > 0.0 {
                    return Err(GeometryError::SelfIntersection {
                        loop_index: li,
                        edges: (i, j),
                    });
                }
            } else if segments_intersect(&a0, &a1, &b0, &b1, tol) {
                return Err(GeometryError::SelfIntersection {
                    loop_index: li,
                    edges: (i, j),
                });
            }
        }
    }
    Ok(())
}

pub(crate) fn loop_edges(lp: &[Point2<f64>]) -> impl Iterator<Item = (Point2<f64>, Point2<f64>)> + '_ {
    let n = lp.len();
    (0..n).map(move |i| (lp[i], lp[(i + 1) % n]))
}

/// Even-odd point in loop test.
pub fn point_in_loop(lp: &[Point2<f64>], p: &Point2<f64>) -> bool {
    let n = lp.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let a = lp[i];
        let b = lp[j];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

pub(crate) fn point_segment_distance(p: &Point2<f64>, a: &Point2<f64>, b: &Point2<f64>) -> (f64, f64) {
    let d = b - a;
    let len2 = d.norm_squared();
    let t = if len2 > 0.0 {
        ((p - a).dot(&d) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    ((a + d * t - p).norm(), t)
}

fn boundary_distance_loop(lp: &[Point2<f64>], p: &Point2<f64>) -> f64 {
    loop_edges(lp)
        .map(|(a, b)| point_segment_distance(p, &a, &b).0)
        .fold(f64::INFINITY, f64::min)
}

impl Polygon {
    /// Builds and validates a polygon from its JSON form.
    pub fn from_json(json: &PolygonJson) -> Result<Self, GeometryError> {
        let holes: Vec<_> = json.holes.iter().map(|h| to_points(h)).collect();
        validate_polygon(&to_points(&json.outer), &holes)
    }

    pub fn from_json_str(s: &str) -> Result<Self, GeometryError> {
        let json: PolygonJson =
            serde_json::from_str(s).map_err(|e| GeometryError::Parse(e.to_string()))?;
        Self::from_json(&json)
    }

    pub fn to_json(&self) -> PolygonJson {
        let conv = |lp: &[Point2<f64>]| lp.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>();
        PolygonJson {
            outer: conv(&self.outer),
            holes: self.holes.iter().map(|h| conv(h)).collect(),
        }
    }

    /// Convenience constructor for a hole-free polygon.
    pub fn new(points: &[[f64; 2]]) -> Result<Self, GeometryError> {
        validate_polygon(&to_points(points), &[])
    }

    pub fn with_holes(points: &[[f64; 2]], holes: &[Vec<[f64; 2]>]) -> Result<Self, GeometryError> {
        let holes: Vec<_> = holes.iter().map(|h| to_points(h)).collect();
        validate_polygon(&to_points(points), &holes)
    }

    pub fn outer(&self) -> &[Point2<f64>] {
        &self.outer
    }

    pub fn holes(&self) -> &[Vec<Point2<f64>>] {
        &self.holes
    }

    pub fn has_holes(&self) -> bool {
        !self.holes.is_empty()
    }

    pub fn loop_count(&self) -> usize {
        1 + self.holes.len()
    }

    /// Loop by index: 0 is the outer loop, `1 + k` is hole `k`.
    pub fn loop_points(&self, index: usize) -> &[Point2<f64>] {
        if index == 0 {
            &self.outer
        } else {
            &self.holes[index - 1]
        }
    }

    pub fn loops(&self) -> impl Iterator<Item = &[Point2<f64>]> {
        std::iter::once(self.outer.as_slice()).chain(self.holes.iter().map(|h| h.as_slice()))
    }

    /// Total vertex count over all loops.
    pub fn vertex_count(&self) -> usize {
        self.loops().map(|l| l.len()).sum()
    }

    /// Offset of each loop's first vertex in the global vertex numbering
    /// (outer vertices first, then each hole in stored order).
    pub fn loop_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.loop_count());
        let mut acc = 0;
        for l in self.loops() {
            offsets.push(acc);
            acc += l.len();
        }
        offsets
    }

    /// All vertices in global order.
    pub fn vertices(&self) -> Vec<Point2<f64>> {
        self.loops().flat_map(|l| l.iter().copied()).collect()
    }

    /// Resolves a global vertex or edge index into `(loop, local index)`.
    pub fn resolve_index(&self, global: usize) -> Option<(usize, usize)> {
        let mut acc = 0;
        for (li, l) in self.loops().enumerate() {
            if global < acc + l.len() {
                return Some((li, global - acc));
            }
            acc += l.len();
        }
        None
    }

    /// Edge `k` of loop `li` runs from vertex `k` to vertex `k + 1` (cyclic).
    pub fn edge(&self, li: usize, k: usize) -> (Point2<f64>, Point2<f64>) {
        let lp = self.loop_points(li);
        (lp[k], lp[(k + 1) % lp.len()])
    }

    /// Area of the domain (outer minus holes).
    pub fn area(&self) -> f64 {
        self.loops().map(signed_area).sum()
    }

    pub fn bounding_box(&self) -> BoundingBox {
        BoundingBox::from_points(self.outer.iter()).expect("polygon has vertices")
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in &self.outer {
            for b in &self.outer {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    /// Absolute tolerance for predicates on this polygon's coordinates.
    pub fn tolerance(&self) -> f64 {
        GEOMETRY_TOLERANCE * self.bounding_box().extent()
    }

    /// True if `p` is in the closed domain.
    pub fn contains(&self, p: &Point2<f64>) -> bool {
        self.boundary_distance(p) <= self.tolerance() || self.contains_strict(p)
    }

    /// Even-odd containment, without boundary tolerance.
    pub fn contains_strict(&self, p: &Point2<f64>) -> bool {
        self.loops().filter(|l| point_in_loop(l, p)).count() % 2 == 1
    }

    /// Distance from `p` to the nearest boundary edge.
    pub fn boundary_distance(&self, p: &Point2<f64>) -> f64 {
        self.loops()
            .map(|l| boundary_distance_loop(l, p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Indices (in global numbering) of vertices whose interior angle exceeds pi.
    pub fn reflex_vertices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut offset = 0;
        for lp in self.loops() {
            let n = lp.len();
            for i in 0..n {
                let prev = lp[(i + n - 1) % n];
                let next = lp[(i + 1) % n];
                let turn = orient2d(&prev, &lp[i], &next);
                let scale = (lp[i] - prev).norm() * (next - lp[i]).norm();
                // Domain lies to the left of every edge, so a right turn is reflex.
                if turn < -GEOMETRY_TOLERANCE * scale {
                    out.push(offset + i);
                }
            }
            offset += n;
        }
        out
    }

    /// True when the outer loop is convex and there are no holes.
    pub fn is_convex(&self) -> bool {
        !self.has_holes() && self.reflex_vertices().is_empty()
    }

    /// Returns a new polygon with every coordinate scaled by `factor` about the origin.
    pub fn scaled(&self, factor: f64) -> Polygon {
        let f = |l: &[Point2<f64>]| l.iter().map(|p| Point2::from(p.coords * factor)).collect();
        Polygon {
            outer: f(&self.outer),
            holes: self.holes.iter().map(|h| f(h)).collect(),
        }
    }

    /// Returns the polygon translated by `offset`.
    pub fn translated(&self, offset: Vector2<f64>) -> Polygon {
        let f = |l: &[Point2<f64>]| l.iter().map(|p| p + offset).collect();
        Polygon {
            outer: f(&self.outer),
            holes: self.holes.iter().map(|h| f(h)).collect(),
        }
    }
}

/// Inserts collinear ("inactive") vertices on polygon edges.
///
/// `positions` holds `(edge, t)` pairs where `edge` uses the global edge
/// numbering (outer edges first, then holes) and `t` is the arclength fraction
/// along the edge, strictly inside `(0, 1)`.
pub fn insert_inactive_vertices(
    polygon: &Polygon,
    positions: &[(usize, f64)],
) -> Result<Polygon, GeometryError> {
    let mut per_edge: Vec<Vec<f64>> = vec![Vec::new(); polygon.vertex_count()];
    for &(edge, t) in positions {
        if edge >= per_edge.len() || !(t > 0.0 && t < 1.0) {
            return Err(GeometryError::ParameterOutOfRange { edge, t });
        }
        per_edge[edge].push(t);
    }
    for (edge, ts) in per_edge.iter_mut().enumerate() {
        ts.sort_by(|a, b| a.total_cmp(b));
        if let Some(w) = ts.windows(2).find(|w| w[0] == w[1]) {
            return Err(GeometryError::ParameterOutOfRange { edge, t: w[0] });
        }
    }

    let mut loops = Vec::with_capacity(polygon.loop_count());
    let mut offset = 0;
    for lp in polygon.loops() {
        let n = lp.len();
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let a = lp[k];
            let b = lp[(k + 1) % n];
            out.push(a);
            for &t in &per_edge[offset + k] {
                out.push(a + (b - a) * t);
            }
        }
        offset += n;
        loops.push(out);
    }
    let mut it = loops.into_iter();
    Ok(Polygon {
        outer: it.next().expect("outer loop present"),
        holes: it.collect(),
    })
}
