use nalgebra::Point2;

/// Twice the signed area of triangle `(a, b, c)`; positive for a left turn.
#[inline]
pub fn orient2d(a: &Point2<f64>, b: &Point2<f64>, c: &Point2<f64>) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(a: &Point2<f64>, b: &Point2<f64>, p: &Point2<f64>, tol: f64) -> bool {
    p.x >= a.x.min(b.x) - tol
        && p.x <= a.x.max(b.x) + tol
        && p.y >= a.y.min(b.y) - tol
        && p.y <= a.y.max(b.y) + tol
}

fn side(a: &Point2<f64>, b: &Point2<f64>, p: &Point2<f64>, tol: f64) -> i8 {
    let len = (b - a).norm();
    let d = orient2d(a, b, p);
    if d.abs() <= tol * len {
        0
    } else if d > 0.0 {
        1
    } else {
        -1
    }
}

/// Closed segment intersection test; touching within `tol` counts.
pub fn segments_intersect(
    a0: &Point2<f64>,
    a1: &Point2<f64>,
    b0: &Point2<f64>,
    b1: &Point2<f64>,
    tol: f64,
) -> bool {
    let d1 = side(a0, a1, b0, tol);
    let d2 = side(a0, a1, b1, tol);
    let d3 = side(b0, b1, a0, tol);
    let d4 = side(b0, b1, a1, tol);
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    (d1 == 0 && on_segment(a0, a1, b0, tol))
        || (d2 == 0 && on_segment(a0, a1, b1, tol))
        || (d3 == 0 && on_segment(b0, b1, a0, tol))
        || (d4 == 0 && on_segment(b0, b1, a1, tol))
}

/// Penetration depth of two triangles by the separating axis test.
///
/// Returns the smallest overlap of the projections over the six edge normals
/// (unit length); a value `<= 0` means the triangles are separated or only touch.
pub fn triangle_penetration(t: &[Point2<f64>; 3], u: &[Point2<f64>; 3]) -> f64 {
    let mut depth = f64::INFINITY;
    for tri in [t, u] {
        for k in 0..3 {
            let e = tri[(k + 1) % 3] - tri[k];
            let len = e.norm();
            if len == 0.0 {
                continue;
            }
            let n = nalgebra::Vector2::new(-e.y / len, e.x / len);
            let (a_min, a_max) = project(t, &n);
            let (b_min, b_max) = project(u, &n);
            let overlap = a_max.min(b_max) - a_min.max(b_min);
            depth = depth.min(overlap);
            if depth <= 0.0 {
                return depth;
            }
        }
    }
    depth
}

fn project(tri: &[Point2<f64>; 3], n: &nalgebra::Vector2<f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in tri {
        let d = p.coords.dot(n);
        lo = lo.min(d);
        hi = hi.max(d);
    }
    (lo, hi)
}
