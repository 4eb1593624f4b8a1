#![allow(dead_code)]

use harmonic_gbc::Polygon;

pub const H: f64 = 1.0 / 64.0;

pub fn unit_square() -> Polygon {
    Polygon::new(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
}

/// Unit square with `n - 4` collinear vertices, spread round-robin over the edges.
pub fn square_with(n: usize) -> Polygon {
    let corners = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let mut per_edge = [0usize; 4];
    for k in 0..n - 4 {
        per_edge[k % 4] += 1;
    }
    let mut pts = Vec::new();
    for e in 0..4 {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        pts.push(a);
        for i in 1..=per_edge[e] {
            let t = i as f64 / (per_edge[e] + 1) as f64;
            pts.push([a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t]);
        }
    }
    Polygon::new(&pts).unwrap()
}

pub fn triangle() -> Polygon {
    Polygon::new(&[[0.0, 0.0], [2.0, 0.3], [0.7, 1.6]]).unwrap()
}

pub fn l_shape() -> Polygon {
    Polygon::new(&[[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]]).unwrap()
}

/// Convex heptagon with alternating radii.
pub fn heptagon() -> Polygon {
    let pts: Vec<[f64; 2]> = (0..7)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / 7.0;
            let r = if k % 2 == 0 { 1.0 } else { 0.8 };
            [r * a.cos(), r * a.sin()]
        })
        .collect();
    Polygon::new(&pts).unwrap()
}

pub fn j_shape() -> Polygon {
    Polygon::new(&[
        [0.0, 0.0],
        [3.0, 0.0],
        [3.0, 4.0],
        [2.0, 4.0],
        [2.0, 1.0],
        [1.0, 1.0],
        [1.0, 2.0],
        [0.0, 2.0],
    ])
    .unwrap()
}

/// L-shaped target for the J-shape, with two collinear vertices on its base.
pub fn l_target() -> Polygon {
    Polygon::new(&[
        [0.0, 0.0],
        [1.0, 0.0],
        [2.0, 0.0],
        [3.0, 0.0],
        [3.0, 4.0],
        [2.0, 4.0],
        [2.0, 1.0],
        [0.0, 1.0],
    ])
    .unwrap()
}

pub fn h_shape() -> Polygon {
    Polygon::new(&[
        [0.0, 0.0],
        [1.0, 0.0],
        [1.0, 1.0],
        [2.0, 1.0],
        [2.0, 0.0],
        [3.0, 0.0],
        [3.0, 3.0],
        [2.0, 3.0],
        [2.0, 2.0],
        [1.0, 2.0],
        [1.0, 3.0],
        [0.0, 3.0],
    ])
    .unwrap()
}

pub fn square_with_hole() -> Polygon {
    Polygon::with_holes(
        &[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        &[vec![[0.35, 0.35], [0.65, 0.35], [0.65, 0.65], [0.35, 0.65]]],
    )
    .unwrap()
}

/// Barycentric coordinates by Cramer's rule.
pub fn barycentric_oracle(t: &[[f64; 2]; 3], p: [f64; 2]) -> [f64; 3] {
    let [a, b, c] = *t;
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    let l1 = ((p[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (p[1] - a[1])) / det;
    let l2 = ((b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])) / det;
    [1.0 - l1 - l2, l1, l2]
}

/// Shoelace area of a closed loop given as coordinate pairs.
pub fn shoelace(points: &[[f64; 2]]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| {
            let (p, q) = (points[i], points[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
        / 2.0
}
