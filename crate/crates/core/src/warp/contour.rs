use std::collections::HashMap;

use nalgebra::Point2;

use crate::geometry::{BoundingBox, TriMesh};

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<Point2<f64>>,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub level: f64,
    pub lines: Vec<Polyline>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Key {
    Node(usize),
    Edge(usize, usize),
}

/// `count` levels evenly spaced strictly between the field's extremes.
pub fn contour_levels(values: &[f64], count: usize) -> Vec<f64> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    (1..=count)
        .map(|k| lo + (hi - lo) * k as f64 / (count + 1) as f64)
        .collect()
}

/// Iso-lines of a nodal field at `level` by marching triangles. A node counts
/// as above the level when its value is `>= level`.
pub fn level_set(mesh: &TriMesh, values: &[f64], level: f64) -> Vec<Polyline> {
    let nodes = mesh.nodes();
    let crossing = |a: usize, b: usize| -> (Key, Point2<f64>) {
        // `a` above, `b` below.
        let (fa, fb) = (values[a], values[b]);
        if fa == level {
            return (Key::Node(a), nodes[a]);
        }
        let t = (level - fa) / (fb - fa);
        (Key::Edge(a.min(b), a.max(b)), nodes[a] + (nodes[b] - nodes[a]) * t)
    };
    let mut segments: Vec<[(Key, Point2<f64>); 2]> = Vec::new();
    for tri in mesh.triangles() {
        let above: Vec<bool> = tri.iter().map(|&v| values[v] >= level).collect();
        let n_above = above.iter().filter(|&&a| a).count();
        if n_above == 0 || n_above == 3 {
            continue;
        }
        // The odd vertex out sits opposite the crossing segment.
        let lone = (0..3).find(|&k| above[k] == (n_above == 1)).unwrap();
        let (o, p, q) = (tri[lone], tri[(lone + 1) % 3], tri[(lone + 2) % 3]);
        let (s0, s1) = if n_above == 1 {
            (crossing(o, p), crossing(o, q))
        } else {
            (crossing(p, o), crossing(q, o))
        };
        if s0.0 != s1.0 {
            segments.push([s0, s1]);
        }
    }
    chain(segments)
}

fn chain(segments: Vec<[(Key, Point2<f64>); 2]>) -> Vec<Polyline> {
    let mut incident: HashMap<Key, Vec<usize>> = HashMap::new();
    for (i, s) in segments.iter().enumerate() {
        for end in s {
            incident.entry(end.0).or_default().push(i);
        }
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();
    let walk = |start: usize, from: Key, used: &mut Vec<bool>| -> (Vec<Point2<f64>>, bool) {
        let mut pts = Vec::new();
        let mut seg = start;
        let mut key = from;
        loop {
            used[seg] = true;
            let [a, b] = segments[seg];
            let (here, next) = if a.0 == key { (a, b) } else { (b, a) };
            if pts.is_empty() {
                pts.push(here.1);
            }
            pts.push(next.1);
            key = next.0;
            match incident[&key].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => break,
            }
        }
        let closed = key == from && pts.len() > 2;
        if closed {
            pts.pop();
        }
        (pts, closed)
    };
    // Open chains start at keys with a single incident segment.
    for i in 0..segments.len() {
        if used[i] {
            continue;
        }
        for end in segments[i] {
            if !used[i] && incident[&end.0].len() == 1 {
                let (points, closed) = walk(i, end.0, &mut used);
                lines.push(Polyline { points, closed });
            }
        }
    }
    for i in 0..segments.len() {
        if !used[i] {
            let (points, closed) = walk(i, segments[i][0].0, &mut used);
            lines.push(Polyline { points, closed });
        }
    }
    lines
}

/// Iso-lines at `count` evenly spaced interior levels.
pub fn plot_contours(mesh: &TriMesh, values: &[f64], count: usize) -> Vec<Contour> {
    contour_levels(values, count)
        .into_iter()
        .map(|level| Contour {
            level,
            lines: level_set(mesh, values, level),
        })
        .collect()
}

/// Images of the `s + 1` vertical and `s + 1` horizontal lines of an `s x s`
/// grid over `bbox`. Each line is sampled at `resolution` points; runs of
/// points that `f` maps become polylines.
pub fn grid_lines<F>(bbox: &BoundingBox, s: usize, resolution: usize, f: F) -> Vec<Polyline>
where
    F: Fn(&Point2<f64>) -> Option<Point2<f64>>,
{
    let mut lines = Vec::new();
    let resolution = resolution.max(2);
    for vertical in [true, false] {
        for i in 0..=s {
            let a = i as f64 / s as f64;
            let mut run: Vec<Point2<f64>> = Vec::new();
            for k in 0..resolution {
                let b = k as f64 / (resolution - 1) as f64;
                let (u, v) = if vertical { (a, b) } else { (b, a) };
                let p = Point2::new(bbox.min.x + bbox.width() * u, bbox.min.y + bbox.height() * v);
                match f(&p) {
                    Some(q) => run.push(q),
                    None => {
                        if run.len() > 1 {
                            lines.push(Polyline { points: std::mem::take(&mut run), closed: false });
                        }
                        run.clear();
                    }
                }
            }
            if run.len() > 1 {
                lines.push(Polyline { points: run, closed: false });
            }
        }
    }
    lines
}
