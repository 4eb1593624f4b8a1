use std::fmt::Write;

use nalgebra::Point2;

use super::contour::Polyline;
use crate::geometry::BoundingBox;

/// Minimal SVG writer for line drawings in polygon coordinates (y up).
#[derive(Debug, Clone)]
pub struct SvgPlot {
    bbox: BoundingBox,
    body: String,
    stroke_width: f64,
}

impl SvgPlot {
    pub fn new(bbox: BoundingBox) -> Self {
        let stroke_width = 0.002 * bbox.extent().max(f64::MIN_POSITIVE);
        SvgPlot {
            bbox,
            body: String::new(),
            stroke_width,
        }
    }

    fn path_data(points: &[Point2<f64>], closed: bool) -> String {
        let mut d = String::new();
        for (k, p) in points.iter().enumerate() {
            let _ = write!(d, "{}{:.6},{:.6} ", if k == 0 { "M" } else { "L" }, p.x, p.y);
        }
        if closed {
            d.push('Z');
        }
        d.trim_end().to_string()
    }

    pub fn polyline(&mut self, line: &Polyline, color: &str, width_scale: f64) {
        if line.points.len() < 2 {
            return;
        }
        let _ = writeln!(
            self.body,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="{:.6}"/>"#,
            Self::path_data(&line.points, line.closed),
            self.stroke_width * width_scale
        );
    }

    /// Outline of a closed loop.
    pub fn outline(&mut self, points: &[Point2<f64>], color: &str) {
        self.polyline(
            &Polyline {
                points: points.to_vec(),
                closed: true,
            },
            color,
            2.0,
        );
    }

    pub fn point(&mut self, p: &Point2<f64>, color: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{:.6}" cy="{:.6}" r="{:.6}" fill="{color}"/>"#,
            p.x,
            p.y,
            self.stroke_width * 3.0
        );
    }

    pub fn render(&self) -> String {
        let margin = 0.05 * self.bbox.extent();
        let (x, y) = (self.bbox.min.x - margin, self.bbox.min.y - margin);
        let (w, h) = (self.bbox.width() + 2.0 * margin, self.bbox.height() + 2.0 * margin);
        // Flip y so polygon coordinates read upward.
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.6} {:.6} {:.6} {:.6}\" width=\"800\" height=\"{:.0}\">\n<g transform=\"matrix(1 0 0 -1 0 {:.6})\">\n{}</g>\n</svg>\n",
            x,
            y,
            w,
            h,
            800.0 * h / w,
            2.0 * y + h,
            self.body
        )
    }
}

/// Hue-spread stroke colors for `n` series.
pub fn palette(k: usize, n: usize) -> String {
    let hue = 360.0 * k as f64 / n.max(1) as f64;
    format!("hsl({hue:.1},70%,40%)")
}
