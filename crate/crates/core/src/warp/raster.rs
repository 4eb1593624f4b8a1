use nalgebra::{Matrix3, Point2, Vector3};

use super::WarpError;
use crate::geometry::BoundingBox;

pub type Rgba = [u8; 4];

/// Affine map from pixel coordinates (x right, y down, pixel `(i, j)`
/// covering `[i, i+1] x [j, j+1]`) to polygon coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    matrix: Matrix3<f64>,
    inverse: Matrix3<f64>,
}

impl Placement {
    pub fn new(matrix: Matrix3<f64>) -> Result<Self, WarpError> {
        let inverse = matrix
            .try_inverse()
            .filter(|m| m.iter().all(|v| v.is_finite()))
            .ok_or_else(|| WarpError::InvalidImage("placement matrix is singular".into()))?;
        Ok(Placement { matrix, inverse })
    }

    /// Places a `width x height` image over `bbox`, top row at `bbox.max.y`.
    pub fn fit(bbox: &BoundingBox, width: usize, height: usize) -> Self {
        let sx = bbox.width() / width as f64;
        let sy = bbox.height() / height as f64;
        Self::with_pixel_size(Point2::new(bbox.min.x, bbox.max.y), sx, sy)
    }

    /// Axis-aligned placement with the top-left image corner at `top_left`.
    pub fn with_pixel_size(top_left: Point2<f64>, sx: f64, sy: f64) -> Self {
        let m = Matrix3::new(sx, 0.0, top_left.x, 0.0, -sy, top_left.y, 0.0, 0.0, 1.0);
        Placement::new(m).expect("positive pixel size")
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    pub fn to_world(&self, px: f64, py: f64) -> Point2<f64> {
        let v = self.matrix * Vector3::new(px, py, 1.0);
        Point2::new(v.x, v.y)
    }

    pub fn to_pixel(&self, p: &Point2<f64>) -> (f64, f64) {
        let v = self.inverse * Vector3::new(p.x, p.y, 1.0);
        (v.x, v.y)
    }

    /// Side lengths of one pixel in polygon units.
    pub fn pixel_size(&self) -> (f64, f64) {
        (
            (self.matrix[(0, 0)].powi(2) + self.matrix[(1, 0)].powi(2)).sqrt(),
            (self.matrix[(0, 1)].powi(2) + self.matrix[(1, 1)].powi(2)).sqrt(),
        )
    }
}

/// 8-bit RGBA raster with a placement in polygon coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    pixels: Vec<Rgba>,
    placement: Placement,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, pixels: Vec<Rgba>, placement: Placement) -> Result<Self, WarpError> {
        if width == 0 || height == 0 {
            return Err(WarpError::InvalidImage("image must be at least 1x1".into()));
        }
        if pixels.len() != width * height {
            return Err(WarpError::InvalidImage(format!(
                "expected {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        Ok(RasterImage {
            width,
            height,
            pixels,
            placement,
        })
    }

    pub fn filled(width: usize, height: usize, color: Rgba, placement: Placement) -> Result<Self, WarpError> {
        Self::new(width, height, vec![color; width * height], placement)
    }

    /// Checkerboard with square cells of `cell` pixels.
    pub fn checkerboard(width: usize, height: usize, cell: usize, a: Rgba, b: Rgba, placement: Placement) -> Result<Self, WarpError> {
        let cell = cell.max(1);
        let pixels = (0..width * height)
            .map(|k| {
                let (i, j) = (k % width, k / width);
                if (i / cell + j / cell).is_multiple_of(2) {
                    a
                } else {
                    b
                }
            })
            .collect();
        Self::new(width, height, pixels, placement)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[Rgba] {
        &self.pixels
    }

    pub fn placement(&self) -> &Placement {
        &self.placement
    }

    pub fn pixel(&self, i: usize, j: usize) -> Rgba {
        self.pixels[j * self.width + i]
    }

    /// Polygon-space position of the center of pixel `(i, j)`.
    pub fn pixel_center(&self, i: usize, j: usize) -> Point2<f64> {
        self.placement.to_world(i as f64 + 0.5, j as f64 + 0.5)
    }

    /// Bilinear interpolation between pixel centers, clamped at the edges.
    pub fn sample_bilinear(&self, p: &Point2<f64>) -> Rgba {
        let (px, py) = self.placement.to_pixel(p);
        let (u, v) = (px - 0.5, py - 0.5);
        let (i0, j0) = (u.floor(), v.floor());
        let (fx, fy) = (u - i0, v - j0);
        let clamp_x = |i: f64| (i.max(0.0) as usize).min(self.width - 1);
        let clamp_y = |j: f64| (j.max(0.0) as usize).min(self.height - 1);
        let (x0, x1) = (clamp_x(i0), clamp_x(i0 + 1.0));
        let (y0, y1) = (clamp_y(j0), clamp_y(j0 + 1.0));
        let mut out = [0u8; 4];
        for (c, slot) in out.iter_mut().enumerate() {
            let top = self.pixel(x0, y0)[c] as f64 * (1.0 - fx) + self.pixel(x1, y0)[c] as f64 * fx;
            let bottom = self.pixel(x0, y1)[c] as f64 * (1.0 - fx) + self.pixel(x1, y1)[c] as f64 * fx;
            *slot = (top * (1.0 - fy) + bottom * fy).round().clamp(0.0, 255.0) as u8;
        }
        out
    }

    pub(crate) fn from_parts(width: usize, height: usize, pixels: Vec<Rgba>, placement: Placement) -> Self {
        RasterImage {
            width,
            height,
            pixels,
            placement,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box() -> BoundingBox {
        BoundingBox {
            min: Point2::new(0.0, 0.0),
            max: Point2::new(1.0, 1.0),
        }
    }

    #[test]
    fn placement_round_trip_and_flip() {
        let pl = Placement::fit(&unit_box(), 10, 20);
        let p = pl.to_world(0.0, 0.0);
        assert_eq!(p, Point2::new(0.0, 1.0));
        let q = pl.to_world(10.0, 20.0);
        assert!((q - Point2::new(1.0, 0.0)).norm() < 1e-15);
        let (x, y) = pl.to_pixel(&Point2::new(0.25, 0.5));
        assert!((x - 2.5).abs() < 1e-12 && (y - 10.0).abs() < 1e-12);
        assert_eq!(pl.pixel_size(), (0.1, 0.05));
    }

    #[test]
    fn bilinear_hits_pixel_centers_and_midpoints() {
        let pl = Placement::fit(&unit_box(), 2, 1);
        let img = RasterImage::new(2, 1, vec![[0, 0, 0, 255], [200, 100, 50, 255]], pl).unwrap();
        assert_eq!(img.sample_bilinear(&img.pixel_center(1, 0)), [200, 100, 50, 255]);
        assert_eq!(img.sample_bilinear(&Point2::new(0.5, 0.5)), [100, 50, 25, 255]);
        // clamped beyond the last center
        assert_eq!(img.sample_bilinear(&Point2::new(0.99, 0.01)), [200, 100, 50, 255]);
    }

    #[test]
    fn rejects_bad_sizes() {
        let pl = Placement::fit(&unit_box(), 1, 1);
        assert!(RasterImage::new(0, 1, vec![], pl).is_err());
        assert!(RasterImage::new(2, 2, vec![[0; 4]; 3], pl).is_err());
        assert!(Placement::new(Matrix3::zeros()).is_err());
    }
}
