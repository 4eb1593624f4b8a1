//! Image deformation by pull-back through harmonic maps, and vector plots of
//! coordinate functions and mapped grids.

mod contour;
mod raster;
mod svg;

pub use contour::{contour_levels, grid_lines, level_set, plot_contours, Contour, Polyline};
pub use raster::{Placement, RasterImage, Rgba};
pub use svg::{palette, SvgPlot};

use std::sync::Arc;

use nalgebra::Point2;
use rayon::prelude::*;
use thiserror::Error;

use crate::gbc::{compute_basis, GbcError};
use crate::geometry::{BoundaryCorrespondence, Polygon};
use crate::mapping::{build_map, compose_maps, ComposedMap, HarmonicMap, MapError};
use crate::solver::LinearSolver;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WarpError {
    #[error(transparent)]
    Gbc(#[from] GbcError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("map is not injective: output pixel ({column}, {row}) at ({x}, {y}) has {multiplicity} preimages")]
    NonInjective {
        column: usize,
        row: usize,
        x: f64,
        y: f64,
        multiplicity: usize,
    },
    #[error("invalid image: {0}")]
    InvalidImage(String),
}

/// Inverse evaluation from the target back to the source.
pub trait PullBack: Sync {
    fn pull_back(&self, w: &Point2<f64>) -> Result<Point2<f64>, MapError>;
}

impl PullBack for HarmonicMap {
    fn pull_back(&self, w: &Point2<f64>) -> Result<Point2<f64>, MapError> {
        self.invert(w)
    }
}

impl PullBack for ComposedMap {
    fn pull_back(&self, w: &Point2<f64>) -> Result<Point2<f64>, MapError> {
        self.pullback(w)
    }
}

/// How the source polygon reaches the target polygon.
#[derive(Debug, Clone)]
pub enum WarpRoute {
    /// One harmonic map `V -> W`.
    Direct(BoundaryCorrespondence),
    /// `Phi1^{-1} o Phi0` with `Phi0: V -> Theta` and `Phi1: W -> Theta`.
    Via {
        source_to_theta: BoundaryCorrespondence,
        target_to_theta: BoundaryCorrespondence,
    },
}

#[derive(Debug, Clone)]
pub struct WarpJob {
    pub source_image: RasterImage,
    pub route: WarpRoute,
    pub h: f64,
    pub background: Rgba,
}

impl WarpJob {
    pub fn source_polygon(&self) -> &Polygon {
        match &self.route {
            WarpRoute::Direct(c) => c.source(),
            WarpRoute::Via { source_to_theta, .. } => source_to_theta.source(),
        }
    }

    pub fn target_polygon(&self) -> &Polygon {
        match &self.route {
            WarpRoute::Direct(c) => c.target(),
            WarpRoute::Via { target_to_theta, .. } => target_to_theta.source(),
        }
    }
}

/// Builds the maps described by `job` and warps its image.
pub fn warp_image(job: &WarpJob) -> Result<RasterImage, WarpError> {
    match &job.route {
        WarpRoute::Direct(c) => {
            let basis = Arc::new(compute_basis(c.source(), job.h, LinearSolver::default())?);
            let map = build_map(basis, c)?;
            warp_with(&job.source_image, &map, c.target(), job.background)
        }
        WarpRoute::Via {
            source_to_theta,
            target_to_theta,
        } => {
            let b0 = Arc::new(compute_basis(source_to_theta.source(), job.h, LinearSolver::default())?);
            let b1 = Arc::new(compute_basis(target_to_theta.source(), job.h, LinearSolver::default())?);
            let phi0 = Arc::new(build_map(b0, source_to_theta)?);
            let phi1 = Arc::new(build_map(b1, target_to_theta)?);
            let composed = compose_maps(phi0, phi1)?;
            warp_with(&job.source_image, &composed, target_to_theta.source(), job.background)
        }
    }
}

/// Pull-back warp onto the target's bounding box at the source pixel size.
/// Pixels whose centers lie outside the target, or whose pull-back leaves
/// the image of the map, get `background`; a pixel with several preimages
/// aborts the warp.
pub fn warp_with<M: PullBack + ?Sized>(
    source: &RasterImage,
    map: &M,
    target: &Polygon,
    background: Rgba,
) -> Result<RasterImage, WarpError> {
    let (sx, sy) = source.placement().pixel_size();
    let bb = target.bounding_box();
    let width = ((bb.width() / sx) * (1.0 - 1e-9)).ceil().max(1.0) as usize;
    let height = ((bb.height() / sy) * (1.0 - 1e-9)).ceil().max(1.0) as usize;
    let placement = Placement::with_pixel_size(Point2::new(bb.min.x, bb.min.y + height as f64 * sy), sx, sy);
    let rows: Vec<Result<Vec<Rgba>, WarpError>> = (0..height)
        .into_par_iter()
        .map(|row| {
            (0..width)
                .map(|column| {
                    let w = placement.to_world(column as f64 + 0.5, row as f64 + 0.5);
                    if !target.contains(&w) {
                        return Ok(background);
                    }
                    match map.pull_back(&w) {
                        Ok(p) => Ok(source.sample_bilinear(&p)),
                        Err(MapError::OutsideImage { .. }) | Err(MapError::OutsideDomain { .. }) => Ok(background),
                        Err(MapError::Ambiguous { multiplicity, .. }) => Err(WarpError::NonInjective {
                            column,
                            row,
                            x: w.x,
                            y: w.y,
                            multiplicity,
                        }),
                        Err(e) => Err(e.into()),
                    }
                })
                .collect()
        })
        .collect();
    let mut pixels = Vec::with_capacity(width * height);
    for row in rows {
        pixels.extend(row?);
    }
    Ok(RasterImage::from_parts(width, height, pixels, placement))
}
