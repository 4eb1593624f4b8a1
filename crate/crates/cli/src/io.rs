use std::fs;
use std::io::{Cursor, Write};
use std::path::Path;

use harmonic_gbc::geometry::{insert_inactive_vertices, BoundaryCorrespondence, Polygon};
use harmonic_gbc::warp::{Placement, Rgba};
use harmonic_gbc::RasterImage;
use image::{ImageFormat, RgbaImage};
use serde::Deserialize;

use crate::error::{CliError, Kind};

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::new(Kind::Io, format!("cannot read {}: {e}", path.display())))
}

pub fn read_polygon(path: &Path) -> Result<Polygon, CliError> {
    Polygon::from_json_str(&read_text(path)?).map_err(|e| {
        let mut err = CliError::from(e);
        err.detail = format!("{}: {}", path.display(), err.detail);
        err
    })
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::new(Kind::Parse, format!("{}: {e}", path.display())))
}

/// Writes through a temporary file in the destination directory and renames
/// it into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io_err = |e: std::io::Error| CliError::new(Kind::Io, format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

pub fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON value serializes");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Pairing options shared by the subcommands that build maps.
///
/// Inactive positions are `[edge, t]` pairs in the global edge numbering of
/// the polygon after validation (counter-clockwise outer loop, clockwise
/// holes). `offset` rotates the pairing of the source onto the target (or
/// onto the intermediate polygon); `target_offset` does the same for the
/// target onto the intermediate polygon.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrespondenceSpec {
    #[serde(default)]
    pub source_inactive: Vec<(usize, f64)>,
    #[serde(default)]
    pub target_inactive: Vec<(usize, f64)>,
    #[serde(default)]
    pub via_inactive: Vec<(usize, f64)>,
    #[serde(default)]
    pub offset: usize,
    #[serde(default)]
    pub target_offset: usize,
}

impl CorrespondenceSpec {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        path.map_or(Ok(Self::default()), read_json)
    }

    pub fn direct(&self, source: &Polygon, target: &Polygon) -> Result<BoundaryCorrespondence, CliError> {
        let v = insert_inactive_vertices(source, &self.source_inactive)?;
        let w = insert_inactive_vertices(target, &self.target_inactive)?;
        Ok(BoundaryCorrespondence::with_offset(&v, &w, self.offset)?)
    }

    /// Correspondences `V -> Theta` and `W -> Theta`. Without an explicit
    /// intermediate polygon, `Theta` is the regular polygon with as many
    /// vertices as the source (after inactive insertion).
    pub fn via(
        &self,
        source: &Polygon,
        target: &Polygon,
        theta: Option<&Polygon>,
    ) -> Result<(BoundaryCorrespondence, BoundaryCorrespondence), CliError> {
        let v = insert_inactive_vertices(source, &self.source_inactive)?;
        let w = insert_inactive_vertices(target, &self.target_inactive)?;
        let theta = match theta {
            Some(t) => insert_inactive_vertices(t, &self.via_inactive)?,
            None => regular_polygon(v.vertex_count())?,
        };
        if !theta.is_convex() || theta.has_holes() {
            return Err(CliError::new(Kind::Validation, "intermediate polygon must be convex without holes"));
        }
        Ok((
            BoundaryCorrespondence::with_offset(&v, &theta, self.offset)?,
            BoundaryCorrespondence::with_offset(&w, &theta, self.target_offset)?,
        ))
    }
}

/// Regular `n`-gon inscribed in the unit circle with a horizontal bottom edge.
pub fn regular_polygon(n: usize) -> Result<Polygon, CliError> {
    let start = -std::f64::consts::FRAC_PI_2 - std::f64::consts::PI / n as f64;
    let pts: Vec<[f64; 2]> = (0..n)
        .map(|k| {
            let a = start + std::f64::consts::TAU * k as f64 / n as f64;
            [a.cos(), a.sin()]
        })
        .collect();
    Ok(Polygon::new(&pts)?)
}

/// Loads a PNG and stretches it over the polygon's bounding box.
pub fn read_png(path: &Path, polygon: &Polygon) -> Result<RasterImage, CliError> {
    let img = image::open(path)
        .map_err(|e| CliError::new(Kind::Io, format!("cannot read image {}: {e}", path.display())))?
        .to_rgba8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let pixels: Vec<Rgba> = img.pixels().map(|p| p.0).collect();
    let placement = Placement::fit(&polygon.bounding_box(), w, h);
    Ok(RasterImage::new(w, h, pixels, placement)?)
}

pub fn write_png(path: &Path, img: &RasterImage) -> Result<(), CliError> {
    let flat: Vec<u8> = img.pixels().iter().flatten().copied().collect();
    let buf = RgbaImage::from_raw(img.width() as u32, img.height() as u32, flat).expect("buffer matches size");
    let mut bytes = Cursor::new(Vec::new());
    buf.write_to(&mut bytes, ImageFormat::Png)
        .map_err(|e| CliError::new(Kind::Io, format!("cannot encode {}: {e}", path.display())))?;
    write_atomic(path, bytes.get_ref())
}
