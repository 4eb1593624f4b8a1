use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use harmonic_gbc::gbc::compute_basis;
use harmonic_gbc::geometry::{BoundingBox, TriMesh};
use harmonic_gbc::mapping::{build_map, compose_maps, PiecewiseAffineMap};
use harmonic_gbc::solver::LinearSolver;
use harmonic_gbc::verifier::{certify, VerifierConfig};
use harmonic_gbc::warp::{grid_lines, palette, plot_contours, warp_image, Polyline, Rgba, SvgPlot, WarpJob, WarpRoute};
use nalgebra::Point2;
use serde::Deserialize;
use serde_json::json;

use crate::error::{CliError, Kind};
use crate::io::{read_json, read_png, read_polygon, write_atomic, write_json, write_png, CorrespondenceSpec};

/// Points sampled along each grid line.
const GRID_RESOLUTION: usize = 200;

pub struct GbcArgs {
    pub source: PathBuf,
    pub h: f64,
    pub out: PathBuf,
    pub contours: Option<PathBuf>,
    pub levels: usize,
}

pub fn gbc(a: &GbcArgs) -> Result<String, CliError> {
    let polygon = read_polygon(&a.source)?;
    let basis = compute_basis(&polygon, a.h, LinearSolver::default())?;
    write_json(&a.out, &basis.to_json_value())?;
    if let Some(dir) = &a.contours {
        let edges = boundary_edges(basis.mesh().nodes(), basis.mesh().triangles());
        for (i, f) in basis.functions().iter().enumerate() {
            let svg = contour_svg(basis.mesh(), &edges, &[f.values()], a.levels);
            write_atomic(&dir.join(format!("phi_{i}.svg")), svg.as_bytes())?;
        }
    }
    let ax = basis.check_axioms();
    Ok(format!(
        "gbc functions={} nodes={} triangles={} partition_of_unity={:.3e} min_value={:.3e}",
        basis.len(),
        basis.mesh().node_count(),
        basis.mesh().triangle_count(),
        ax.partition_of_unity,
        ax.min_value
    ))
}

pub struct MapArgs {
    pub source: PathBuf,
    pub target: PathBuf,
    pub correspondence: Option<PathBuf>,
    pub h: f64,
    pub out: PathBuf,
    pub svg: Option<PathBuf>,
    pub grid: usize,
}

pub fn map(a: &MapArgs) -> Result<String, CliError> {
    let spec = CorrespondenceSpec::load(a.correspondence.as_deref())?;
    let c = spec.direct(&read_polygon(&a.source)?, &read_polygon(&a.target)?)?;
    let basis = Arc::new(compute_basis(c.source(), a.h, LinearSolver::default())?);
    let map = build_map(basis, &c)?;
    write_json(&a.out, &map.to_json_value())?;
    if let Some(path) = &a.svg {
        let src = c.source().bounding_box();
        let lines = grid_lines(&src, a.grid, GRID_RESOLUTION, |p| map.eval(p).ok());
        write_atomic(path, grid_svg(&lines, c.target().outer()).as_bytes())?;
    }
    let aff = map.affine();
    let min_det = (0..aff.source_mesh().triangle_count())
        .map(|t| aff.det(t))
        .fold(f64::INFINITY, f64::min);
    Ok(format!(
        "map nodes={} triangles={} min_triangle_det={:.3e}",
        aff.source_mesh().node_count(),
        aff.source_mesh().triangle_count(),
        min_det
    ))
}

pub struct ComposeArgs {
    pub source: PathBuf,
    pub target: PathBuf,
    pub via: Option<PathBuf>,
    pub correspondence: Option<PathBuf>,
    pub h: f64,
    pub out: PathBuf,
    pub svg: Option<PathBuf>,
    pub grid: usize,
}

pub fn compose(a: &ComposeArgs) -> Result<String, CliError> {
    let spec = CorrespondenceSpec::load(a.correspondence.as_deref())?;
    let theta = a.via.as_deref().map(read_polygon).transpose()?;
    let (c0, c1) = spec.via(&read_polygon(&a.source)?, &read_polygon(&a.target)?, theta.as_ref())?;
    let b0 = Arc::new(compute_basis(c0.source(), a.h, LinearSolver::default())?);
    let b1 = Arc::new(compute_basis(c1.source(), a.h, LinearSolver::default())?);
    let phi0 = Arc::new(build_map(b0.clone(), &c0)?);
    let phi1 = Arc::new(build_map(b1, &c1)?);
    let composed = compose_maps(phi0, phi1)?;
    let image = b0
        .mesh()
        .nodes()
        .iter()
        .map(|p| composed.eval(p).map(|q| [q.x, q.y]))
        .collect::<Result<Vec<_>, _>>()?;
    let mut dump = b0.mesh().to_json_value();
    dump["image"] = json!(image);
    write_json(&a.out, &dump)?;
    if let Some(path) = &a.svg {
        let lines = grid_lines(&c0.source().bounding_box(), a.grid, GRID_RESOLUTION, |p| composed.eval(p).ok());
        write_atomic(path, grid_svg(&lines, c1.source().outer()).as_bytes())?;
    }
    Ok(format!(
        "compose nodes={} intermediate_vertices={}",
        image.len(),
        c0.target().vertex_count()
    ))
}

pub struct VerifyArgs {
    pub source: PathBuf,
    pub target: PathBuf,
    pub correspondence: Option<PathBuf>,
    pub h: f64,
    pub out: Option<PathBuf>,
    pub config: VerifierConfig,
}

pub fn verify(a: &VerifyArgs) -> Result<String, CliError> {
    let spec = CorrespondenceSpec::load(a.correspondence.as_deref())?;
    let c = spec.direct(&read_polygon(&a.source)?, &read_polygon(&a.target)?)?;
    let basis = Arc::new(compute_basis(c.source(), a.h, LinearSolver::default())?);
    let map = build_map(basis, &c)?;
    let report = certify(&map, &a.config);
    if let Some(out) = &a.out {
        write_json(out, &report)?;
    }
    Ok(format!(
        "verify verdict={} min_det={:.3e} below_threshold={} overlaps={} coverage={:.6} area_ratio={:.9}",
        serde_json::to_value(report.verdict).expect("verdict serializes").as_str().unwrap_or("?"),
        report.min_det,
        report.below_threshold.len(),
        report.overlap_count,
        report.coverage,
        report.area_ratio
    ))
}

pub struct WarpArgs {
    pub source_image: PathBuf,
    pub source_poly: PathBuf,
    pub target_poly: PathBuf,
    pub via: Option<PathBuf>,
    pub correspondence: Option<PathBuf>,
    pub h: f64,
    pub background: Rgba,
    pub out: PathBuf,
}

pub fn warp(a: &WarpArgs) -> Result<String, CliError> {
    let spec = CorrespondenceSpec::load(a.correspondence.as_deref())?;
    let (source, target) = (read_polygon(&a.source_poly)?, read_polygon(&a.target_poly)?);
    let route = match &a.via {
        None => WarpRoute::Direct(spec.direct(&source, &target)?),
        Some(path) => {
            let theta = read_polygon(path)?;
            let (source_to_theta, target_to_theta) = spec.via(&source, &target, Some(&theta))?;
            WarpRoute::Via {
                source_to_theta,
                target_to_theta,
            }
        }
    };
    let job = WarpJob {
        source_image: read_png(&a.source_image, &source)?,
        route,
        h: a.h,
        background: a.background,
    };
    let out = warp_image(&job)?;
    write_png(&a.out, &out)?;
    Ok(format!(
        "warp input={}x{} output={}x{}",
        job.source_image.width(),
        job.source_image.height(),
        out.width(),
        out.height()
    ))
}

#[derive(Debug, Deserialize)]
struct MeshDump {
    nodes: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    #[serde(default)]
    phi: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    image: Option<Vec<[f64; 2]>>,
}

impl MeshDump {
    fn mesh(&self) -> Result<TriMesh, CliError> {
        let nodes = self.nodes.iter().map(|p| Point2::new(p[0], p[1])).collect();
        Ok(TriMesh::from_raw(nodes, self.triangles.clone())?)
    }
}

pub enum PlotInput {
    Basis(PathBuf),
    Map(PathBuf),
}

pub struct PlotArgs {
    pub input: PlotInput,
    pub function: Option<usize>,
    pub levels: usize,
    pub grid: usize,
    pub out: PathBuf,
}

pub fn plot(a: &PlotArgs) -> Result<String, CliError> {
    match &a.input {
        PlotInput::Basis(path) => {
            let dump: MeshDump = read_json(path)?;
            let phi = dump
                .phi
                .as_ref()
                .ok_or_else(|| bad_dump(path, "missing \"phi\""))?;
            let mesh = dump.mesh()?;
            if phi.iter().any(|f| f.len() != mesh.node_count()) {
                return Err(bad_dump(path, "every function needs one value per node"));
            }
            let chosen: Vec<&[f64]> = match a.function {
                Some(i) => vec![phi.get(i).ok_or_else(|| bad_dump(path, &format!("no function {i}")))?],
                None => phi.iter().map(Vec::as_slice).collect(),
            };
            let edges = boundary_edges(mesh.nodes(), mesh.triangles());
            write_atomic(&a.out, contour_svg(&mesh, &edges, &chosen, a.levels).as_bytes())?;
            Ok(format!("plot contours functions={} levels={}", chosen.len(), a.levels))
        }
        PlotInput::Map(path) => {
            let dump: MeshDump = read_json(path)?;
            let image = dump
                .image
                .as_ref()
                .ok_or_else(|| bad_dump(path, "missing \"image\""))?;
            let mesh = Arc::new(dump.mesh()?);
            if image.len() != mesh.node_count() {
                return Err(bad_dump(path, "\"image\" needs one point per node"));
            }
            let image: Vec<_> = image.iter().map(|p| Point2::new(p[0], p[1])).collect();
            let bbox = BoundingBox::from_points(mesh.nodes()).ok_or_else(|| bad_dump(path, "empty mesh"))?;
            let map = PiecewiseAffineMap::new(mesh.clone(), image.clone());
            let lines = grid_lines(&bbox, a.grid, GRID_RESOLUTION, |p| map.eval(p).ok());
            let outline = boundary_edges(&image, mesh.triangles());
            let mut plot = SvgPlot::new(BoundingBox::from_points(&image).expect("nonempty image"));
            for e in &outline {
                plot.polyline(e, "black", 2.0);
            }
            for l in &lines {
                plot.polyline(l, "steelblue", 1.0);
            }
            write_atomic(&a.out, plot.render().as_bytes())?;
            Ok(format!("plot grid lines={}", lines.len()))
        }
    }
}

fn bad_dump(path: &Path, what: &str) -> CliError {
    CliError::new(Kind::Validation, format!("{}: {what}", path.display()))
}

/// Edges used by exactly one triangle, as two-point polylines in a fixed order.
fn boundary_edges(nodes: &[Point2<f64>], triangles: &[[usize; 3]]) -> Vec<Polyline> {
    let mut count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for t in triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            *count.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    count
        .into_iter()
        .filter(|&(_, c)| c == 1)
        .map(|((a, b), _)| Polyline {
            points: vec![nodes[a], nodes[b]],
            closed: false,
        })
        .collect()
}

fn contour_svg(mesh: &TriMesh, edges: &[Polyline], fields: &[&[f64]], levels: usize) -> String {
    let bbox = BoundingBox::from_points(mesh.nodes()).expect("nonempty mesh");
    let mut plot = SvgPlot::new(bbox);
    for e in edges {
        plot.polyline(e, "black", 2.0);
    }
    for (k, values) in fields.iter().enumerate() {
        let color = if fields.len() == 1 { "steelblue".to_string() } else { palette(k, fields.len()) };
        for contour in plot_contours(mesh, values, levels) {
            for line in &contour.lines {
                plot.polyline(line, &color, 1.0);
            }
        }
    }
    plot.render()
}

fn grid_svg(lines: &[Polyline], outline: &[Point2<f64>]) -> String {
    let bbox = BoundingBox::from_points(outline).expect("nonempty outline");
    let mut plot = SvgPlot::new(bbox);
    plot.outline(outline, "black");
    for l in lines {
        plot.polyline(l, "steelblue", 1.0);
    }
    plot.render()
}
