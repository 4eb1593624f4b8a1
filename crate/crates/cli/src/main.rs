//! `hgbc`: harmonic coordinates, maps, certificates and image warps from the
//! command line.

mod commands;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use harmonic_gbc::verifier::VerifierConfig;
use harmonic_gbc::warp::Rgba;

use commands::*;
use error::{CliError, Kind};

#[derive(Debug, Parser)]
#[command(name = "hgbc", version, about = "Harmonic generalized barycentric coordinates and polygon maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct MeshOpts {
    /// Target mesh size, relative to the longer side of the source bounding box.
    #[arg(long, default_value_t = 1.0 / 64.0, value_parser = parse_h)]
    h: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the coordinate functions of a polygon and dump them as JSON.
    Gbc {
        #[arg(long)]
        source: PathBuf,
        #[command(flatten)]
        mesh: MeshOpts,
        #[arg(long)]
        out: PathBuf,
        /// Directory for one contour plot per function (`phi_<i>.svg`).
        #[arg(long)]
        contours: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        levels: usize,
    },
    /// Build the harmonic map between two polygons and dump its image mesh.
    Map {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        correspondence: Option<PathBuf>,
        #[command(flatten)]
        mesh: MeshOpts,
        #[arg(long)]
        out: PathBuf,
        /// Mapped grid lines as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        grid: usize,
    },
    /// Map source to target through a convex intermediate polygon.
    Compose {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        /// Intermediate convex polygon; defaults to a regular polygon.
        #[arg(long)]
        via: Option<PathBuf>,
        #[arg(long)]
        correspondence: Option<PathBuf>,
        #[command(flatten)]
        mesh: MeshOpts,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        grid: usize,
    },
    /// Numerically certify that the harmonic map is a bijection.
    Verify {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        correspondence: Option<PathBuf>,
        #[command(flatten)]
        mesh: MeshOpts,
        /// Report JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 25_000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 1e-5)]
        threshold: f64,
        #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
        alphas: u64,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        coverage_resolution: u64,
        /// Exit with the non-injective code unless the verdict is certified.
        #[arg(long)]
        strict: bool,
    },
    /// Warp a PNG placed over the source polygon onto the target polygon.
    Warp {
        #[arg(long)]
        source_image: PathBuf,
        #[arg(long)]
        source_poly: PathBuf,
        #[arg(long)]
        target_poly: PathBuf,
        #[arg(long)]
        via: Option<PathBuf>,
        #[arg(long)]
        correspondence: Option<PathBuf>,
        #[command(flatten)]
        mesh: MeshOpts,
        #[arg(long, default_value = "0,0,0,0", value_parser = parse_rgba)]
        background: Rgba,
        #[arg(long)]
        out: PathBuf,
    },
    /// Plot contours of a basis dump or mapped grid lines of a map dump.
    Plot {
        #[arg(long, conflicts_with = "map", required_unless_present = "map")]
        basis: Option<PathBuf>,
        #[arg(long)]
        map: Option<PathBuf>,
        /// Plot a single function of the basis instead of all of them.
        #[arg(long)]
        function: Option<usize>,
        #[arg(long, default_value_t = 10)]
        levels: usize,
        #[arg(long, default_value_t = 20)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_h(s: &str) -> Result<f64, String> {
    let h: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if h > 0.0 && h <= 0.5 {
        Ok(h)
    } else {
        Err(format!("mesh size must be in (0, 0.5], got {s}"))
    }
}

fn parse_rgba(s: &str) -> Result<Rgba, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(format!("expected R,G,B,A, got {s}"));
    }
    let mut out = [0u8; 4];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = p.parse().map_err(|_| format!("channel {p:?} is not in 0..=255"))?;
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<(String, i32), CliError> {
    let summary = match cli.command {
        Command::Gbc {
            source,
            mesh,
            out,
            contours,
            levels,
        } => gbc(&GbcArgs {
            source,
            h: mesh.h,
            out,
            contours,
            levels,
        })?,
        Command::Map {
            source,
            target,
            correspondence,
            mesh,
            out,
            svg,
            grid,
        } => map(&MapArgs {
            source,
            target,
            correspondence,
            h: mesh.h,
            out,
            svg,
            grid,
        })?,
        Command::Compose {
            source,
            target,
            via,
            correspondence,
            mesh,
            out,
            svg,
            grid,
        } => compose(&ComposeArgs {
            source,
            target,
            via,
            correspondence,
            h: mesh.h,
            out,
            svg,
            grid,
        })?,
        Command::Verify {
            source,
            target,
            correspondence,
            mesh,
            out,
            samples,
            threshold,
            alphas,
            coverage_resolution,
            strict,
        } => {
            let config = VerifierConfig {
                samples: samples as usize,
                threshold,
                alpha_count: alphas as usize,
                coverage_resolution: coverage_resolution as usize,
                ..VerifierConfig::default()
            };
            let summary = verify(&VerifyArgs {
                source,
                target,
                correspondence,
                h: mesh.h,
                out,
                config,
            })?;
            if strict && !summary.contains("verdict=certified") {
                return Ok((summary, Kind::NonInjective.exit_code()));
            }
            summary
        }
        Command::Warp {
            source_image,
            source_poly,
            target_poly,
            via,
            correspondence,
            mesh,
            background,
            out,
        } => warp(&WarpArgs {
            source_image,
            source_poly,
            target_poly,
            via,
            correspondence,
            h: mesh.h,
            background,
            out,
        })?,
        Command::Plot {
            basis,
            map,
            function,
            levels,
            grid,
            out,
        } => {
            let input = match (basis, map) {
                (Some(b), _) => PlotInput::Basis(b),
                (None, Some(m)) => PlotInput::Map(m),
                (None, None) => return Err(CliError::new(Kind::Usage, "one of --basis or --map is required")),
            };
            plot(&PlotArgs {
                input,
                function,
                levels,
                grid,
                out,
            })?
        }
    };
    Ok((summary, 0))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::new(Kind::Usage, e.to_string().trim_end());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.kind.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok((summary, code)) => {
            println!("{summary}");
            ExitCode::from(code as u8)
        }
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.kind.exit_code() as u8)
        }
    }
}
