//! Command-line front end: `solve`, `validate` and `gen`.
//!
//! Exit codes: 0 success, 1 bad flags or unreadable input, 2 no path,
//! 3 partial result after a resource cap, 4 validation issues.

mod report;
mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::oracle::oracle_estimate;
use crate::subdivision::{
    parse_raw_mesh, random_mesh, serialize_mesh, GenOptions, MeshError, PlanarSubdivision,
};
use crate::wavefront::{shortest_path, SolverConfig, SolverError, Status};

pub use report::{Comparison, InputDigest, OracleReport, RunReport, Timings};
pub use svg::{render_svg, SvgOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NO_PATH: i32 = 2;
pub const EXIT_PARTIAL: i32 = 3;
pub const EXIT_INVALID: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "wrsp",
    version,
    about = "Approximate weighted-region shortest paths"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a shortest path and write a JSON report.
    Solve(SolveArgs),
    /// Check a mesh file and list every problem found.
    Validate(ValidateArgs),
    /// Write a random triangulated mesh.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    /// Source vertex (default 0).
    #[arg(long)]
    pub source: Option<usize>,
    /// Target vertex (default: the last vertex).
    #[arg(long)]
    pub target: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub k_const: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub min_angle: Option<f64>,
    #[arg(long)]
    pub max_rays: Option<u64>,
    #[arg(long)]
    pub max_events: Option<u64>,
    #[arg(long)]
    pub max_traced_rays: Option<u64>,
    /// Also run the Steiner-graph oracle.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub steiner_per_edge: Option<usize>,
    /// Check sibling invariants after every event.
    #[arg(long)]
    pub audit: bool,
    /// Report the labeled path without local polishing.
    #[arg(long)]
    pub no_polish: bool,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Number of rays fanned from the source in the SVG overlay.
    #[arg(long, default_value_t = 0)]
    pub overlay_rays: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Include wall-clock timings (makes the report non-reproducible).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub mesh: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub interior_points: Option<usize>,
    #[arg(long)]
    pub min_weight: Option<u32>,
    #[arg(long)]
    pub max_weight: Option<u32>,
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long)]
    pub height: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Keys accepted in a `--config` TOML file.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub source: Option<usize>,
    pub target: Option<usize>,
    pub epsilon: Option<f64>,
    pub k_const: Option<f64>,
    pub delta: Option<f64>,
    pub min_angle: Option<f64>,
    pub max_rays: Option<u64>,
    pub max_events: Option<u64>,
    pub max_traced_rays: Option<u64>,
    pub oracle: Option<bool>,
    pub steiner_per_edge: Option<usize>,
    pub audit: Option<bool>,
    pub polish: Option<bool>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Mesh { path: PathBuf, source: MeshError },
    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("cannot serialize report: {0}")]
    Json(#[from] serde_json::Error),
}

/// Fully resolved `solve` settings.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveSettings {
    pub source: Option<usize>,
    pub target: Option<usize>,
    pub solver: SolverConfig,
    pub oracle: bool,
    pub steiner_per_edge: usize,
}

impl SolveSettings {
    /// Flags override the file, which overrides the defaults.
    pub fn merge(args: &SolveArgs, file: &FileConfig) -> Self {
        let d = SolverConfig::default();
        let solver = SolverConfig {
            epsilon: args.epsilon.or(file.epsilon).unwrap_or(d.epsilon),
            k_const: args.k_const.or(file.k_const).unwrap_or(d.k_const),
            delta: args.delta.or(file.delta),
            min_angle: args.min_angle.or(file.min_angle).unwrap_or(d.min_angle),
            max_rays: args.max_rays.or(file.max_rays).unwrap_or(d.max_rays),
            max_events: args.max_events.or(file.max_events).unwrap_or(d.max_events),
            max_traced_rays: args
                .max_traced_rays
                .or(file.max_traced_rays)
                .unwrap_or(d.max_traced_rays),
            audit: args.audit || file.audit.unwrap_or(d.audit),
            polish: !args.no_polish && file.polish.unwrap_or(d.polish),
            ..d
        };
        Self {
            source: args.source.or(file.source),
            target: args.target.or(file.target),
            solver,
            oracle: args.oracle || file.oracle.unwrap_or(false),
            steiner_per_edge: args
                .steiner_per_edge
                .or(file.steiner_per_edge)
                .unwrap_or(64),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a, out),
        Command::Validate(a) => cmd_validate(a, out),
        Command::Gen(a) => cmd_gen(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, data: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, data).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_mesh(path: &Path) -> Result<(PlanarSubdivision, Vec<u8>), CliError> {
    let bytes = read(path)?;
    let mesh_err = |source| CliError::Mesh {
        path: path.to_path_buf(),
        source,
    };
    let text = String::from_utf8_lossy(&bytes);
    let raw = parse_raw_mesh(&text).map_err(mesh_err)?;
    let sub = PlanarSubdivision::from_raw(&raw).map_err(mesh_err)?;
    Ok((sub, bytes))
}

fn load_config(path: &Path) -> Result<FileConfig, CliError> {
    let bytes = read(path)?;
    toml::from_str(&String::from_utf8_lossy(&bytes)).map_err(|e| CliError::Config {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let t0 = Instant::now();
    let file = match &args.config {
        Some(p) => load_config(p)?,
        None => FileConfig::default(),
    };
    let settings = SolveSettings::merge(args, &file);
    let (sub, bytes) = load_mesh(&args.mesh)?;
    let t_load = t0.elapsed().as_secs_f64();
    let s = settings.source.unwrap_or(0);
    let t = settings.target.unwrap_or(sub.vertex_count() - 1);

    let (engine, oracle) = std::thread::scope(|scope| {
        let oracle = settings.oracle.then(|| {
            scope.spawn(|| {
                let start = Instant::now();
                (
                    oracle_estimate(&sub, s, t, settings.steiner_per_edge),
                    start.elapsed().as_secs_f64(),
                )
            })
        });
        let start = Instant::now();
        let engine =
            shortest_path(&sub, s, t, &settings.solver).map(|r| (r, start.elapsed().as_secs_f64()));
        (engine, oracle.map(|h| h.join().expect("oracle thread")))
    });
    let (result, t_engine) = engine?;

    let svg_start = Instant::now();
    if let Some(path) = &args.svg {
        let opts = SvgOptions {
            overlay_rays: args.overlay_rays,
            critical_segments: true,
        };
        write_file(path, render_svg(&sub, &result, &opts).as_bytes())?;
    }
    let t_svg = svg_start.elapsed().as_secs_f64();

    let digest = InputDigest {
        sha256: hex::encode(Sha256::digest(&bytes)),
        n: sub.stats().n,
        faces: sub.stats().faces,
        w: sub.stats().min_weight,
        big_w: sub.stats().max_weight,
        l: sub.stats().max_edge_length,
    };
    let oracle_report = oracle
        .as_ref()
        .map(|(est, _)| OracleReport::new(settings.steiner_per_edge, est.as_ref()));
    let comparison = oracle_report
        .as_ref()
        .map(|o| Comparison::new(result.cost, o, settings.solver.epsilon));
    let timings = args.timings.then(|| Timings {
        load: t_load,
        engine: t_engine,
        oracle: oracle.as_ref().map(|(_, secs)| *secs),
        svg: args.svg.as_ref().map(|_| t_svg),
        total: t0.elapsed().as_secs_f64(),
    });
    let code = match result.status {
        Status::Complete => EXIT_OK,
        Status::NoPath => EXIT_NO_PATH,
        Status::Partial { .. } => EXIT_PARTIAL,
    };
    let report = RunReport::new(digest, result, oracle_report, comparison, timings);
    let text = report.to_json()?;
    match &args.out {
        Some(p) => write_file(p, text.as_bytes())?,
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    Ok(code)
}

pub fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let bytes = read(&args.mesh)?;
    let raw =
        parse_raw_mesh(&String::from_utf8_lossy(&bytes)).map_err(|source| CliError::Mesh {
            path: args.mesh.clone(),
            source,
        })?;
    let report = crate::subdivision::validate(&raw);
    let _ = writeln!(out, "{report}");
    Ok(if report.issues.is_empty() {
        EXIT_OK
    } else {
        EXIT_INVALID
    })
}

pub fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let d = GenOptions::default();
    let opts = GenOptions {
        interior_points: args.interior_points.unwrap_or(d.interior_points),
        min_weight: args.min_weight.unwrap_or(d.min_weight),
        max_weight: args.max_weight.unwrap_or(d.max_weight),
        width: args.width.unwrap_or(d.width),
        height: args.height.unwrap_or(d.height),
        ..d
    };
    if !(opts.min_weight >= 1
        && opts.min_weight <= opts.max_weight
        && opts.width > 0.0
        && opts.height > 0.0)
    {
        return Err(CliError::Config {
            path: PathBuf::from("<flags>"),
            message: "need 1 ≤ min-weight ≤ max-weight and a positive width and height".into(),
        });
    }
    let sub = random_mesh(args.seed, &opts).map_err(|source| CliError::Mesh {
        path: PathBuf::from("<generated>"),
        source,
    })?;
    let text = serialize_mesh(&sub);
    match &args.out {
        Some(p) => write_file(p, text.as_bytes())?,
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    Ok(EXIT_OK)
}
