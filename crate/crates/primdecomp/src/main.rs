//! Command-line front end: `decompose`, `metrics` and `cost` subcommands.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use primdecomp::decomposer::{
    decompose_with_stats, kind_counts, DecomposeConfig, IntersectionCost,
};
use primdecomp::mesh::{deduplicate_vertices, face_attributes, parse_obj, IndexedMesh};
use primdecomp::metrics::{byte_cost, combined_mesh, one_way_distance, sample_surface};
use primdecomp::primitives::{FitConfig, Kind, Primitive, ALL_KINDS};
use primdecomp::schema;
use primdecomp::Error;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

const EXIT_OK: u8 = 0;
const EXIT_NO_INPUT: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_INTERNAL: u8 = 70;

#[derive(Parser)]
#[command(
    name = "primdecomp",
    version,
    about = "Convex primitive decomposition of polygonal meshes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose an OBJ mesh into convex primitives
    Decompose(DecomposeArgs),
    /// One-way Hausdorff/Chamfer distance from a collider to an input mesh
    Metrics(MetricsArgs),
    /// Byte cost of a primitive set per the per-kind float table
    Cost(CostArgs),
}

#[derive(Args)]
struct DecomposeArgs {
    /// Input OBJ mesh
    #[arg(long)]
    input: PathBuf,
    /// Target number of primitives (N >= 1)
    #[arg(long)]
    target: usize,
    /// Maximum excess volume per merge, as a fraction of the input AABB volume
    #[arg(long, default_value = "inf")]
    max_excess_volume: f64,
    /// Per-kind weight overrides, e.g. "cylinder=1.05,prism=1.4"
    #[arg(long)]
    weights: Option<String>,
    /// Subset of kinds to fit, e.g. "obb,sphere,cylinder"
    #[arg(long)]
    kinds: Option<String>,
    /// Tangent quadric weight (0 disables the tangent term)
    #[arg(long, default_value_t = 0.0)]
    tangent_eps: f64,
    /// Vertex deduplication distance (0 = bit-exact merging)
    #[arg(long, default_value_t = 0.0)]
    dedup_eps: f64,
    /// Output primitive-set JSON path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional OBJ export of the quantized primitives (with MTL sidecar)
    #[arg(long)]
    mesh_out: Option<PathBuf>,
    /// Segment count for quantizing curved primitives
    #[arg(long, default_value_t = 32)]
    segments: usize,
    /// Enable the intersection-aware cost with this many samples per pair
    #[arg(long)]
    isect_cost: Option<u32>,
    /// Seed for stochastic components
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Export quantized meshes that enclose the analytic primitives
    #[arg(long, default_value_t = false)]
    circumscribed: bool,
    /// Degeneracy clamp as a fraction of the input bbox diagonal
    /// (default: absolute 1e-3 model units)
    #[arg(long)]
    min_extent_rel: Option<f64>,
    /// Record per-primitive subsumed face lists in the JSON output
    #[arg(long, default_value_t = false)]
    include_faces: bool,
    /// Skip redundant-primitive culling
    #[arg(long, default_value_t = false)]
    no_cull: bool,
}

#[derive(Args)]
struct MetricsArgs {
    /// Input (reference) OBJ mesh
    #[arg(long)]
    input: PathBuf,
    /// Collider: primitive-set JSON or OBJ mesh
    #[arg(long)]
    collider: PathBuf,
    /// Surface sample count
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Segment count when quantizing a primitive-set collider
    #[arg(long, default_value_t = 32)]
    segments: usize,
    /// Optional JSON report path (always printed to stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CostArgs {
    /// Primitive-set JSON
    #[arg(long)]
    collider: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Decompose(args) => cmd_decompose(args),
        Command::Metrics(args) => cmd_metrics(args),
        Command::Cost(args) => cmd_cost(args),
    };
    match result {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Io(io) if io.kind() == std::io::ErrorKind::NotFound => EXIT_NO_INPUT,
        Error::Config(_) => EXIT_USAGE,
        Error::Parse { .. } | Error::Structure(_) | Error::Json(_) => EXIT_DATA,
        Error::Invariant(_) => EXIT_INTERNAL,
        Error::Io(_) => EXIT_DATA,
    }
}

fn load_mesh(path: &Path) -> Result<IndexedMesh, Error> {
    let file = File::open(path)?;
    parse_obj(BufReader::new(file))
}

fn parse_kind_name(name: &str) -> Result<Kind, Error> {
    Kind::parse(name.trim())
        .ok_or_else(|| Error::Config(format!("unknown primitive kind '{name}'")))
}

/// Parses "kind=w,..." overrides on top of the default weights.
fn parse_weights(spec: &str, fit: &mut FitConfig) -> Result<(), Error> {
    for part in spec.split(',').filter(|s| !s.trim().is_empty()) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("weight '{part}' is not kind=value")))?;
        let kind = parse_kind_name(name)?;
        let w: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad weight value '{value}'")))?;
        if w.is_nan() || w <= 0.0 {
            return Err(Error::Config(format!("weight for {name} must be positive")));
        }
        fit.weights[kind.index()] = w;
    }
    Ok(())
}

fn parse_kinds(spec: &str, fit: &mut FitConfig) -> Result<(), Error> {
    fit.enabled = [false; 6];
    for part in spec.split(',').filter(|s| !s.trim().is_empty()) {
        let kind = parse_kind_name(part)?;
        fit.enabled[kind.index()] = true;
    }
    if !fit.enabled.iter().any(|&e| e) {
        return Err(Error::Config("no primitive kinds enabled".into()));
    }
    Ok(())
}

fn cmd_decompose(args: DecomposeArgs) -> Result<(), Error> {
    if args.target < 1 {
        return Err(Error::Config("--target must be at least 1".into()));
    }
    if args.segments < 3 {
        return Err(Error::Config("--segments must be at least 3".into()));
    }
    if args.dedup_eps.is_nan() || args.dedup_eps < 0.0 {
        return Err(Error::Config("--dedup-eps must be nonnegative".into()));
    }
    if args.isect_cost == Some(0) {
        return Err(Error::Config("--isect-cost needs at least 1 sample".into()));
    }
    let mut fit = FitConfig::default();
    if let Some(spec) = &args.weights {
        parse_weights(spec, &mut fit)?;
    }
    if let Some(spec) = &args.kinds {
        parse_kinds(spec, &mut fit)?;
    }

    let start = Instant::now();
    let raw = load_mesh(&args.input)?;
    let mesh = deduplicate_vertices(&raw, args.dedup_eps);
    if let Some(rel) = args.min_extent_rel {
        if rel.is_nan() || rel <= 0.0 {
            return Err(Error::Config("--min-extent-rel must be positive".into()));
        }
        fit.min_extent = rel * mesh.bbox_diagonal();
    }
    let config = DecomposeConfig {
        target: args.target,
        max_excess_volume: args.max_excess_volume,
        fit,
        tangent_epsilon: args.tangent_eps,
        intersection: args.isect_cost.map(|sample_count| IntersectionCost {
            sample_count,
            seed: args.seed,
        }),
        cull_redundant: !args.no_cull,
    };
    let attrs = face_attributes(&mesh);
    let (set, stats) = decompose_with_stats(&mesh, &attrs, &config)?;
    let elapsed = start.elapsed();

    let file = schema::to_file(&set, args.include_faces);
    let json = schema::to_json(&file)?;
    match &args.out {
        Some(path) => std::fs::write(path, &json)?,
        None => print!("{json}"),
    }

    if let Some(mesh_path) = &args.mesh_out {
        let prims: Vec<Primitive> = set.primitives.iter().map(|p| p.primitive).collect();
        let mtl_path = mesh_path.with_extension("mtl");
        let mtl_name = mtl_path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "primitives.mtl".to_string());
        let mut obj = BufWriter::new(File::create(mesh_path)?);
        schema::export_obj(
            &prims,
            args.segments,
            args.circumscribed,
            &mtl_name,
            &mut obj,
        )?;
        obj.flush()?;
        let mut mtl = BufWriter::new(File::create(&mtl_path)?);
        schema::export_mtl(&mut mtl)?;
        mtl.flush()?;
    }

    // summary
    let counts = kind_counts(&set);
    let cost = byte_cost(set.primitives.iter().map(|p| p.primitive.kind()));
    let mut parts = Vec::new();
    for kind in ALL_KINDS {
        let c = counts[kind.index()];
        if c > 0 {
            parts.push(format!("{} {}", c, kind.as_str()));
        }
    }
    eprintln!(
        "primitives: {} ({}), faces: {}, merges: {}, culled: {}",
        set.primitives.len(),
        if parts.is_empty() {
            "none".to_string()
        } else {
            parts.join(", ")
        },
        mesh.faces.len(),
        stats.merges,
        stats.culled,
    );
    eprintln!("total bytes: {}", cost.total_bytes);
    eprintln!("wall time: {:.3} s", elapsed.as_secs_f64());
    Ok(())
}

fn cmd_metrics(args: MetricsArgs) -> Result<(), Error> {
    if args.samples < 1 {
        return Err(Error::Config("--samples must be at least 1".into()));
    }
    let input = load_mesh(&args.input)?;
    let is_json = args
        .collider
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let collider_mesh = if is_json {
        let text = std::fs::read_to_string(&args.collider)?;
        let file = schema::from_json(&text)?;
        let prims: Vec<Primitive> = file
            .primitives
            .iter()
            .map(|r| r.to_primitive())
            .collect::<Result<_, _>>()?;
        combined_mesh(&prims, args.segments, false)
    } else {
        load_mesh(&args.collider)?
    };
    let samples = sample_surface(&collider_mesh, args.samples, args.seed)?;
    let report = one_way_distance(&samples, &input, args.seed)?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    print!("{json}");
    if let Some(path) = &args.out {
        std::fs::write(path, &json)?;
    }
    Ok(())
}

fn cmd_cost(args: CostArgs) -> Result<(), Error> {
    let text = std::fs::read_to_string(&args.collider)?;
    let file = schema::from_json(&text)?;
    let report = byte_cost(file.primitives.iter().map(|r| r.kind()));
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    print!("{json}");
    Ok(())
}
