use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde::Serialize;

use netfractal::dimension::{
    analyze_connected, Analysis, AnalysisConfig, DEFAULT_MAX_POINTS, DEFAULT_SEED, DEFAULT_TRIALS,
};
use netfractal::metric::{MetricGraph, DEFAULT_MATRIX_CAP};
use netfractal::{
    generate_sierpinski, karate_fixture, largest_component, load_edge_list, Error, Graph,
    LoadOptions, MetricKind,
};

const EXIT_USAGE: u8 = 2;
const EXIT_ANALYSIS: u8 = 3;

#[derive(Parser)]
#[command(
    name = "netfractal",
    version,
    about = "Fractal dimension of networks by box covering"
)]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a network and write it as an edge list.
    Gen(GenArgs),
    /// Estimate the dimension with one method.
    Dim(DimArgs),
    /// Run both methods on the same network and seed.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Sierpinski,
}

#[derive(Args)]
struct GenArgs {
    kind: GenKind,
    #[arg(long)]
    level: u32,
    /// Output path; defaults to `sierpinski-L<level>.txt`.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone, Serialize)]
#[group(id = "source", required = true, multiple = false)]
struct SourceArgs {
    /// Whitespace-separated edge list.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Use the generated Sierpinski network of this level.
    #[arg(long)]
    sierpinski: Option<u32>,
    /// Use the built-in karate club network.
    #[arg(long)]
    karate: bool,
}

#[derive(Args, Clone, Serialize)]
struct InputArgs {
    #[command(flatten)]
    #[serde(flatten)]
    source: SourceArgs,
    #[arg(long, default_value = "#")]
    comment_prefix: String,
    /// Field delimiter; whitespace when omitted.
    #[arg(long)]
    delimiter: Option<char>,
}

#[derive(Args, Clone, Serialize)]
struct RunArgs {
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_POINTS)]
    max_points: usize,
    /// Inclusive box-size range for the regression, as `LO,HI`.
    #[arg(long, value_parser = parse_range)]
    fit_range: Option<(f64, f64)>,
    /// Limit on stored distance cells.
    #[arg(long, default_value_t = DEFAULT_MATRIX_CAP)]
    matrix_cap: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "NETFRACTAL_THREADS")]
    threads: Option<usize>,
    /// Directory for default output files.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Write the distance matrix as CSV (debugging aid).
    #[arg(long)]
    dump_matrix: Option<PathBuf>,
}

#[derive(Args, Clone, Serialize)]
struct DimArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "repulsion")]
    method: Method,
    #[command(flatten)]
    run: RunArgs,
    /// Scaling CSV path; defaults to `<out-dir>/<dataset>.<method>.csv`.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Summary JSON path; defaults to `<out-dir>/<dataset>.<method>.json`.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Clone, Serialize)]
struct CompareArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Repulsion,
    Hop,
}

impl From<Method> for MetricKind {
    fn from(m: Method) -> Self {
        match m {
            Method::Repulsion => MetricKind::Repulsion,
            Method::Hop => MetricKind::Hop,
        }
    }
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected LO,HI")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if !(lo > 0.0 && lo <= hi) {
        return Err("need 0 < LO <= HI".into());
    }
    Ok((lo, hi))
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::NoEdges
            | Error::EmptyGraph
            | Error::LevelAboveCap { .. }
            | Error::NodeOutOfRange { .. }
            | Error::InvalidArgument(_)
            | Error::Io(_) => EXIT_USAGE,
            _ => EXIT_ANALYSIS,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: format!("{}: {e}", path.display()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match cli.command {
        Command::Gen(args) => cmd_gen(&args),
        Command::Dim(args) => with_threads(args.run.threads, || cmd_dim(&args)),
        Command::Compare(args) => with_threads(args.run.threads, || cmd_compare(&args)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn with_threads(
    threads: Option<usize>,
    f: impl FnOnce() -> Result<(), Failure> + Send,
) -> Result<(), Failure> {
    match threads {
        None => f(),
        Some(0) => Err(Failure {
            code: EXIT_USAGE,
            message: "--threads must be at least 1".into(),
        }),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure {
                    code: EXIT_USAGE,
                    message: e.to_string(),
                })?;
            pool.install(f)
        }
    }
}

fn cmd_gen(args: &GenArgs) -> Result<(), Failure> {
    let GenKind::Sierpinski = args.kind;
    let module = generate_sierpinski(args.level)?;
    let path = args
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("sierpinski-L{}.txt", args.level)));
    let file = File::create(&path).map_err(|e| io_failure(&path, e))?;
    module
        .graph
        .write_edge_list(BufWriter::new(file))
        .map_err(|e| io_failure(&path, e))?;
    println!(
        "wrote {}: {} nodes, {} edges",
        path.display(),
        module.graph.node_count(),
        module.graph.edge_count()
    );
    Ok(())
}

/// The analyzed network after component extraction.
struct Dataset {
    name: String,
    graph: Graph,
    input_nodes: usize,
    input_edges: usize,
    dropped_edges: usize,
    discarded_nodes: usize,
}

fn load_dataset(input: &InputArgs) -> Result<Dataset, Failure> {
    let (name, graph, dropped_edges) = if let Some(path) = &input.source.input {
        let file = File::open(path).map_err(|e| io_failure(path, e))?;
        let options = LoadOptions {
            comment_prefix: input.comment_prefix.clone(),
            delimiter: input.delimiter,
        };
        let loaded = load_edge_list(BufReader::new(file), &options).map_err(|e| match e {
            Error::Io(io) => io_failure(path, io),
            other => {
                let mut f = Failure::from(other);
                f.message = format!("{}: {}", path.display(), f.message);
                f
            }
        })?;
        if loaded.dropped.total() > 0 {
            log::warn!(
                "dropped {} duplicate edges and {} self-loops",
                loaded.dropped.duplicates,
                loaded.dropped.self_loops
            );
        }
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "input".into());
        (name, loaded.graph, loaded.dropped.total())
    } else if let Some(level) = input.source.sierpinski {
        (
            format!("sierpinski-L{level}"),
            generate_sierpinski(level)?.graph,
            0,
        )
    } else {
        ("karate".to_string(), karate_fixture(), 0)
    };
    let input_nodes = graph.node_count();
    let input_edges = graph.edge_count();
    let (component, discarded_nodes) = largest_component(&graph)?;
    if discarded_nodes > 0 {
        log::warn!(
            "input is disconnected; analyzing the largest component ({} of {} nodes)",
            component.node_count(),
            input_nodes
        );
    }
    info!(
        "{name}: {} nodes, {} edges",
        component.node_count(),
        component.edge_count()
    );
    Ok(Dataset {
        name,
        graph: component,
        input_nodes,
        input_edges,
        dropped_edges,
        discarded_nodes,
    })
}

fn analysis_config(method: MetricKind, run: &RunArgs) -> AnalysisConfig {
    AnalysisConfig {
        method,
        trials: run.trials,
        seed: run.seed,
        max_points: run.max_points,
        fit_range: run.fit_range,
        matrix_cap: run.matrix_cap,
    }
}

#[derive(Serialize)]
struct MethodResult {
    #[serde(flatten)]
    estimate: netfractal::DimensionEstimate,
    diameter: u64,
    box_sizes: Vec<u64>,
    selection: netfractal::SelectionMode,
    csv: PathBuf,
}

#[derive(Serialize)]
struct RunSummary<'a, C: Serialize> {
    tool: &'static str,
    version: &'static str,
    dataset: &'a str,
    nodes: usize,
    edges: usize,
    input_nodes: usize,
    input_edges: usize,
    dropped_edges: usize,
    discarded_nodes: usize,
    results: Vec<MethodResult>,
    wall_seconds: f64,
    config: &'a C,
}

fn run_method(
    data: &Dataset,
    method: MetricKind,
    run: &RunArgs,
    csv_path: &Path,
) -> Result<MethodResult, Failure> {
    if run.trials == 0 {
        return Err(Error::InvalidArgument("--trials must be at least 1".into()).into());
    }
    if let Some(path) = &run.dump_matrix {
        let dm = MetricGraph::new(&data.graph, method)?.all_pairs_capped(run.matrix_cap)?;
        let path = if method == MetricKind::Hop && path.extension().is_some() {
            path.with_extension(format!(
                "hop.{}",
                path.extension().unwrap().to_string_lossy()
            ))
        } else {
            path.clone()
        };
        let file = File::create(&path).map_err(|e| io_failure(&path, e))?;
        dm.write_csv(BufWriter::new(file))
            .map_err(|e| io_failure(&path, e))?;
    }
    let Analysis {
        diameter,
        schedule,
        series,
        estimate,
        ..
    } = analyze_connected(&data.graph, &analysis_config(method, run))?;
    let file = File::create(csv_path).map_err(|e| io_failure(csv_path, e))?;
    series.write_csv(BufWriter::new(file))?;
    Ok(MethodResult {
        estimate,
        diameter,
        box_sizes: schedule.values,
        selection: schedule.selection,
        csv: csv_path.to_path_buf(),
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let file = File::create(path).map_err(|e| io_failure(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| io_failure(path, e))?;
    writeln!(w)
        .and_then(|_| w.flush())
        .map_err(|e| io_failure(path, e))
}

fn cmd_dim(args: &DimArgs) -> Result<(), Failure> {
    let start = Instant::now();
    let data = load_dataset(&args.input)?;
    let method = MetricKind::from(args.method);
    let csv = args
        .csv
        .clone()
        .unwrap_or_else(|| args.run.out_dir.join(format!("{}.{method}.csv", data.name)));
    let json = args.json.clone().unwrap_or_else(|| {
        args.run
            .out_dir
            .join(format!("{}.{method}.json", data.name))
    });
    let result = run_method(&data, method, &args.run, &csv)?;
    println!(
        "{} ({} nodes, {} edges) {method}: D_F = {:.4} ± {:.4} (r² = {:.4}, {} points)",
        data.name,
        data.graph.node_count(),
        data.graph.edge_count(),
        result.estimate.dimension,
        result.estimate.dimension_std,
        result.estimate.r_squared,
        result.estimate.points_used
    );
    let summary = summary(&data, vec![result], start, args);
    write_json(&json, &summary)
}

fn cmd_compare(args: &CompareArgs) -> Result<(), Failure> {
    let start = Instant::now();
    let data = load_dataset(&args.input)?;
    let mut results = Vec::new();
    for method in [MetricKind::Repulsion, MetricKind::Hop] {
        let csv = args.run.out_dir.join(format!("{}.{method}.csv", data.name));
        results.push(run_method(&data, method, &args.run, &csv)?);
    }
    println!(
        "{} ({} nodes, {} edges)",
        data.name,
        data.graph.node_count(),
        data.graph.edge_count()
    );
    println!(
        "{:<10} {:>10} {:>10} {:>8} {:>7}",
        "method", "D_F", "std", "r2", "points"
    );
    for r in &results {
        println!(
            "{:<10} {:>10.4} {:>10.4} {:>8.4} {:>7}",
            r.estimate.method.as_str(),
            r.estimate.dimension,
            r.estimate.dimension_std,
            r.estimate.r_squared,
            r.estimate.points_used
        );
    }
    let json = args.run.out_dir.join(format!("{}.compare.json", data.name));
    let summary = summary(&data, results, start, args);
    write_json(&json, &summary)
}

fn summary<'a, C: Serialize>(
    data: &'a Dataset,
    results: Vec<MethodResult>,
    start: Instant,
    config: &'a C,
) -> RunSummary<'a, C> {
    RunSummary {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        dataset: &data.name,
        nodes: data.graph.node_count(),
        edges: data.graph.edge_count(),
        input_nodes: data.input_nodes,
        input_edges: data.input_edges,
        dropped_edges: data.dropped_edges,
        discarded_nodes: data.discarded_nodes,
        results,
        wall_seconds: start.elapsed().as_secs_f64(),
        config,
    }
}
