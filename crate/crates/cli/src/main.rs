mod cmd;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chroma_core::protocol::Mode;
use chroma_core::record::{GraphSource, PartitionKind};

#[derive(Parser)]
#[command(
    name = "chroma",
    version,
    about = "Distributed speculative graph coloring"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Color a graph and write a JSON run record.
    Color(ColorArgs),
    /// Check a colors file against a graph.
    Verify(VerifyArgs),
    /// Sweep rank counts and repeats, printing CSV.
    Bench(BenchArgs),
    /// Write a generated graph to disk.
    Gen(GenArgs),
    /// Print graph statistics as JSON.
    Stats(SourceArgs),
}

#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
struct SourceArgs {
    /// Edge list, Matrix Market file or CSR cache.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// mesh:NX,NY,NZ | myciel:K | gnp:N,P[,SEED] | dag:N,P[,SEED]
    #[arg(long = "gen", value_parser = parse_source)]
    generator: Option<GraphSource>,
}

impl SourceArgs {
    fn source(&self) -> GraphSource {
        match (&self.graph, &self.generator) {
            (Some(path), _) => GraphSource::File { path: path.clone() },
            (None, Some(g)) => g.clone(),
            (None, None) => unreachable!("clap requires one source"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Args, Clone)]
struct RunArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value = "block", value_parser = parse_partition)]
    partition: PartitionKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "on")]
    recolor_degrees: Switch,
    /// Serial on-rank kernels; identical output on every run.
    #[arg(long)]
    deterministic: bool,
    /// Use the edge-based kernel when the maximum degree exceeds this.
    #[arg(long, default_value_t = 6000)]
    eb_threshold: usize,
    #[arg(long, default_value_t = 200)]
    max_rounds: usize,
    /// PD2: count and check only source-side colors.
    #[arg(long)]
    partial_count: bool,
}

#[derive(Args)]
struct ColorArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, default_value = "d1", value_parser = parse_mode)]
    mode: Mode,
    #[arg(long, default_value_t = 1)]
    ranks: usize,
    /// JSON run record destination.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Colors file destination (one color per line).
    #[arg(long)]
    colors_out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long)]
    colors: PathBuf,
    #[arg(long, value_parser = parse_verify_mode)]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// PD2: check only source-side colors.
    #[arg(long)]
    partial_count: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated modes.
    #[arg(long, default_value = "d1", value_delimiter = ',', value_parser = parse_mode)]
    mode: Vec<Mode>,
    /// ranks=R1,R2,...
    #[arg(long, default_value = "ranks=1,2,4,8", value_parser = parse_sweep)]
    sweep: Sweep,
    /// Runs per (mode, ranks); run i uses seed + i.
    #[arg(long, default_value_t = 1)]
    repeat: u64,
}

#[derive(Clone, Debug)]
struct Sweep(Vec<usize>);

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Edges,
    Csr,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long = "gen", value_parser = parse_source)]
    generator: GraphSource,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "edges")]
    format: GraphFormat,
}

fn parse_source(s: &str) -> Result<GraphSource, String> {
    s.parse().map_err(|e: chroma_core::Error| e.to_string())
}

fn parse_partition(s: &str) -> Result<PartitionKind, String> {
    s.parse().map_err(|e: chroma_core::Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: chroma_core::Error| e.to_string())
}

fn parse_verify_mode(s: &str) -> Result<Mode, String> {
    match parse_mode(s)? {
        Mode::D1TwoGhostLayers => Err("verify takes d1, d2 or pd2".into()),
        m => Ok(m),
    }
}

fn parse_sweep(s: &str) -> Result<Sweep, String> {
    let list = s
        .strip_prefix("ranks=")
        .ok_or_else(|| format!("expected ranks=R1,R2,..., got {s:?}"))?;
    let ranks = list
        .split(',')
        .map(|r| match r.trim().parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("bad rank count {r:?}")),
            Ok(n) => Ok(n),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Sweep(ranks))
}

fn init_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("CHROMA_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("CHROMA_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(cmd::EXIT_USAGE);
    }
    let code = match cli.command {
        Command::Color(a) => cmd::color(a),
        Command::Verify(a) => cmd::verify(a),
        Command::Bench(a) => cmd::bench(a),
        Command::Gen(a) => cmd::generate(a),
        Command::Stats(a) => cmd::stats(a),
    };
    ExitCode::from(code)
}
