use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use swoop_core::engine::{Algorithm, EngineConfig, JoinEngine};
use swoop_core::harness::{
    compare, generate_synthetic, prepare, run, write_comparison_csv, write_metrics_csv, write_snapshots,
    ContinuousJoin, GeneratorConfig, HarnessError, PreparedStream, Profile, RunOptions,
};
use swoop_core::similarity::SimilarityKind;
use swoop_core::stream::{parse_stream, RawRecord};

/// Continuous top-k set similarity joins over sliding windows.
#[derive(Parser, Debug)]
#[command(name = "swoop", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one engine over a stream and report metrics.
    Run(RunArgs),
    /// Run several algorithms over the same stream and check their results agree.
    Compare(CompareArgs),
    /// Write a synthetic stream.
    Generate(GenerateArgs),
}

#[derive(Args, Debug)]
struct JoinArgs {
    /// Number of result pairs.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Sliding window length in seconds.
    #[arg(long = "window-secs")]
    window_secs: f64,
    /// jaccard, cosine, dice, overlap or hamming.
    #[arg(long, default_value = "jaccard")]
    sim: SimilarityKind,
    /// Input stream file; give it twice together with --rr-join.
    #[arg(long, required = true)]
    input: Vec<PathBuf>,
    /// Join two streams against each other instead of one stream with itself.
    #[arg(long)]
    rr_join: bool,
    /// Record the top-k after every N-th event.
    #[arg(long)]
    snapshot_every: Option<usize>,
    /// Where to write snapshot lines `t_J i j sim e`.
    #[arg(long)]
    snapshots_out: Option<PathBuf>,
    /// Where to write the metrics CSV (default: standard output).
    #[arg(long)]
    metrics_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// base, swoop or swoop-noopt.
    #[arg(long, default_value = "swoop")]
    algo: Algorithm,
    #[command(flatten)]
    join: JoinArgs,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Algorithms to compare, comma separated or repeated.
    #[arg(long, value_delimiter = ',', default_value = "base,swoop,swoop-noopt")]
    algo: Vec<Algorithm>,
    #[command(flatten)]
    join: JoinArgs,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// uniform, zipf or late-hot-token.
    #[arg(long, default_value = "uniform")]
    profile: Profile,
    /// Number of sets.
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    /// Number of distinct ordinary tokens.
    #[arg(long, default_value_t = 100_000)]
    universe: usize,
    #[arg(long, default_value_t = 5)]
    min_len: usize,
    #[arg(long, default_value_t = 15)]
    max_len: usize,
    /// Sets per second.
    #[arg(long, default_value_t = 100.0)]
    rate: f64,
    /// Fraction of sets that are perturbed copies of a recent set.
    #[arg(long, default_value_t = 0.0)]
    dup_rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (default: standard output).
    #[arg(long)]
    output: Option<PathBuf>,
}

fn create(path: &Path) -> Result<File> {
    File::create(path).with_context(|| format!("cannot create {}", path.display()))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn load(join: &JoinArgs) -> Result<PreparedStream> {
    let expected = if join.rr_join { 2 } else { 1 };
    if join.input.len() != expected {
        bail!(
            "{} expects {expected} --input file(s), got {}",
            if join.rr_join { "--rr-join" } else { "a self-join" },
            join.input.len()
        );
    }
    let mut streams: Vec<Vec<RawRecord>> = Vec::new();
    for path in &join.input {
        let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        streams.push(parse_stream(BufReader::new(file)).with_context(|| format!("in {}", path.display()))?);
    }
    Ok(prepare(&streams))
}

fn engine_config(algo: Algorithm, join: &JoinArgs) -> EngineConfig {
    let cfg = EngineConfig::new(algo, join.k, join.window_secs, join.sim);
    if join.rr_join {
        cfg.rr_join()
    } else {
        cfg
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let cfg = engine_config(args.algo, &args.join);
    cfg.validate()?;
    let stream = load(&args.join)?;
    let opts = RunOptions {
        snapshot_every: args.join.snapshot_every,
    };
    let out = run(cfg, &stream, opts)?;
    if let Some(path) = &args.join.snapshots_out {
        write_snapshots(io::BufWriter::new(create(path)?), &out.snapshots)?;
    }
    write_metrics_csv(output(args.join.metrics_out.as_deref())?, &[out.metrics])?;
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let mut engines: Vec<Box<dyn ContinuousJoin>> = Vec::new();
    for &algo in &args.algo {
        let cfg = engine_config(algo, &args.join);
        engines.push(Box::new(JoinEngine::new(cfg)?));
    }
    let stream = load(&args.join)?;
    let opts = RunOptions {
        snapshot_every: args.join.snapshot_every,
    };
    let outputs = compare(engines, &stream, opts)?;
    if let Some(path) = &args.join.snapshots_out {
        write_snapshots(io::BufWriter::new(create(path)?), &outputs[0].snapshots)?;
    }
    let metrics: Vec<_> = outputs.into_iter().map(|o| o.metrics).collect();
    write_comparison_csv(output(args.join.metrics_out.as_deref())?, &metrics)?;
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let cfg = GeneratorConfig {
        profile: args.profile,
        n: args.n,
        universe: args.universe,
        min_len: args.min_len,
        max_len: args.max_len,
        rate: args.rate,
        dup_rate: args.dup_rate,
        seed: args.seed,
    };
    generate_synthetic(&cfg, output(args.output.as_deref())?)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Generate(a) => cmd_generate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if matches!(
                e.downcast_ref::<HarnessError>(),
                Some(HarnessError::SnapshotMismatch { .. })
            ) {
                ExitCode::from(3)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
