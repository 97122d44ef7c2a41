//! `capgen`: generate uniform random capacities and evaluate how uniform a
//! generator really is.
//!
//! Subcommands: `generate`, `eval`, `count`, `bench`, `analyze-structure`.
//! Exit codes: 0 success, 2 usage error, 1 runtime error.

mod analyze;
mod eval_cmd;
mod io;

use std::fmt;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};

use capgen_core::generators::{CapacityGenerator, Method};
use capgen_core::DEFAULT_SEED;

/// Marker for argument errors detected after parsing (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

#[derive(Parser)]
#[command(
    name = "capgen",
    version,
    about = "Uniform random generation of capacities on a finite set, with exact references, baselines, and uniformity diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Jsonl,
    JsonReport,
}

#[derive(Subcommand)]
enum Command {
    /// Generate capacities and write them to a file or stdout.
    Generate(GenerateArgs),
    /// Evaluate a capacity file: KL against the exact marginals (n ≤ 5),
    /// centroid error, and distributional symmetry checks.
    Eval(eval_cmd::EvalArgs),
    /// Print the exact number of linear extensions of the subset lattice.
    Count {
        /// Ground-set size (1..=6).
        #[arg(long)]
        n: u8,
    },
    /// Time the generators.
    Bench(BenchArgs),
    /// Inspect a two-layer window: profiles, regularity, closure,
    /// classification and selection probabilities.
    AnalyzeStructure(analyze::AnalyzeArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Ground-set size (1..=16; exact method requires n ≤ 5).
    #[arg(long)]
    n: u8,
    /// Generator: exact | twolayer | markov | randomnode.
    #[arg(long, default_value = "twolayer", value_parser = parse_method)]
    method: Method,
    /// Number of capacities to generate.
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Master seed; each sample uses an independent stream derived from
    /// (seed, sample index).
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Markov chain steps per sample (default: (2^n − 2)^3).
    #[arg(long)]
    markov_steps: Option<u64>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or jsonl.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Args)]
struct BenchArgs {
    /// Ground-set size.
    #[arg(long)]
    n: u8,
    /// Comma-separated methods to time.
    #[arg(long, default_value = "twolayer,markov", value_delimiter = ',', value_parser = parse_method)]
    method: Vec<Method>,
    /// Capacities per method.
    #[arg(long, default_value_t = 10_000)]
    count: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Markov chain steps per sample (default: (2^n − 2)^3).
    #[arg(long)]
    markov_steps: Option<u64>,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse::<Method>().map_err(|e| e.to_string())
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = if err.is::<UsageError>() { 2 } else { 1 };
            std::process::exit(code);
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Eval(args) => eval_cmd::run(args),
        Command::Count { n } => cmd_count(n),
        Command::Bench(args) => cmd_bench(args),
        Command::AnalyzeStructure(args) => analyze::run(args),
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    if args.count == 0 {
        return Err(usage("--count must be at least 1"));
    }
    if args.format == OutputFormat::JsonReport {
        return Err(usage("generate writes csv or jsonl; json-report is for eval"));
    }
    let generator = CapacityGenerator::new(args.method, args.n, args.markov_steps)
        .map_err(|e| usage(e.to_string()))?;
    let batch: Vec<capgen_core::Capacity64> =
        capgen_core::generators::generate_batch(&generator, args.count, args.seed)?;
    debug_assert!(batch.iter().all(capgen_core::Capacity64::is_valid));
    let mut sink = io::sink(args.out.as_deref())?;
    match args.format {
        OutputFormat::Csv => io::write_csv(&mut sink, &batch)?,
        OutputFormat::Jsonl => io::write_jsonl(&mut sink, &batch, args.seed)?,
        OutputFormat::JsonReport => unreachable!("rejected above"),
    }
    Ok(())
}

fn cmd_count(n: u8) -> Result<()> {
    let count = capgen_core::exact::count_extensions(n).map_err(|e| usage(e.to_string()))?;
    println!("{count}");
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    if args.count == 0 {
        return Err(usage("--count must be at least 1"));
    }
    if args.method.is_empty() {
        return Err(usage("--method must name at least one generator"));
    }
    for &m in &args.method {
        CapacityGenerator::new(m, args.n, args.markov_steps).map_err(|e| usage(e.to_string()))?;
    }
    let rows = capgen_core::eval::bench(
        &args.method,
        args.n,
        args.count,
        args.seed,
        args.markov_steps,
    )?;
    let cpus = std::thread::available_parallelism().map(|v| v.get()).unwrap_or(1);
    let machine = format!(
        "{} {} ({cpus} cpus)",
        std::env::consts::OS,
        std::env::consts::ARCH
    );
    println!("machine: {machine}");
    println!(
        "{:<12} {:>4} {:>10} {:>14} {:>16}",
        "method", "n", "count", "seconds", "per-sample (µs)"
    );
    for row in &rows {
        println!(
            "{:<12} {:>4} {:>10} {:>14.3} {:>16.2}",
            row.method.name(),
            row.n,
            row.count,
            row.elapsed.as_secs_f64(),
            row.per_sample_micros()
        );
    }
    let json = serde_json::json!({
        "command": "bench",
        "n": args.n,
        "count": args.count,
        "seed": args.seed,
        "markov_steps": args.markov_steps,
        "machine": { "os": std::env::consts::OS, "arch": std::env::consts::ARCH, "cpus": cpus },
        "rows": rows.iter().map(|r| serde_json::json!({
            "method": r.method.name(),
            "seconds": r.elapsed.as_secs_f64(),
            "per_sample_micros": r.per_sample_micros(),
        })).collect::<Vec<_>>(),
    });
    match args.out {
        Some(path) => std::fs::write(&path, serde_json::to_string_pretty(&json)?)?,
        None => println!("{}", serde_json::to_string_pretty(&json)?),
    }
    Ok(())
}
