//! `memgain`: network sweeps, coding-gain estimates and theory curves.

mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use memgain_core::harness::{
    emit_theory_curve, json_rows, memory_count, run_coding_experiment, run_network_sweep,
    run_single, CodingConfig, ExperimentConfig, OutputFormat, Table,
};
use memgain_core::memcoder::MemoryDraw;

#[derive(Parser, Debug)]
#[command(name = "memgain", version, about, args_override_self = true)]
#[command(
    after_help = "Any subcommand also accepts --config FILE with `key = value` lines \
named after its flags; flags on the command line take precedence."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo network gain versus log_N(M).
    NetSweep(NetSweepArgs),
    /// Estimate the coding gain g over a grid of (n, m).
    CodeGain(CodeGainArgs),
    /// Closed-form gain curve versus log_N(M).
    Theory(TheoryArgs),
    /// One deployment: flow summary and every destination's effective distance.
    Single(SingleArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Args, Debug)]
struct Output {
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args, Debug)]
struct NetSweepArgs {
    #[arg(long, default_value_t = 1024)]
    nodes: usize,
    /// c in p = c ln N / N.
    #[arg(long, default_value_t = 2.0)]
    degree_coeff: f64,
    /// Per-link compression gain g of a memory.
    #[arg(long, default_value_t = 1.25)]
    gain: f64,
    /// Comma-separated exponents x, M = round(N^x).
    #[arg(long, value_delimiter = ',', default_value = "0,0.2,0.4,0.6,0.8,0.9,1")]
    exponents: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Print per-trial rows instead of aggregates (stdout only; with --out
    /// both tables are written).
    #[arg(long)]
    per_trial: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct CodeGainArgs {
    #[arg(long, default_value_t = 4)]
    alphabet: usize,
    /// Comma-separated sequence lengths n.
    #[arg(long, value_delimiter = ',', default_value = "256,1024,4096")]
    seq_len: Vec<usize>,
    /// Comma-separated memory lengths m.
    #[arg(long, value_delimiter = ',', default_value = "0,1024,65536")]
    mem_len: Vec<usize>,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    /// Number of sampled sources K.
    #[arg(long, default_value_t = 200)]
    sources: usize,
    /// Draws per source T.
    #[arg(long, default_value_t = 50)]
    draws: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Reuse one memorized sequence for all draws of a source.
    #[arg(long)]
    shared_memory: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct TheoryArgs {
    #[arg(long, default_value_t = 1024)]
    nodes: usize,
    #[arg(long, default_value_t = 1.25)]
    gain: f64,
    #[arg(long, value_delimiter = ',', default_value = "0,0.2,0.4,0.6,0.8,0.9,1")]
    exponents: Vec<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SingleArgs {
    #[arg(long, default_value_t = 1024)]
    nodes: usize,
    #[arg(long, default_value_t = 2.0)]
    degree_coeff: f64,
    #[arg(long, default_value_t = 1.25)]
    gain: f64,
    /// Number of memories; overrides --exponents.
    #[arg(long)]
    memories: Option<usize>,
    /// Single exponent x, M = round(N^x).
    #[arg(long, default_value = "0.9")]
    exponents: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

/// `run.csv` -> `run.<tag>.csv`.
fn sibling(path: &Path, tag: &str, ext: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}.{tag}.{ext}"))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn write_table<T: Table>(rows: &[T], format: OutputFormat, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            format.write(rows, &mut w)?;
            w.flush()?;
            info!("wrote {} rows to {}", rows.len(), p.display());
        }
        None => {
            let mut w = io::stdout().lock();
            format.write(rows, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn net_sweep(args: NetSweepArgs) -> Result<()> {
    let format = OutputFormat::from(args.output.format);
    let cfg = ExperimentConfig {
        nodes: args.nodes,
        degree_coeff: args.degree_coeff,
        gain: args.gain,
        mem_exponents: args.exponents,
        trials: args.trials,
        master_seed: args.seed,
        format,
        out: args.output.out,
    };
    cfg.validate()?;
    info!(
        "net-sweep N={} c={} g={} points={} trials={} seed={}",
        cfg.nodes,
        cfg.degree_coeff,
        cfg.gain,
        cfg.mem_exponents.len(),
        cfg.trials,
        cfg.master_seed
    );
    let start = Instant::now();
    let result = run_network_sweep(&cfg)?;
    info!("sweep finished in {:.2?}", start.elapsed());
    match &cfg.out {
        Some(path) => {
            write_table(&result.trials, format, Some(path))?;
            let agg = sibling(path, "agg", format.extension());
            write_table(&result.aggregates, format, Some(&agg))?;
        }
        None if args.per_trial => write_table(&result.trials, format, None)?,
        None => write_table(&result.aggregates, format, None)?,
    }
    Ok(())
}

fn code_gain(args: CodeGainArgs) -> Result<()> {
    let format = OutputFormat::from(args.output.format);
    let cfg = CodingConfig {
        alphabet: args.alphabet,
        seq_lens: args.seq_len,
        mem_lens: args.mem_len,
        epsilon: args.epsilon,
        sources: args.sources,
        draws: args.draws,
        seed: args.seed,
        memory: if args.shared_memory {
            MemoryDraw::Shared
        } else {
            MemoryDraw::Fresh
        },
    };
    cfg.validate()?;
    info!(
        "code-gain A={} n={:?} m={:?} eps={} K={} T={} seed={}",
        cfg.alphabet, cfg.seq_lens, cfg.mem_lens, cfg.epsilon, cfg.sources, cfg.draws, cfg.seed
    );
    let start = Instant::now();
    let rows = run_coding_experiment(&cfg)?;
    info!("estimates finished in {:.2?}", start.elapsed());
    write_table(&rows, format, args.output.out.as_deref())
}

fn theory(args: TheoryArgs) -> Result<()> {
    let rows = emit_theory_curve(args.nodes, args.gain, &args.exponents)?;
    write_table(&rows, args.output.format.into(), args.output.out.as_deref())
}

fn single(args: SingleArgs) -> Result<()> {
    let format = OutputFormat::from(args.output.format);
    if args.nodes < 2 {
        anyhow::bail!("need at least 2 vertices, got {}", args.nodes);
    }
    let m = match args.memories {
        Some(m) => m,
        None => {
            if !(0.0..=1.0).contains(&args.exponents) {
                anyhow::bail!("exponent must lie in [0, 1], got {}", args.exponents);
            }
            memory_count(args.nodes, args.exponents)
        }
    };
    info!(
        "single N={} c={} g={} M={} seed={}",
        args.nodes, args.degree_coeff, args.gain, m, args.seed
    );
    let run = run_single(args.nodes, args.degree_coeff, args.gain, m, args.seed)?;
    let summary = [run.summary];
    match (&args.output.out, format) {
        (Some(path), _) => {
            write_table(&summary, format, Some(path))?;
            let dest = sibling(path, "dest", format.extension());
            write_table(&run.destinations, format, Some(&dest))?;
        }
        (None, OutputFormat::Csv) => {
            let mut w = io::stdout().lock();
            format.write(&summary, &mut w)?;
            writeln!(w)?;
            format.write(&run.destinations, &mut w)?;
            w.flush()?;
        }
        (None, OutputFormat::Json) => {
            let doc = serde_json::json!({
                "summary": json_rows(&summary),
                "destinations": json_rows(&run.destinations),
            });
            let mut w = io::stdout().lock();
            serde_json::to_writer_pretty(&mut w, &doc)?;
            writeln!(w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn run() -> Result<()> {
    let args = config::expand(std::env::args_os().collect())?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            e.print()?;
            return Ok(());
        }
        Err(e) => {
            let text = e.render().to_string();
            let first = text.lines().next().unwrap_or_default();
            anyhow::bail!("{}", first.trim_start_matches("error: "));
        }
    };
    match cli.command {
        Command::NetSweep(a) => net_sweep(a),
        Command::CodeGain(a) => code_gain(a),
        Command::Theory(a) => theory(a),
        Command::Single(a) => single(a),
    }
}

// A closed downstream pipe (`memgain ... | head`) is not a failure.
fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        e.downcast_ref::<io::Error>()
            .is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
            || e.downcast_ref::<memgain_core::HarnessError>().is_some_and(|h| {
                matches!(h, memgain_core::HarnessError::Io(io) if io.kind() == io::ErrorKind::BrokenPipe)
            })
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) if is_broken_pipe(&err) => ExitCode::SUCCESS,
        Err(err) => {
            let msg = format!("{err:#}").replace('\n', " ");
            eprintln!("memgain: {msg}");
            ExitCode::FAILURE
        }
    }
}
