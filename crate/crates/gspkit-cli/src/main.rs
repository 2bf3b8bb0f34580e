//! Batch front end for the gspkit library: each invocation reads graphs
//! and signals from files, runs one operation, and writes CSV/JSON
//! outputs plus a metadata record into the output directory.
//!
//! Exit codes: 0 success, 2 usage (bad flags, missing files), 3 data
//! (malformed or contract-violating inputs), 4 numerical failure. Errors
//! print a single `error[kind]: message` line on stderr.

mod cmd;
mod context;
mod flags;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use context::RunContext;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(gspkit::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    fn kind_name(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Lib(e) => match e.kind() {
                gspkit::ErrorKind::Data => "data",
                gspkit::ErrorKind::Numerical => "numerical",
            },
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(e) => match e.kind() {
                gspkit::ErrorKind::Data => 3,
                gspkit::ErrorKind::Numerical => 4,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(msg) => msg.clone(),
            CliError::Lib(e) => e.to_string(),
        }
    }
}

impl From<gspkit::Error> for CliError {
    fn from(e: gspkit::Error) -> Self {
        CliError::Lib(e)
    }
}

#[derive(Parser)]
#[command(name = "gspkit", version, about = "Graph signal processing toolbox")]
struct Cli {
    /// Seed for stochastic commands; recorded in metadata either way.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory output files are written into (created if missing).
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Suppress the per-run summary on stdout.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigendecomposition of a shift operator, optionally with a signal's transform
    Spectrum(cmd::spectrum::SpectrumArgs),
    /// Apply a graph filter (taps, response, kernel, Chebyshev, or IIR) to a signal
    Filter(cmd::filtering::FilterArgs),
    /// Reconstruct a signal from vertex samples (bandlimited or regularized)
    Interpolate(cmd::sampling::InterpolateArgs),
    /// Semi-supervised vertex labeling from a sparse label file
    Ssl(cmd::sampling::SslArgs),
    /// Sparse source identification through a known filter
    Sources(cmd::sampling::SourcesArgs),
    /// Periodogram PSD estimate from a signal matrix
    Psd(cmd::stochastic::PsdArgs),
    /// Wiener denoising under a stored PSD
    Wiener(cmd::stochastic::WienerArgs),
    /// Synthesize stationary signals with a prescribed PSD
    Synth(cmd::stochastic::SynthArgs),
    /// Learn a graph from data (smooth, corr, precision, or template mode)
    Learn(cmd::learn::LearnArgs),
    /// Fit or run vector autoregressions (fit-graph, fit-structural, predict)
    Var(cmd::timevertex::VarArgs),
    /// Build a product operator from a graph factor and a time factor
    Product(cmd::timevertex::ProductArgs),
    /// Joint graph-time Fourier transform of a vertex-time matrix
    Jointgft(cmd::timevertex::JointgftArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Filter(_) => "filter",
            Command::Interpolate(_) => "interpolate",
            Command::Ssl(_) => "ssl",
            Command::Sources(_) => "sources",
            Command::Psd(_) => "psd",
            Command::Wiener(_) => "wiener",
            Command::Synth(_) => "synth",
            Command::Learn(_) => "learn",
            Command::Var(_) => "var",
            Command::Product(_) => "product",
            Command::Jointgft(_) => "jointgft",
        }
    }

    /// Every input file the invocation references; existence is checked
    /// before dispatch so a typo cannot leave partial outputs behind.
    fn input_paths(&self) -> Vec<&PathBuf> {
        match self {
            Command::Spectrum(a) => a.input_paths(),
            Command::Filter(a) => a.input_paths(),
            Command::Interpolate(a) => a.input_paths(),
            Command::Ssl(a) => a.input_paths(),
            Command::Sources(a) => a.input_paths(),
            Command::Psd(a) => a.input_paths(),
            Command::Wiener(a) => a.input_paths(),
            Command::Synth(a) => a.input_paths(),
            Command::Learn(a) => a.input_paths(),
            Command::Var(a) => a.input_paths(),
            Command::Product(a) => a.input_paths(),
            Command::Jointgft(a) => a.input_paths(),
        }
    }

    fn run(&self, ctx: &mut RunContext) -> Result<(), CliError> {
        match self {
            Command::Spectrum(a) => cmd::spectrum::run(a, ctx),
            Command::Filter(a) => cmd::filtering::run(a, ctx),
            Command::Interpolate(a) => cmd::sampling::run_interpolate(a, ctx),
            Command::Ssl(a) => cmd::sampling::run_ssl(a, ctx),
            Command::Sources(a) => cmd::sampling::run_sources(a, ctx),
            Command::Psd(a) => cmd::stochastic::run_psd(a, ctx),
            Command::Wiener(a) => cmd::stochastic::run_wiener(a, ctx),
            Command::Synth(a) => cmd::stochastic::run_synth(a, ctx),
            Command::Learn(a) => cmd::learn::run(a, ctx),
            Command::Var(a) => cmd::timevertex::run_var(a, ctx),
            Command::Product(a) => cmd::timevertex::run_product(a, ctx),
            Command::Jointgft(a) => cmd::timevertex::run_jointgft(a, ctx),
        }
    }
}

/// `GSPKIT_THREADS` caps the library's internal parallelism by sizing
/// the global worker pool before any parallel region runs.
fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("GSPKIT_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage(format!("GSPKIT_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::usage(format!("cannot size the worker pool: {e}")))
}

fn try_run(cli: &Cli) -> Result<(), CliError> {
    configure_threads()?;
    for path in cli.command.input_paths() {
        if !path.is_file() {
            return Err(CliError::usage(format!(
                "input file {} does not exist",
                path.display()
            )));
        }
    }
    let mut ctx = RunContext::new(cli.command.name(), &cli.out_dir, cli.seed, cli.quiet)?;
    cli.command.run(&mut ctx)?;
    ctx.finish()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match try_run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.kind_name(), e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
