//! Stationary-process commands: `psd`, `wiener`, `synth`.

use std::path::PathBuf;

use clap::Args;

use gspkit::io;
use gspkit::spectral::decompose;
use gspkit::stochastic::{periodogram, synthesize_stationary, wiener_denoise, wiener_gains};
use gspkit::SignalMatrix;

use crate::context::RunContext;
use crate::flags::GraphArgs;
use crate::CliError;

use super::two_column_csv;

#[derive(Args, Debug)]
pub struct PsdArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Signal matrix CSV, one realization per column.
    #[arg(long)]
    pub signals: PathBuf,
}

impl PsdArgs {
    pub fn input_paths(&self) -> Vec<&PathBuf> {
        vec![&self.graph.graph, &self.signals]
    }
}

pub fn run_psd(args: &PsdArgs, ctx: &mut RunContext) -> Result<(), CliError> {
    let (_g, s) = args.graph.load(ctx)?;
    ctx.input("signals", &args.signals);
    let xs = SignalMatrix::new(io::read_signal_matrix(&args.signals)?)?;
    ctx.param("m", xs.m());
    let d = decompose(&s)?;
    let est = periodogram(&d, &xs)?;
    io::write_psd(&ctx.path("psd.json"), &est)?;
    ctx.wrote("psd.json");
    let rows = est.values().iter().enumerate().map(|(i, &p)| (i as f64, p));
    ctx.write_text("psd.csv", &two_column_csv("index,psd", rows))?;
    Ok(())
}

#[derive(Args, Debug)]
pub struct WienerArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// PSD JSON of the clean process.
    #[arg(long)]
    pub psd: PathBuf,
    /// White-noise variance.
    #[arg(long)]
    pub sigma2: f64,
    /// Noisy observation (one-column CSV).
    #[arg(long)]
    pub signal: PathBuf,
}

impl WienerArgs {
    pub fn input_paths(&self) -> Vec<&PathBuf> {
        vec![&self.graph.graph, &self.psd, &self.signal]
    }
}

pub fn run_wiener(args: &WienerArgs, ctx: &mut RunContext) -> Result<(), CliError> {
    let (_g, s) = args.graph.load(ctx)?;
    ctx.input("psd", &args.psd);
    ctx.input("signal", &args.signal);
    ctx.param("sigma2", args.sigma2);
    let psd = io::read_psd(&args.psd)?;
    let y = io::read_signal_vector(&args.signal)?;
    let d = decompose(&s)?;
    let denoised = wiener_denoise(&d, &psd, args.sigma2, &y.view())?;
    io::write_signal_vector(&ctx.path("denoised.csv"), &denoised.view())?;
    ctx.wrote("denoised.csv");
    let gains = wiener_gains(&psd, args.sigma2)?;
    let rows = gains.iter().enumerate().map(|(i, &g)| (i as f64, g));
    ctx.write_text("gains.csv", &two_column_csv("index,gain", rows))?;
    Ok(())
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// PSD JSON to synthesize under.
    #[arg(long)]
    pub psd: PathBuf,
    /// Number of realizations (columns).
    #[arg(long)]
    pub m: usize,
}

impl SynthArgs {
    pub fn input_paths(&self) -> Vec<&PathBuf> {
        vec![&self.graph.graph, &self.psd]
    }
}

pub fn run_synth(args: &SynthArgs, ctx: &mut RunContext) -> Result<(), CliError> {
    let (_g, s) = args.graph.load(ctx)?;
    ctx.input("psd", &args.psd);
    ctx.param("m", args.m);
    let psd = io::read_psd(&args.psd)?;
    let d = decompose(&s)?;
    let xs = synthesize_stationary(&d, &psd, args.m, ctx.seed())?;
    io::write_signal_matrix(&ctx.path("signals.csv"), &xs.values().view())?;
    ctx.wrote("signals.csv");
    Ok(())
}
