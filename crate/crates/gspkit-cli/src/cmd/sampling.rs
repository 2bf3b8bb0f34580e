//! Sampling-domain commands: `interpolate`, `ssl`, and `sources`.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use ndarray::Array1;
use serde::Serialize;

use gspkit::filters::{filter_matrix, GraphFilter};
use gspkit::inverse::{
    identify_sources, interpolate_bandlimited, interpolate_regularized, ssl_labels,
    BandlimitedModel, SamplingSet,
};
use gspkit::io;
use gspkit::spectral::decompose;

use crate::context::RunContext;
use crate::flags::{decompose_if, FilterSpec, GraphArgs};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InterpolateMode {
    Bandlimited,
    Regularized,
}

#[derive(Args, Debug)]
pub struct InterpolateArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_enum)]
    pub mode: InterpolateMode,
    /// Sampling-set JSON ({"n", "indices"}).
    #[arg(long)]
    pub samples: PathBuf,
    /// Full-length signal CSV; values are read at the sampled vertices,
    /// the rest serve as truth for the reported reconstruction error.
    #[arg(long)]
    pub signal: PathBuf,
    /// Bandwidth for bandlimited mode.
    #[arg(long)]
    pub k: Option<usize>,
    /// Regularization weight for regularized mode.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[command(flatten)]
    pub filter: FilterSpec,
}

impl InterpolateArgs {
    pub fn input_paths(&self) -> Vec<&PathBuf> {
        vec![&self.graph.graph, &self.samples, &self.signal]
    }
}

pub fn run_interpolate(args: &InterpolateArgs, ctx: &mut RunContext) -> Result<(), CliError> {
    let (_g, s) = args.graph.load(ctx)?;
    ctx.input("samples", &args.samples);
    ctx.input("signal", &args.signal);
    let m = io::read_sampling_set(&args.samples)?;
    let x = io::read_signal_vector(&args.signal)?;
    let x_m = m.sample(&x.view())?;
    let reconstructed = match args.mode {
        InterpolateMode::Bandlimited => {
            ctx.param("mode", "bandlimited");
            let k = args
                .k
                .ok_or_else(|| CliError::usage("bandlimited mode needs --k"))?;
            ctx.param("k", k);
            let d = decompose(&s)?;
            let b = BandlimitedModel::new(&d, k)?;
            interpolate_bandlimited(&b, &m, &x_m.view())?
        }
        InterpolateMode::Regularized => {
            ctx.param("mode", "regularized");
            let alpha = args
                .alpha
                .ok_or_else(|| CliError::usage("regularized mode needs --alpha"))?;
            ctx.param("alpha", alpha);
            if args.filter.is_empty() {
                return Err(CliError::usage(
                    "regularized mode needs a filter (e.g. --taps 0,1)",
                ));
            }
            let d = decompose_if(&s, args.filter.needs_decomposition())?;
            let h = args.filter.graph_filter(ctx, d.as_ref())?;
            interpolate_regularized(&s, d.as_ref(), &h, alpha, &m, &x_m.view())?
        }
    };
    io::write_signal_vector(&ctx.path("interpolated.csv"), &reconstructed.view())?;
    ctx.wrote("interpolated.csv");
    let err = reconstructed
        .iter()
        .zip(x.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    ctx.result("reconstruction_error", err);
    Ok(())
}

#[derive(Args, Debug)]
pub struct SslArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Known labels as `vertex,label` CSV (labels are +-1).
    #[arg(long)]
    pub labels: PathBuf,
    /// Penalty weight.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Penalty filter; defaults to the operator itself (--taps 0,1).
    #[command(flatten)]
    pub filter: FilterSpec,
}

impl SslArgs {
    pub fn input_paths(&self) -> Vec<&PathBuf> {
        vec![&self.graph.graph, &self.labels]
    }
}

pub fn run_ssl(args: &SslArgs, ctx: &mut RunContext) -> Result<(), CliError> {
    let (g, s) = args.graph.load(ctx)?;
    ctx.input("labels", &args.labels);
    ctx.param("alpha", args.alpha);
    let mut pairs = io::read_labels(&args.labels)?;
    pairs.sort_by_key(|&(v, _)| v);
    let indices: Vec<usize> = pairs.iter().map(|&(v, _)| v).collect();
    let values = Array1::from_iter(pairs.iter().map(|&(_, l)| l));
    let labeled = SamplingSet::new(g.n_vertices(), indices)?;
    let (hfilt, d) = if args.filter.is_empty() {
        ctx.param("taps", vec![0.0, 1.0]);
        (GraphFilter::taps(vec![0.0, 1.0])?, None)
    } else {
        let d = decompose_if(&s, args.filter.needs_decomposition())?;
        (args.filter.graph_filter(ctx, d.as_ref())?, d)
    };
    let (scores, classes) = ssl_labels(&s, d.as_ref(), &hfilt, args.alpha, &labeled, &values.view())?;
    io::write_signal_vector(&ctx.path("scores.csv"), &scores.view())?;
    ctx.wrote("scores.csv");
    io::write_signal_vector(&ctx.path("classes.csv"), &classes.view())?;
    ctx.wrote("classes.csv");
    let positive = classes.iter().filter(|&&c| c > 0.0).count();
    ctx.result("positive_fraction", positive as f64 / classes.len() as f64);
    Ok(())
}

#[derive(Args, Debug)]
pub struct SourcesArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Observed signal (one-column CSV).
    #[arg(long)]
    pub signal: PathBuf,
    /// Number of sources to select.
    #[arg(long)]
    pub k: usize,
    /// The diffusion filter the sources passed through.
    #[command(flatten)]
    pub filter: FilterSpec,
}

impl SourcesArgs {
    pub fn input_paths(&self) -> Vec<&PathBuf> {
        vec![&self.graph.graph, &self.signal]
    }
}

#[derive(Serialize)]
struct SourcesDocument {
    support: Vec<usize>,
    values: Vec<f64>,
    residual: f64,
    mutual_coherence: f64,
}

pub fn run_sources(args: &SourcesArgs, ctx: &mut RunContext) -> Result<(), CliError> {
    let (_g, s) = args.graph.load(ctx)?;
    ctx.input("signal", &args.signal);
    ctx.param("k", args.k);
    let x = io::read_signal_vector(&args.signal)?;
    if args.filter.is_empty() {
        return Err(CliError::usage(
            "sources needs the diffusion filter (e.g. --taps 1,0.5)",
        ));
    }
    let d = decompose_if(&s, args.filter.needs_decomposition())?;
    let filt = args.filter.graph_filter(ctx, d.as_ref())?;
    let h = filter_matrix(&s, d.as_ref(), &filt)?;
    let found = identify_sources(&h.view(), &x.view(), args.k)?;

    let mut table = String::from("vertex,coefficient\n");
    for (v, c) in found.support.iter().zip(found.values.iter()) {
        table.push_str(&format!("{v},{}\n", io::fmt_f64(*c)));
    }
    ctx.write_text("support.csv", &table)?;

    let doc = SourcesDocument {
        support: found.support.clone(),
        values: found.values.clone(),
        residual: found.residual,
        mutual_coherence: found.mutual_coherence,
    };
    let text = serde_json::to_string_pretty(&doc)
        .map_err(|e| CliError::usage(format!("cannot encode sources: {e}")))?;
    ctx.write_text("sources.json", &format!("{text}\n"))?;
    ctx.result("residual", found.residual);
    ctx.result("mutual_coherence", found.mutual_coherence);
    Ok(())
}
