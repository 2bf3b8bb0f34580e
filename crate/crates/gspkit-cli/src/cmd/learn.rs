//! `learn`: topology inference from data, with an optional F1 sweep
//! against a known truth graph.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use clap::{Args, ValueEnum};

use gspkit::io::{self, DiagnosticsDocument};
use gspkit::topology::{
    correlation_graph, learn_smooth_laplacian, precision_graph, spectral_template_adjacency,
};
use gspkit::{Graph, SignalMatrix};

use crate::context::RunContext;
use crate::CliError;

use super::two_column_csv;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LearnMode {
    /// Smoothness-regularized Laplacian learning.
    Smooth,
    /// Thresholded absolute correlation.
    Corr,
    /// Thresholded (ridge-stabilized) precision matrix.
    Precision,
    /// Spectral templates: adjacency from given eigenvectors.
    Template,
}

#[derive(Args, Debug)]
pub struct LearnArgs {
    #[arg(long, value_enum)]
    pub mode: LearnMode,
    /// Data matrix CSV (vertices x realizations); all modes except
    /// template.
    #[arg(long)]
    pub signals: Option<PathBuf>,
    /// Eigenvector matrix CSV for template mode (orthonormal columns).
    #[arg(long)]
    pub eigenvectors: Option<PathBuf>,
    /// Smoothness trade-off (smooth mode).
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    /// Laplacian trace budget (smooth mode); defaults to the vertex
    /// count.
    #[arg(long)]
    pub norm_trace: Option<f64>,
    #[arg(long, default_value_t = 2000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Edge-inclusion threshold (corr and precision modes).
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Diagonal stabilizer added before inversion (precision mode).
    #[arg(long, default_value_t = 0.0)]
    pub ridge: f64,
    /// Subgradient step scale (template mode).
    #[arg(long, default_value_t = 0.05)]
    pub sparsity_weight: f64,
    /// Also sweep edge thresholds against --truth and write an
    /// F1-vs-threshold table.
    #[arg(long)]
    pub sweep: bool,
    /// Truth graph for the sweep (edge-list CSV).
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

impl LearnArgs {
    pub fn input_paths(&self) -> Vec<&PathBuf> {
        let mut v = Vec::new();
        v.extend(self.signals.as_ref());
        v.extend(self.eigenvectors.as_ref());
        v.extend(self.truth.as_ref());
        v
    }

    fn signals(&self, ctx: &mut RunContext) -> Result<SignalMatrix, CliError> {
        let path = self
            .signals
            .as_ref()
            .ok_or_else(|| CliError::usage("this learn mode needs --signals"))?;
        ctx.input("signals", path);
        Ok(SignalMatrix::new(io::read_signal_matrix(path)?)?)
    }

    fn threshold(&self) -> Result<f64, CliError> {
        self.threshold
            .ok_or_else(|| CliError::usage("this learn mode needs --threshold"))
    }
}

pub fn run(args: &LearnArgs, ctx: &mut RunContext) -> Result<(), CliError> {
    ctx.param("mode", format!("{:?}", args.mode).to_lowercase());
    let (graph, diagnostics) = match args.mode {
        LearnMode::Smooth => {
            let xs = args.signals(ctx)?;
            let norm_trace = args.norm_trace.unwrap_or(xs.n() as f64);
            ctx.param("beta", args.beta);
            ctx.param("norm_trace", norm_trace);
            ctx.param("max_iters", args.max_iters);
            ctx.param("tol", args.tol);
            let learned =
                learn_smooth_laplacian(&xs, args.beta, norm_trace, args.max_iters, args.tol)?;
            (
                learned.graph().clone(),
                Some(DiagnosticsDocument::new(learned.objective_trace(), learned.diagnostics())),
            )
        }
        LearnMode::Corr => {
            let xs = args.signals(ctx)?;
            let tau = args.threshold()?;
            ctx.param("threshold", tau);
            (correlation_graph(&xs, tau)?, None)
        }
        LearnMode::Precision => {
            let xs = args.signals(ctx)?;
            let tau = args.threshold()?;
            ctx.param("threshold", tau);
            ctx.param("ridge", args.ridge);
            (precision_graph(&xs, args.ridge, tau)?, None)
        }
        LearnMode::Template => {
            let path = args
                .eigenvectors
                .as_ref()
                .ok_or_else(|| CliError::usage("template mode needs --eigenvectors"))?;
            ctx.input("eigenvectors", path);
            ctx.param("sparsity_weight", args.sparsity_weight);
            ctx.param("max_iters", args.max_iters);
            let vhat = io::read_signal_matrix(path)?;
            let learned =
                spectral_template_adjacency(&vhat.view(), args.sparsity_weight, args.max_iters)?;
            (
                learned.graph().clone(),
                Some(DiagnosticsDocument::new(learned.objective_trace(), learned.diagnostics())),
            )
        }
    };

    io::write_graph(&ctx.path("learned.csv"), &graph)?;
    ctx.wrote("learned.csv");
    ctx.wrote("learned.json");
    ctx.result("edges", graph.edges().len() as f64);
    if let Some(doc) = diagnostics {
        io::write_diagnostics(&ctx.path("diagnostics.json"), &doc)?;
        ctx.wrote("diagnostics.json");
    }

    if args.sweep {
        let truth_path = args
            .truth
            .as_ref()
            .ok_or_else(|| CliError::usage("--sweep needs --truth"))?;
        ctx.input("truth", truth_path);
        let truth = io::read_graph(truth_path)?;
        let rows = f1_sweep(&graph, &truth);
        let best = rows.iter().fold((0.0, 0.0), |acc, &(t, f1)| if f1 > acc.1 { (t, f1) } else { acc });
        ctx.write_text("sweep.csv", &two_column_csv("threshold,f1", rows.into_iter()))?;
        ctx.result("best_f1", best.1);
        ctx.result("best_threshold", best.0);
    }
    Ok(())
}

fn pair(src: usize, dst: usize) -> (usize, usize) {
    (src.min(dst), src.max(dst))
}

/// Edge-support F1 at every distinct magnitude level of the learned
/// weights (an edge survives level `t` when `|w| > t - 1e-15`, so the
/// level at a weight keeps that weight).
fn f1_sweep(learned: &Graph, truth: &Graph) -> Vec<(f64, f64)> {
    let weights: BTreeMap<(usize, usize), f64> =
        learned.edges().iter().map(|e| (pair(e.src, e.dst), e.weight.abs())).collect();
    let truth_set: BTreeSet<(usize, usize)> =
        truth.edges().iter().map(|e| pair(e.src, e.dst)).collect();
    let mut levels: Vec<f64> = weights.values().copied().collect();
    levels.push(0.0);
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    levels
        .into_iter()
        .map(|t| {
            let predicted: BTreeSet<(usize, usize)> = weights
                .iter()
                .filter(|(_, &w)| w > t - 1e-15)
                .map(|(&p, _)| p)
                .collect();
            let tp = predicted.intersection(&truth_set).count() as f64;
            let fp = predicted.difference(&truth_set).count() as f64;
            let missed = truth_set.difference(&predicted).count() as f64;
            let denom = 2.0 * tp + fp + missed;
            let f1 = if denom == 0.0 { 1.0 } else { 2.0 * tp / denom };
            (t, f1)
        })
        .collect()
}
