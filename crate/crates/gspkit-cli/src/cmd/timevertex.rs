//! Graph-time commands: `var`, `product`, `jointgft`.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use ndarray::Array2;

use gspkit::io::{self, DiagnosticsDocument};
use gspkit::spectral::decompose;
use gspkit::timevertex::{
    fit_graph_var, fit_structural_var, joint_gft, predict_var, product_gso, ProductKind,
};
use gspkit::{Gso, SignalMatrix};

use crate::context::RunContext;
use crate::flags::{GraphArgs, TimeArgs, Variant};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VarMode {
    /// Least-squares graph-filter taps over a known operator.
    FitGraph,
    /// Sparse structural VAR by proximal gradient.
    FitStructural,
    /// One-step-ahead prediction from a stored model.
    Predict,
}

#[derive(Args, Debug)]
pub struct VarArgs {
    #[arg(long, value_enum)]
    pub mode: VarMode,
    /// Time series CSV, one vertex per row, time along columns.
    #[arg(long)]
    pub signals: Option<PathBuf>,
    /// Graph for fit-graph and for predicting with a graph-var model.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Variant::Adjacency)]
    pub variant: Variant,
    /// Autoregressive order.
    #[arg(long, default_value_t = 1)]
    pub p: usize,
    /// Filter order per lag (fit-graph).
    #[arg(long, default_value_t = 0)]
    pub l: usize,
    /// Cap the filter order at the lag (information travels one hop per
    /// step).
    #[arg(long)]
    pub causal: bool,
    /// Sparsity penalty (fit-structural).
    #[arg(long, default_value_t = 0.1)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Stored model JSON (predict).
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// History CSV with the last P signals as columns, oldest first
    /// (predict).
    #[arg(long)]
    pub history: Option<PathBuf>,
}

impl VarArgs {
    pub fn input_paths(&self) -> Vec<&PathBuf> {
        let mut v = Vec::new();
        v.extend(self.signals.as_ref());
        v.extend(self.graph.as_ref());
        v.extend(self.model.as_ref());
        v.extend(self.history.as_ref());
        v
    }

    fn load_gso(&self, ctx: &mut RunContext) -> Result<Option<Gso>, CliError> {
        match &self.graph {
            Some(path) => {
                ctx.input("graph", path);
                ctx.param("variant", format!("{:?}", self.variant).to_lowercase());
                let g = io::read_graph(path)?;
                Ok(Some(Gso::from_graph(&g, self.variant.to_lib())?))
            }
            None => Ok(None),
        }
    }

    fn signals(&self, ctx: &mut RunContext) -> Result<SignalMatrix, CliError> {
        let path = self
            .signals
            .as_ref()
            .ok_or_else(|| CliError::usage("this var mode needs --signals"))?;
        ctx.input("signals", path);
        Ok(SignalMatrix::new(io::read_signal_matrix(path)?)?)
    }
}

pub fn run_var(args: &VarArgs, ctx: &mut RunContext) -> Result<(), CliError> {
    ctx.param("mode", format!("{:?}", args.mode));
    match args.mode {
        VarMode::FitGraph => {
            let xs = args.signals(ctx)?;
            let s = args
                .load_gso(ctx)?
                .ok_or_else(|| CliError::usage("fit-graph needs --graph"))?;
            ctx.param("p", args.p);
            ctx.param("l", args.l);
            ctx.param("causal", args.causal);
            let model = fit_graph_var(&xs, &s, args.p, args.l, args.causal)?;
            write_model(ctx, &model)
        }
        VarMode::FitStructural => {
            let xs = args.signals(ctx)?;
            ctx.param("p", args.p);
            ctx.param("lambda", args.lambda);
            ctx.param("max_iters", args.max_iters);
            ctx.param("tol", args.tol);
            let model = fit_structural_var(&xs, args.p, args.lambda, args.max_iters, args.tol)?;
            write_model(ctx, &model)
        }
        VarMode::Predict => {
            let model_path = args
                .model
                .as_ref()
                .ok_or_else(|| CliError::usage("predict needs --model"))?;
            let history_path = args
                .history
                .as_ref()
                .ok_or_else(|| CliError::usage("predict needs --history"))?;
            ctx.input("model", model_path);
            ctx.input("history", history_path);
            let s = args.load_gso(ctx)?;
            let model = io::read_var_model(model_path, s.as_ref())?;
            let history: Array2<f64> = io::read_signal_matrix(history_path)?;
            let prediction = predict_var(&model, s.as_ref(), &history.view())?;
            io::write_signal_vector(&ctx.path("prediction.csv"), &prediction.view())?;
            ctx.wrote("prediction.csv");
            Ok(())
        }
    }
}

fn write_model(ctx: &mut RunContext, model: &gspkit::VarModel) -> Result<(), CliError> {
    io::write_var_model(&ctx.path("model.json"), model)?;
    ctx.wrote("model.json");
    io::write_diagnostics(
        &ctx.path("diagnostics.json"),
        &DiagnosticsDocument::new(model.objective_trace(), model.diagnostics()),
    )?;
    ctx.wrote("diagnostics.json");
    for (name, value) in model.diagnostics() {
        ctx.result(name, *value);
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Kronecker,
    Cartesian,
    Strong,
}

impl Kind {
    fn to_lib(self) -> ProductKind {
        match self {
            Kind::Kronecker => ProductKind::Kronecker,
            Kind::Cartesian => ProductKind::Cartesian,
            Kind::Strong => ProductKind::Strong,
        }
    }
}

#[derive(Args, Debug)]
pub struct ProductArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub time: TimeArgs,
    #[arg(long, value_enum)]
    pub kind: Kind,
}

impl ProductArgs {
    pub fn input_paths(&self) -> Vec<&PathBuf> {
        let mut v = vec![&self.graph.graph];
        v.extend(self.time.time_graph.as_ref());
        v
    }
}

pub fn run_product(args: &ProductArgs, ctx: &mut RunContext) -> Result<(), CliError> {
    let (_g, s_g) = args.graph.load(ctx)?;
    let s_t = args.time.load(ctx, None)?;
    ctx.param("kind", args.kind.to_lib().name());
    let product = product_gso(&s_g, &s_t, args.kind.to_lib());
    io::write_signal_matrix(&ctx.path("product.csv"), &product.matrix().view())?;
    ctx.wrote("product.csv");
    ctx.result("nt", product.n() as f64);
    Ok(())
}

#[derive(Args, Debug)]
pub struct JointgftArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub time: TimeArgs,
    /// Vertex-time matrix CSV (N rows, T columns).
    #[arg(long)]
    pub signals: PathBuf,
}

impl JointgftArgs {
    pub fn input_paths(&self) -> Vec<&PathBuf> {
        let mut v = vec![&self.graph.graph, &self.signals];
        v.extend(self.time.time_graph.as_ref());
        v
    }
}

pub fn run_jointgft(args: &JointgftArgs, ctx: &mut RunContext) -> Result<(), CliError> {
    let (_g, s_g) = args.graph.load(ctx)?;
    ctx.input("signals", &args.signals);
    let x = io::read_signal_matrix(&args.signals)?;
    let s_t = args.time.load(ctx, Some(x.ncols()))?;
    let d_g = decompose(&s_g)?;
    let d_t = decompose(&s_t)?;
    let x_hat = joint_gft(&d_g, &d_t, &x.view())?;
    let re = x_hat.mapv(|z| z.re);
    let im = x_hat.mapv(|z| z.im);
    io::write_signal_matrix(&ctx.path("joint_re.csv"), &re.view())?;
    ctx.wrote("joint_re.csv");
    io::write_signal_matrix(&ctx.path("joint_im.csv"), &im.view())?;
    ctx.wrote("joint_im.csv");
    Ok(())
}
