//! Flag groups shared across subcommands: graph loading, time-factor
//! loading, and the filter specification (taps, response, named kernel,
//! Chebyshev approximation, or IIR denominator).

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use ndarray::{Array1, ArrayView1};

use gspkit::filters::{
    apply_iir, apply_polynomial, apply_response, chebyshev_apply, chebyshev_fit,
    kernel_response, GraphFilter,
};
use gspkit::io::FilterDocument;
use gspkit::spectral::{decompose, SpectralDecomposition};
use gspkit::{Graph, Gso, GsoVariant};

use crate::context::RunContext;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Adjacency,
    Laplacian,
    Normalized,
    RandomWalk,
}

impl Variant {
    pub fn to_lib(self) -> GsoVariant {
        match self {
            Variant::Adjacency => GsoVariant::Adjacency,
            Variant::Laplacian => GsoVariant::CombinatorialLaplacian,
            Variant::Normalized => GsoVariant::NormalizedLaplacian,
            Variant::RandomWalk => GsoVariant::RandomWalkLaplacian,
        }
    }
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    /// Edge-list CSV; its JSON sidecar must sit next to it.
    #[arg(long)]
    pub graph: PathBuf,
    /// Shift operator built from the graph.
    #[arg(long, value_enum, default_value_t = Variant::Adjacency)]
    pub variant: Variant,
}

impl GraphArgs {
    pub fn load(&self, ctx: &mut RunContext) -> Result<(Graph, Gso), CliError> {
        ctx.input("graph", &self.graph);
        ctx.param("variant", format!("{:?}", self.variant).to_lowercase());
        let g = gspkit::io::read_graph(&self.graph)?;
        let s = Gso::from_graph(&g, self.variant.to_lib())?;
        Ok((g, s))
    }
}

/// Time factor for product-domain commands: either an explicit edge
/// list or a directed cycle of a given length (the DFT case).
#[derive(Args, Debug)]
pub struct TimeArgs {
    /// Edge-list CSV for the time factor.
    #[arg(long)]
    pub time_graph: Option<PathBuf>,
    /// Operator variant for --time-graph.
    #[arg(long, value_enum, default_value_t = Variant::Adjacency)]
    pub time_variant: Variant,
    /// Length of the default directed-cycle time factor.
    #[arg(long)]
    pub t: Option<usize>,
}

impl TimeArgs {
    /// Loads the time operator. `fallback_t` supplies the cycle length
    /// when the data already fixes it (e.g. the signal's column count).
    pub fn load(&self, ctx: &mut RunContext, fallback_t: Option<usize>) -> Result<Gso, CliError> {
        if let Some(path) = &self.time_graph {
            ctx.input("time_graph", path);
            ctx.param("time_variant", format!("{:?}", self.time_variant).to_lowercase());
            let g = gspkit::io::read_graph(path)?;
            return Ok(Gso::from_graph(&g, self.time_variant.to_lib())?);
        }
        let t = self.t.or(fallback_t).ok_or_else(|| {
            CliError::usage("need --time-graph or --t to define the time factor")
        })?;
        ctx.param("time_factor", format!("directed_cycle({t})"));
        let g = Graph::directed_cycle(t)?;
        Ok(Gso::from_graph(&g, GsoVariant::Adjacency)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KernelName {
    /// exp(-scale * lambda)
    Heat,
    /// 1 for lambda <= cutoff, else 0
    Lowpass,
}

/// One filter, specified inline. Exactly one of --taps, --response,
/// --kernel, --denominator selects the form; --chebyshev-order turns a
/// kernel into a fitted Chebyshev interpolant applied without any
/// eigendecomposition.
#[derive(Args, Debug, Default)]
pub struct FilterSpec {
    /// Polynomial taps h0,h1,...: applies sum_l h_l S^l.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub taps: Option<Vec<f64>>,
    /// Spectral response, one value per eigenvalue index.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub response: Option<Vec<f64>>,
    /// IIR denominator d0,d1,...: applies (sum_l d_l S^l)^{-1}.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub denominator: Option<Vec<f64>>,
    /// Named kernel evaluated on the spectrum.
    #[arg(long, value_enum)]
    pub kernel: Option<KernelName>,
    /// Heat-kernel rate.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Low-pass cutoff eigenvalue.
    #[arg(long)]
    pub cutoff: Option<f64>,
    /// Chebyshev fit order for --kernel (skips the eigendecomposition).
    #[arg(long)]
    pub chebyshev_order: Option<usize>,
}

impl FilterSpec {
    pub fn is_empty(&self) -> bool {
        self.taps.is_none()
            && self.response.is_none()
            && self.denominator.is_none()
            && self.kernel.is_none()
    }

    fn check_single_form(&self) -> Result<(), CliError> {
        let picked = [
            self.taps.is_some(),
            self.response.is_some(),
            self.denominator.is_some(),
            self.kernel.is_some(),
        ]
        .iter()
        .filter(|&&p| p)
        .count();
        if picked != 1 {
            return Err(CliError::usage(
                "specify exactly one of --taps, --response, --denominator, --kernel",
            ));
        }
        if self.chebyshev_order.is_some() && self.kernel.is_none() {
            return Err(CliError::usage("--chebyshev-order only applies to --kernel"));
        }
        Ok(())
    }

    /// Whether resolving this filter requires the eigendecomposition.
    pub fn needs_decomposition(&self) -> bool {
        self.response.is_some() || (self.kernel.is_some() && self.chebyshev_order.is_none())
    }

    fn kernel_fn(&self) -> Result<impl Fn(f64) -> f64, CliError> {
        let name = self.kernel.expect("checked by caller");
        let scale = self.scale;
        let cutoff = match name {
            KernelName::Lowpass => Some(self.cutoff.ok_or_else(|| {
                CliError::usage("--kernel lowpass needs --cutoff")
            })?),
            KernelName::Heat => None,
        };
        Ok(move |lambda: f64| match name {
            KernelName::Heat => (-scale * lambda).exp(),
            KernelName::Lowpass => {
                if lambda <= cutoff.expect("set above") {
                    1.0
                } else {
                    0.0
                }
            }
        })
    }

    fn record(&self, ctx: &mut RunContext) {
        if let Some(t) = &self.taps {
            ctx.param("taps", t.clone());
        }
        if let Some(r) = &self.response {
            ctx.param("response", r.clone());
        }
        if let Some(d) = &self.denominator {
            ctx.param("denominator", d.clone());
        }
        if let Some(k) = self.kernel {
            ctx.param("kernel", format!("{k:?}").to_lowercase());
            match k {
                KernelName::Heat => ctx.param("scale", self.scale),
                KernelName::Lowpass => ctx.param("cutoff", self.cutoff),
            }
            if let Some(o) = self.chebyshev_order {
                ctx.param("chebyshev_order", o);
            }
        }
    }

    /// Applies the filter to one signal and returns the output along
    /// with the storable document describing what ran.
    pub fn apply(
        &self,
        ctx: &mut RunContext,
        s: &Gso,
        d: Option<&SpectralDecomposition>,
        x: &ArrayView1<f64>,
    ) -> Result<(Array1<f64>, FilterDocument), CliError> {
        self.check_single_form()?;
        self.record(ctx);
        if let Some(taps) = &self.taps {
            let y = apply_polynomial(s, taps, x)?;
            return Ok((y, FilterDocument::from_filter(&GraphFilter::taps(taps.clone())?)));
        }
        if let Some(den) = &self.denominator {
            let y = apply_iir(s, den, x)?;
            return Ok((y, FilterDocument::from_filter(&GraphFilter::rational(den.clone())?)));
        }
        if let Some(values) = &self.response {
            let d = d.expect("caller decomposes when needs_decomposition");
            let f = GraphFilter::response(values.clone(), d)?;
            let y = apply_response(d, &f, x)?;
            return Ok((y, FilterDocument::from_filter(&f)));
        }
        let kernel = self.kernel_fn()?;
        if let Some(order) = self.chebyshev_order {
            let cheb = chebyshev_fit(&kernel, order, s.gershgorin_interval())?;
            let y = chebyshev_apply(s, &cheb, x)?;
            return Ok((y, FilterDocument::from_chebyshev(&cheb)));
        }
        let d = d.expect("caller decomposes when needs_decomposition");
        let f = kernel_response(d, &kernel)?;
        let y = apply_response(d, &f, x)?;
        Ok((y, FilterDocument::from_filter(&f)))
    }

    /// Resolves to an in-memory filter for commands that consume one as
    /// an operator (interpolation penalty, labeling penalty, source
    /// dictionary). Chebyshev form is not a `GraphFilter`, so it is a
    /// usage error here.
    pub fn graph_filter(
        &self,
        ctx: &mut RunContext,
        d: Option<&SpectralDecomposition>,
    ) -> Result<GraphFilter, CliError> {
        self.check_single_form()?;
        if self.chebyshev_order.is_some() {
            return Err(CliError::usage(
                "this command needs an exact filter form, not a Chebyshev approximation",
            ));
        }
        self.record(ctx);
        if let Some(taps) = &self.taps {
            return Ok(GraphFilter::taps(taps.clone())?);
        }
        if let Some(den) = &self.denominator {
            return Ok(GraphFilter::rational(den.clone())?);
        }
        let d = d.expect("caller decomposes when needs_decomposition");
        if let Some(values) = &self.response {
            return Ok(GraphFilter::response(values.clone(), d)?);
        }
        Ok(kernel_response(d, &self.kernel_fn()?)?)
    }
}

/// Decomposes lazily: only when the filter spec (or the command itself)
/// needs the spectrum.
pub fn decompose_if(s: &Gso, needed: bool) -> Result<Option<SpectralDecomposition>, CliError> {
    if needed {
        Ok(Some(decompose(s)?))
    } else {
        Ok(None)
    }
}
