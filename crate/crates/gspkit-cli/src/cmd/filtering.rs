//! `filter`: apply one graph filter to one signal.

use std::path::PathBuf;

use clap::Args;

use gspkit::io;

use crate::context::RunContext;
use crate::flags::{decompose_if, FilterSpec, GraphArgs};
use crate::CliError;

#[derive(Args, Debug)]
pub struct FilterArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Input signal (one-column CSV).
    #[arg(long)]
    pub signal: PathBuf,
    #[command(flatten)]
    pub filter: FilterSpec,
}

impl FilterArgs {
    pub fn input_paths(&self) -> Vec<&PathBuf> {
        vec![&self.graph.graph, &self.signal]
    }
}

pub fn run(args: &FilterArgs, ctx: &mut RunContext) -> Result<(), CliError> {
    let (_g, s) = args.graph.load(ctx)?;
    ctx.input("signal", &args.signal);
    let x = io::read_signal_vector(&args.signal)?;
    let d = decompose_if(&s, args.filter.needs_decomposition())?;
    let (y, doc) = args.filter.apply(ctx, &s, d.as_ref(), &x.view())?;
    io::write_signal_vector(&ctx.path("filtered.csv"), &y.view())?;
    ctx.wrote("filtered.csv");
    io::write_filter(&ctx.path("filter.json"), &doc)?;
    ctx.wrote("filter.json");
    Ok(())
}
