//! `spectrum`: eigendecomposition of a shift operator, with the
//! transform of an optional signal.

use std::path::PathBuf;

use clap::Args;

use gspkit::io::{self, SpectrumDocument};
use gspkit::spectral::decompose;

use crate::context::RunContext;
use crate::flags::GraphArgs;
use crate::CliError;

use super::{complex_csv, two_column_csv};

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Signal to transform (one-column CSV); without it only the
    /// spectrum is written.
    #[arg(long)]
    pub signal: Option<PathBuf>,
}

impl SpectrumArgs {
    pub fn input_paths(&self) -> Vec<&PathBuf> {
        let mut v = vec![&self.graph.graph];
        v.extend(self.signal.as_ref());
        v
    }
}

pub fn run(args: &SpectrumArgs, ctx: &mut RunContext) -> Result<(), CliError> {
    let (_g, s) = args.graph.load(ctx)?;
    let d = decompose(&s)?;
    let eigenvalues = d.eigenvalues();
    ctx.write_text("eigenvalues.csv", &complex_csv(eigenvalues.iter().copied()))?;

    let coefficients = match &args.signal {
        Some(path) => {
            ctx.input("signal", path);
            let x = io::read_signal_vector(path)?;
            let xh = d.gft(&x.view())?;
            ctx.write_text("gft.csv", &complex_csv(xh.iter().copied()))?;
            xh.to_vec()
        }
        None => Vec::new(),
    };

    io::write_spectrum(&ctx.path("spectrum.json"), &SpectrumDocument::new(&d, &coefficients))?;
    ctx.wrote("spectrum.json");

    // plot data: index against coefficient magnitude, or eigenvalue
    // magnitude when no signal was given
    let magnitudes: Vec<(f64, f64)> = if coefficients.is_empty() {
        eigenvalues.iter().enumerate().map(|(i, z)| (i as f64, z.norm())).collect()
    } else {
        coefficients.iter().enumerate().map(|(i, z)| (i as f64, z.norm())).collect()
    };
    ctx.write_text("magnitude.csv", &two_column_csv("index,magnitude", magnitudes.into_iter()))?;
    Ok(())
}
