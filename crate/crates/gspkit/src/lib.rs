//! Graph signal processing: shift operators, spectral transforms, filtering,
//! sampling and recovery, stationary processes, topology inference, and
//! time-vertex analysis.

pub mod batch;
pub mod error;
pub mod filters;
pub mod graph;
pub mod inverse;
pub mod io;
pub mod linalg;
pub mod signal;
pub mod spectral;
pub mod stochastic;
pub mod timevertex;
pub mod topology;

pub use error::{Error, ErrorKind, Result};
pub use graph::{Edge, Graph, Gso, GsoVariant};
pub use signal::SignalMatrix;
pub use spectral::{decompose, decompose_with, frequency_order, total_variation, SpectralDecomposition};
pub use timevertex::{ProductGso, ProductKind, VarCoefficients, VarModel};
pub use topology::LearnedGraph;
