//! Crate-wide error type.
//!
//! Every fallible operation returns [`Result`]. Variants are grouped by
//! cause: malformed inputs (graphs, dimensions, parameter ranges) versus
//! numerical failures (singular systems, rank deficiency, conditioning
//! overflows). [`Error::kind`] exposes that split so callers such as the
//! CLI can map errors onto distinct exit codes.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification of an error, used for exit-code mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The input data violated a structural contract.
    Data,
    /// A numerical procedure failed on otherwise well-formed input.
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    // -- graph construction ------------------------------------------------
    #[error("vertex id {id} out of range for a graph on {n} vertices")]
    VertexOutOfRange { id: usize, n: usize },
    #[error("self-loop on vertex {vertex} is not allowed")]
    SelfLoop { vertex: usize },
    #[error("duplicate edge ({src}, {dst})")]
    DuplicateEdge { src: usize, dst: usize },
    #[error("edges ({src}, {dst}) and ({dst}, {src}) carry conflicting weights {a} and {b}")]
    ConflictingWeights { src: usize, dst: usize, a: f64, b: f64 },
    #[error("edge ({src}, {dst}) has non-finite weight")]
    NonFiniteWeight { src: usize, dst: usize },
    #[error("{what}")]
    InvalidArgument { what: String },
    #[error("{variant} requires an undirected graph")]
    RequiresUndirected { variant: &'static str },
    #[error("{variant} requires nonnegative edge weights (edge ({src}, {dst}) has weight {w})")]
    RequiresNonnegative { variant: &'static str, src: usize, dst: usize, w: f64 },

    // -- shapes and compatibility -------------------------------------------
    #[error("dimension mismatch: {what}")]
    DimensionMismatch { what: String },
    #[error("filter was built for a different operator (fingerprint {expected:#018x}, decomposition has {found:#018x})")]
    FingerprintMismatch { expected: u64, found: u64 },
    #[error("operation requires a real spectrum; this decomposition is complex")]
    ComplexSpectrum,
    #[error("{what}")]
    VariantUnsupported { what: String },

    // -- numerical failures -------------------------------------------------
    #[error("operator is not diagonalizable by this module: {what}")]
    NotDiagonalizable { what: String },
    #[error("singular linear system: {what}")]
    SingularSystem { what: String },
    #[error("ill-conditioned system (condition estimate {cond:.3e} exceeds {limit:.1e})")]
    IllConditioned { cond: f64, limit: f64 },
    #[error("rank-deficient system (smallest singular value {sigma_min:.3e})")]
    RankDeficient { sigma_min: f64 },
    #[error("Vandermonde system condition estimate {cond:.3e} exceeds {limit:.1e}; refusing to solve")]
    VandermondeOverflow { cond: f64, limit: f64 },
    #[error("response values differ by {spread:.3e} on a repeated-eigenvalue cluster (indices {lo}..={hi})")]
    InconsistentCluster { lo: usize, hi: usize, spread: f64 },
    #[error("kernel returned a non-finite value at eigenvalue {lambda}")]
    KernelNotFinite { lambda: f64 },
    #[error("rank-deficient design matrix: {nullity} unidentifiable direction(s)")]
    RankDeficientDesign { nullity: usize },
    #[error("constraint projection is infeasible (residual {residual:.3e})")]
    InfeasibleConstraints { residual: f64 },
    #[error("degenerate data: {what}")]
    DegenerateData { what: String },
    #[error("numerical failure: {what}")]
    NumericalFailure { what: String },

    // -- file formats ---------------------------------------------------------
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {what}")]
    Malformed { path: String, line: usize, what: String },
}

impl Error {
    pub fn invalid(what: impl Into<String>) -> Self {
        Error::InvalidArgument { what: what.into() }
    }

    pub fn dims(what: impl Into<String>) -> Self {
        Error::DimensionMismatch { what: what.into() }
    }

    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            VertexOutOfRange { .. }
            | SelfLoop { .. }
            | DuplicateEdge { .. }
            | ConflictingWeights { .. }
            | NonFiniteWeight { .. }
            | InvalidArgument { .. }
            | RequiresUndirected { .. }
            | RequiresNonnegative { .. }
            | DimensionMismatch { .. }
            | FingerprintMismatch { .. }
            | ComplexSpectrum
            | VariantUnsupported { .. }
            | DegenerateData { .. }
            | Io { .. }
            | Malformed { .. } => ErrorKind::Data,
            NotDiagonalizable { .. }
            | SingularSystem { .. }
            | IllConditioned { .. }
            | RankDeficient { .. }
            | VandermondeOverflow { .. }
            | InconsistentCluster { .. }
            | KernelNotFinite { .. }
            | RankDeficientDesign { .. }
            | InfeasibleConstraints { .. }
            | NumericalFailure { .. } => ErrorKind::Numerical,
        }
    }
}
