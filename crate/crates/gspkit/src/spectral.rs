//! Spectral decompositions and the graph Fourier transform.
//!
//! A graph shift operator S with eigendecomposition `S = V diag(lambda) V^{-1}`
//! defines the graph Fourier transform `x_hat = V^{-1} x` and its inverse
//! `x = V x_hat`. Three construction routes are supported:
//!
//! * symmetric operators, via the cyclic Jacobi eigensolver (real,
//!   orthonormal, `V^{-1} = V^T`);
//! * the directed cycle, whose decomposition is written down analytically:
//!   eigenvectors `v_k[m] = exp(i 2 pi k m / n) / sqrt(n)` (the DFT basis)
//!   with eigenvalues `lambda_k = exp(-i 2 pi k / n)`;
//! * anything else diagonalizable, with the decomposition supplied by the
//!   caller and validated here.
//!
//! Complex arithmetic is confined to the directed-cycle path (and the
//! joint transform built on it); every other operation in the crate works
//! on real decompositions.
//!
//! Eigenvalues of real decompositions are stored ascending, each
//! eigenvector sign-fixed so its largest-magnitude entry is positive.
//! Repeated eigenvalues (gap below `1e-8`) are grouped into clusters;
//! estimation steps elsewhere treat a cluster as one unit since individual
//! eigenvectors inside a cluster are arbitrary up to rotation.

use ndarray::{Array1, Array2, ArrayView1};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{Gso, GsoVariant};
use crate::linalg;

/// Eigenvalue gap below which two adjacent eigenvalues count as repeated.
pub const CLUSTER_GAP: f64 = 1e-8;

#[derive(Debug, Clone)]
enum DecompData {
    Real { vectors: Array2<f64>, inverse: Array2<f64>, values: Vec<f64> },
    Complex { vectors: Array2<Complex64>, inverse: Array2<Complex64>, values: Vec<Complex64> },
}

/// An eigendecomposition of a graph shift operator.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    data: DecompData,
    ordering: Vec<usize>,
    clusters: Vec<(usize, usize)>,
    orthonormal: bool,
    fingerprint: u64,
    variant: GsoVariant,
}

/// Decomposes a shift operator.
///
/// Symmetric operators go through the Jacobi eigensolver; the directed
/// cycle gets its analytic DFT decomposition. Any other operator is
/// rejected; use [`decompose_with`] to supply a decomposition computed
/// elsewhere.
pub fn decompose(s: &Gso) -> Result<SpectralDecomposition> {
    if s.is_directed_cycle() {
        return Ok(cycle_decomposition(s));
    }
    if !s.is_symmetric() {
        return Err(Error::NotDiagonalizable {
            what: "operator is neither symmetric nor the directed cycle; \
                   supply its decomposition with decompose_with"
                .into(),
        });
    }
    let (values, vectors) = linalg::jacobi_eigh(&s.matrix().view())?;
    let inverse = vectors.t().to_owned();
    let ordering = real_ordering(s, &values, &vectors);
    let clusters = detect_clusters(&values);
    Ok(SpectralDecomposition {
        data: DecompData::Real { vectors, inverse, values },
        ordering,
        clusters,
        orthonormal: true,
        fingerprint: s.fingerprint(),
        variant: s.variant(),
    })
}

/// Wraps a caller-supplied real decomposition of `s`, validating that
/// `S V = V diag(values)` holds to `1e-10` (relative, Frobenius) and that
/// `V` is invertible. Eigenpairs are re-sorted ascending by eigenvalue.
pub fn decompose_with(
    s: &Gso,
    vectors: Array2<f64>,
    values: Vec<f64>,
) -> Result<SpectralDecomposition> {
    let n = s.n();
    if vectors.dim() != (n, n) || values.len() != n {
        return Err(Error::dims(format!(
            "decomposition shape mismatch: operator is {n}x{n}, got {}x{} vectors and {} values",
            vectors.nrows(),
            vectors.ncols(),
            values.len()
        )));
    }
    if vectors.iter().any(|v| !v.is_finite()) || values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("decomposition has non-finite entries"));
    }
    // sort ascending, stable
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let mut v = Array2::<f64>::zeros((n, n));
    for (new, &old) in order.iter().enumerate() {
        v.column_mut(new).assign(&vectors.column(old));
    }
    linalg::fix_column_signs(&mut v);

    // residual check against the operator
    let sv = s.matrix().dot(&v);
    let mut resid = 0.0f64;
    for k in 0..n {
        for i in 0..n {
            let r = sv[[i, k]] - values[k] * v[[i, k]];
            resid += r * r;
        }
    }
    let scale = linalg::fro_norm(&s.matrix().view()).max(1.0);
    let resid = resid.sqrt() / scale;
    if resid > 1e-10 {
        return Err(Error::NotDiagonalizable {
            what: format!("supplied decomposition residual {resid:.3e} exceeds 1e-10"),
        });
    }

    // orthonormal basis gets the exact transpose as inverse
    let gram = v.t().dot(&v);
    let mut ortho = true;
    for i in 0..n {
        for j in 0..n {
            let e = if i == j { 1.0 } else { 0.0 };
            if (gram[[i, j]] - e).abs() > 1e-10 {
                ortho = false;
            }
        }
    }
    let inverse = if ortho {
        v.t().to_owned()
    } else {
        linalg::inverse(&v.view()).map_err(|_| Error::NotDiagonalizable {
            what: "supplied eigenvector matrix is singular".into(),
        })?
    };
    let ordering = real_ordering(s, &values, &v);
    let clusters = detect_clusters(&values);
    Ok(SpectralDecomposition {
        data: DecompData::Real { vectors: v, inverse, values },
        ordering,
        clusters,
        orthonormal: ortho,
        fingerprint: s.fingerprint(),
        variant: s.variant(),
    })
}

fn cycle_decomposition(s: &Gso) -> SpectralDecomposition {
    let n = s.n();
    let root = 2.0 * std::f64::consts::PI / n as f64;
    let scale = 1.0 / (n as f64).sqrt();
    let mut vectors = Array2::<Complex64>::zeros((n, n));
    let mut inverse = Array2::<Complex64>::zeros((n, n));
    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        let (s_k, c_k) = (root * k as f64).sin_cos();
        values.push(Complex64::new(c_k, -s_k)); // exp(-i 2 pi k / n)
        for m in 0..n {
            let (s_km, c_km) = (root * ((k * m) % n) as f64).sin_cos();
            vectors[[m, k]] = Complex64::new(c_km * scale, s_km * scale);
            inverse[[k, m]] = Complex64::new(c_km * scale, -s_km * scale);
        }
    }
    // increasing total variation ||v_k - S v_k||^2 = |1 - lambda_k|^2
    let tv: Vec<f64> = values.iter().map(|l| (Complex64::new(1.0, 0.0) - l).norm_sqr()).collect();
    let mut ordering: Vec<usize> = (0..n).collect();
    ordering.sort_by(|&a, &b| tv[a].total_cmp(&tv[b]));
    SpectralDecomposition {
        data: DecompData::Complex { vectors, inverse, values },
        ordering,
        clusters: Vec::new(),
        orthonormal: true,
        fingerprint: s.fingerprint(),
        variant: s.variant(),
    }
}

/// Frequency ordering for real decompositions: Laplacian spectra are already
/// smooth-to-rough in ascending order; adjacency spectra are ranked by the
/// total variation of each eigenvector.
fn real_ordering(s: &Gso, values: &[f64], vectors: &Array2<f64>) -> Vec<usize> {
    let n = values.len();
    let mut ordering: Vec<usize> = (0..n).collect();
    if s.variant() == GsoVariant::Adjacency {
        let radius = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if radius == 0.0 {
            return ordering;
        }
        let tv: Vec<f64> = (0..n)
            .map(|k| {
                let v = vectors.column(k);
                let sv = s.matrix().dot(&v);
                v.iter()
                    .zip(sv.iter())
                    .map(|(a, b)| {
                        let d = a - b / radius;
                        d * d
                    })
                    .sum::<f64>()
            })
            .collect();
        ordering.sort_by(|&a, &b| tv[a].total_cmp(&tv[b]));
    }
    ordering
}

fn detect_clusters(values: &[f64]) -> Vec<(usize, usize)> {
    let mut clusters = Vec::new();
    let n = values.len();
    let mut start = 0;
    for i in 1..=n {
        if i == n || values[i] - values[i - 1] >= CLUSTER_GAP {
            clusters.push((start, i - 1));
            start = i;
        }
    }
    clusters
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        match &self.data {
            DecompData::Real { values, .. } => values.len(),
            DecompData::Complex { values, .. } => values.len(),
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self.data, DecompData::Real { .. })
    }

    /// True when `V^{-1} = V^T` (or `V^H` in the complex case).
    pub fn orthonormal(&self) -> bool {
        self.orthonormal
    }

    /// Fingerprint of the operator this decomposition belongs to.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn variant(&self) -> GsoVariant {
        self.variant
    }

    /// Eigenvalues in storage order (ascending for real decompositions).
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        match &self.data {
            DecompData::Real { values, .. } => {
                values.iter().map(|&v| Complex64::new(v, 0.0)).collect()
            }
            DecompData::Complex { values, .. } => values.clone(),
        }
    }

    /// Real eigenvalues; errors for complex spectra.
    pub fn real_values(&self) -> Result<&[f64]> {
        match &self.data {
            DecompData::Real { values, .. } => Ok(values),
            DecompData::Complex { .. } => Err(Error::ComplexSpectrum),
        }
    }

    /// Real eigenvector matrix (columns); errors for complex spectra.
    pub fn basis_real(&self) -> Result<&Array2<f64>> {
        match &self.data {
            DecompData::Real { vectors, .. } => Ok(vectors),
            DecompData::Complex { .. } => Err(Error::ComplexSpectrum),
        }
    }

    /// Real inverse basis `V^{-1}` (rows analyze); errors for complex spectra.
    pub fn inverse_real(&self) -> Result<&Array2<f64>> {
        match &self.data {
            DecompData::Real { inverse, .. } => Ok(inverse),
            DecompData::Complex { .. } => Err(Error::ComplexSpectrum),
        }
    }

    /// Eigenvector matrix as complex, converting when real.
    pub fn basis_complex(&self) -> Array2<Complex64> {
        match &self.data {
            DecompData::Real { vectors, .. } => vectors.mapv(|v| Complex64::new(v, 0.0)),
            DecompData::Complex { vectors, .. } => vectors.clone(),
        }
    }

    /// Inverse basis as complex, converting when real.
    pub fn inverse_complex(&self) -> Array2<Complex64> {
        match &self.data {
            DecompData::Real { inverse, .. } => inverse.mapv(|v| Complex64::new(v, 0.0)),
            DecompData::Complex { inverse, .. } => inverse.clone(),
        }
    }

    /// Frequency ordering: a permutation of `0..n` ranking eigenvalue
    /// indices from smoothest to most oscillatory.
    pub fn ordering(&self) -> &[usize] {
        &self.ordering
    }

    /// Repeated-eigenvalue clusters as inclusive index ranges over the
    /// stored (ascending) spectrum. Singleton clusters are included.
    pub fn clusters(&self) -> &[(usize, usize)] {
        &self.clusters
    }

    pub fn has_repeated_eigenvalues(&self) -> bool {
        self.clusters.iter().any(|&(a, b)| b > a)
    }

    /// Graph Fourier transform `x_hat = V^{-1} x`.
    pub fn gft(&self, x: &ArrayView1<f64>) -> Result<Array1<Complex64>> {
        self.check_len(x.len())?;
        match &self.data {
            DecompData::Real { inverse, .. } => {
                Ok(inverse.dot(x).mapv(|v| Complex64::new(v, 0.0)))
            }
            DecompData::Complex { inverse, .. } => {
                let xc = x.mapv(|v| Complex64::new(v, 0.0));
                Ok(inverse.dot(&xc))
            }
        }
    }

    /// Inverse transform `x = V x_hat`; complex in general.
    pub fn igft(&self, x_hat: &ArrayView1<Complex64>) -> Result<Array1<Complex64>> {
        self.check_len(x_hat.len())?;
        match &self.data {
            DecompData::Real { vectors, .. } => {
                let vc = vectors.mapv(|v| Complex64::new(v, 0.0));
                Ok(vc.dot(x_hat))
            }
            DecompData::Complex { vectors, .. } => Ok(vectors.dot(x_hat)),
        }
    }

    /// Real-path GFT; errors for complex spectra.
    pub fn gft_real(&self, x: &ArrayView1<f64>) -> Result<Array1<f64>> {
        self.check_len(x.len())?;
        match &self.data {
            DecompData::Real { inverse, .. } => Ok(inverse.dot(x)),
            DecompData::Complex { .. } => Err(Error::ComplexSpectrum),
        }
    }

    /// Real-path inverse GFT; errors for complex spectra.
    pub fn igft_real(&self, x_hat: &ArrayView1<f64>) -> Result<Array1<f64>> {
        self.check_len(x_hat.len())?;
        match &self.data {
            DecompData::Real { vectors, .. } => Ok(vectors.dot(x_hat)),
            DecompData::Complex { .. } => Err(Error::ComplexSpectrum),
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n() {
            return Err(Error::dims(format!(
                "signal length {len} does not match decomposition size {}",
                self.n()
            )));
        }
        Ok(())
    }
}

/// Returns the frequency ordering of a decomposition (see
/// [`SpectralDecomposition::ordering`]).
pub fn frequency_order(d: &SpectralDecomposition) -> Vec<usize> {
    d.ordering().to_vec()
}

/// Total variation of a signal with respect to a shift operator.
///
/// * Combinatorial Laplacian: `x^T L x`, equal to the edge sum
///   `sum A_ij (x_i - x_j)^2` over the edge set. Both forms are computed
///   and must agree to `1e-10` (relative).
/// * Normalized Laplacian: same, with degree-scaled differences
///   `A_ij (x_i / sqrt(d_i) - x_j / sqrt(d_j))^2`.
/// * Adjacency (symmetric, or the directed cycle): `||x - S x / rho||^2`
///   with `rho` the spectral radius. A zero operator has zero variation.
///
/// Random-walk and custom variants have no canonical variation here.
pub fn total_variation(s: &Gso, x: &ArrayView1<f64>) -> Result<f64> {
    if x.len() != s.n() {
        return Err(Error::dims(format!(
            "signal length {} does not match operator size {}",
            x.len(),
            s.n()
        )));
    }
    match s.variant() {
        GsoVariant::CombinatorialLaplacian | GsoVariant::NormalizedLaplacian => {
            let graph = s.source().expect("graph-derived variant always carries its graph");
            let quad = x.dot(&s.matrix().dot(x));
            let degrees = graph.degrees();
            let mut edge_sum = 0.0;
            for e in graph.edges() {
                let (xi, xj) = if s.variant() == GsoVariant::NormalizedLaplacian {
                    let di = degrees[e.src];
                    let dj = degrees[e.dst];
                    (
                        if di > 0.0 { x[e.src] / di.sqrt() } else { 0.0 },
                        if dj > 0.0 { x[e.dst] / dj.sqrt() } else { 0.0 },
                    )
                } else {
                    (x[e.src], x[e.dst])
                };
                let d = xi - xj;
                edge_sum += e.weight * d * d;
            }
            let scale = quad.abs().max(edge_sum.abs()).max(1.0);
            if (quad - edge_sum).abs() > 1e-10 * scale {
                return Err(Error::NumericalFailure {
                    what: format!(
                        "quadratic form {quad:.12e} and edge sum {edge_sum:.12e} disagree"
                    ),
                });
            }
            Ok(edge_sum)
        }
        GsoVariant::Adjacency => {
            let radius = if s.is_directed_cycle() {
                1.0
            } else if s.is_symmetric() {
                let (values, _) = linalg::jacobi_eigh(&s.matrix().view())?;
                values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            } else {
                return Err(Error::VariantUnsupported {
                    what: "total variation needs a symmetric adjacency or the directed cycle"
                        .into(),
                });
            };
            if radius == 0.0 {
                return Ok(0.0);
            }
            let sx = s.matrix().dot(x);
            Ok(x.iter()
                .zip(sx.iter())
                .map(|(a, b)| {
                    let d = a - b / radius;
                    d * d
                })
                .sum())
        }
        GsoVariant::RandomWalkLaplacian | GsoVariant::Custom => Err(Error::VariantUnsupported {
            what: format!("total variation is not defined for the {} variant", s.variant().name()),
        }),
    }
}
