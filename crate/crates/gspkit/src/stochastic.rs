//! Stationary graph processes: synthesis, covariance and PSD estimation,
//! stationarity diagnostics, and Wiener denoising.
//!
//! A zero-mean process is stationary with respect to a symmetric operator
//! S when it can be written `x = H(S) z` with white z; equivalently its
//! covariance commutes with S and is diagonalized by the GFT basis. The
//! diagonal of the covariance in that basis is the power spectral
//! density, estimated here by the periodogram.
//!
//! Synthesis draws column j of the output from a counter-based generator
//! stream keyed by `(seed, j)`, so every column is reproducible in
//! isolation and the parallel and sequential paths are bitwise identical.

use ndarray::{Array1, Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::batch;
use crate::error::{Error, Result};
use crate::graph::Gso;
use crate::linalg;
use crate::signal::SignalMatrix;
use crate::spectral::SpectralDecomposition;

/// Power spectral density aligned with a decomposition's eigenvalue
/// indices.
#[derive(Debug, Clone)]
pub struct PsdEstimate {
    values: Vec<f64>,
    sample_count: usize,
    fingerprint: Option<u64>,
}

impl PsdEstimate {
    /// A designed PSD (no samples behind it, not bound to an operator).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("psd must have at least one value"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("psd values must be finite and nonnegative"));
        }
        Ok(PsdEstimate { values, sample_count: 0, fingerprint: None })
    }

    /// A PSD restored from storage: designed values plus the recorded
    /// sample count, with no operator binding.
    pub(crate) fn with_sample_count(values: Vec<f64>, sample_count: usize) -> Result<Self> {
        let mut psd = PsdEstimate::new(values)?;
        psd.sample_count = sample_count;
        Ok(psd)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of signal realizations behind the estimate (0 for designed
    /// PSDs).
    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    /// Fingerprint of the operator the estimate was computed under, if
    /// any; consumers verify it against their decomposition.
    pub fn fingerprint(&self) -> Option<u64> {
        self.fingerprint
    }

    fn check_against(&self, d: &SpectralDecomposition) -> Result<()> {
        if self.values.len() != d.n() {
            return Err(Error::dims(format!(
                "psd length {} does not match decomposition size {}",
                self.values.len(),
                d.n()
            )));
        }
        if let Some(fp) = self.fingerprint {
            if fp != d.fingerprint() {
                return Err(Error::FingerprintMismatch { expected: fp, found: d.fingerprint() });
            }
        }
        Ok(())
    }
}

/// A symmetric positive-semidefinite covariance matrix estimate.
#[derive(Debug, Clone)]
pub struct CovarianceEstimate {
    matrix: Array2<f64>,
    sample_count: usize,
}

impl CovarianceEstimate {
    /// Validates symmetry (1e-12, relative to the largest entry) and the
    /// eigenvalue floor (-1e-8).
    pub fn new(matrix: Array2<f64>, sample_count: usize) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n || n == 0 {
            return Err(Error::dims("covariance matrix must be square and nonempty"));
        }
        let scale = linalg::max_abs(&matrix.view()).max(1.0);
        for i in 0..n {
            for j in (i + 1)..n {
                if (matrix[[i, j]] - matrix[[j, i]]).abs() > 1e-12 * scale {
                    return Err(Error::invalid("covariance matrix is not symmetric"));
                }
            }
        }
        let (values, _) = linalg::jacobi_eigh(&matrix.view())?;
        if values[0] < -1e-8 * scale {
            return Err(Error::invalid(format!(
                "covariance matrix has a negative eigenvalue {:.3e}",
                values[0]
            )));
        }
        Ok(CovarianceEstimate { matrix, sample_count })
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }
}

/// The sample covariance `C = (1/M) X X^T`. The zero-mean convention is
/// the default; pass `subtract_mean` to center rows first.
pub fn sample_covariance(xs: &SignalMatrix, subtract_mean: bool) -> Result<CovarianceEstimate> {
    let data;
    let xs = if subtract_mean {
        data = xs.centered();
        &data
    } else {
        xs
    };
    let x = xs.values();
    let mut c = x.dot(&x.t());
    c /= xs.m() as f64;
    // Gram construction: symmetrize away the last bits of roundoff
    let ct = c.t().to_owned();
    c += &ct;
    c *= 0.5;
    CovarianceEstimate::new(c, xs.m())
}

fn synthesis_matrix(d: &SpectralDecomposition, psd: &PsdEstimate) -> Result<Array2<f64>> {
    psd.check_against(d)?;
    let v = d.basis_real()?;
    let vinv = d.inverse_real()?;
    let mut scaled = v.clone();
    for (mut col, &p) in scaled.columns_mut().into_iter().zip(psd.values()) {
        let root = p.sqrt();
        col.mapv_inplace(|e| e * root);
    }
    Ok(scaled.dot(vinv))
}

fn draw_column(h: &Array2<f64>, n: usize, seed: u64, j: usize) -> Array1<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(j as u64);
    let z = Array1::from_iter((0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
    h.dot(&z)
}

/// Draws `m` realizations of the stationary process with the given PSD:
/// column j is `V diag(sqrt(p)) V^{-1} z_j` with `z_j` standard normal
/// from stream j of a ChaCha8 generator seeded by `seed`. Population
/// covariance is `V diag(p) V^{-1}`.
pub fn synthesize_stationary(
    d: &SpectralDecomposition,
    psd: &PsdEstimate,
    m: usize,
    seed: u64,
) -> Result<SignalMatrix> {
    if m == 0 {
        return Err(Error::invalid("must synthesize at least one column"));
    }
    let h = synthesis_matrix(d, psd)?;
    let n = d.n();
    let out = batch::generate_columns(n, m, |j| draw_column(&h, n, seed, j));
    SignalMatrix::new(out)
}

/// Sequential reference implementation of [`synthesize_stationary`];
/// bitwise identical output.
pub fn synthesize_stationary_seq(
    d: &SpectralDecomposition,
    psd: &PsdEstimate,
    m: usize,
    seed: u64,
) -> Result<SignalMatrix> {
    if m == 0 {
        return Err(Error::invalid("must synthesize at least one column"));
    }
    let h = synthesis_matrix(d, psd)?;
    let n = d.n();
    let out = batch::generate_columns_seq(n, m, |j| draw_column(&h, n, seed, j));
    SignalMatrix::new(out)
}

/// How far a covariance is from commuting with the operator:
/// `||C S - S C||_F / (||C||_F ||S||_F)`. Zero iff they commute, which
/// for a distinct-spectrum S means C is a polynomial of S.
pub fn stationarity_score(c: &CovarianceEstimate, s: &Gso) -> Result<f64> {
    if c.matrix().nrows() != s.n() {
        return Err(Error::dims(format!(
            "covariance size {} does not match operator size {}",
            c.matrix().nrows(),
            s.n()
        )));
    }
    if !s.is_symmetric() {
        return Err(Error::invalid("stationarity score needs a symmetric operator"));
    }
    let cs = c.matrix().dot(s.matrix());
    let sc = s.matrix().dot(c.matrix());
    let num = linalg::fro_norm(&(&cs - &sc).view());
    let den = linalg::fro_norm(&c.matrix().view()) * linalg::fro_norm(&s.matrix().view());
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok(num / den)
}

/// The periodogram: `p_l = (1/M) sum_m |[V^{-1} x_m]_l|^2`, averaged over
/// repeated-eigenvalue clusters (individual eigenvectors inside a cluster
/// are arbitrary, their total energy is not). Unbiased for the population
/// PSD of stationary synthesis.
pub fn periodogram(d: &SpectralDecomposition, xs: &SignalMatrix) -> Result<PsdEstimate> {
    if xs.n() != d.n() {
        return Err(Error::dims(format!(
            "signal matrix has {} rows for a decomposition of size {}",
            xs.n(),
            d.n()
        )));
    }
    let vinv = d.inverse_real()?;
    let transformed = batch::map_columns(&xs.values().view(), |_, col| vinv.dot(&col));
    let n = d.n();
    let m = xs.m();
    // sequential reduction over columns keeps the result deterministic
    let mut p = vec![0.0f64; n];
    for col in transformed.columns() {
        for (acc, &v) in p.iter_mut().zip(col.iter()) {
            *acc += v * v;
        }
    }
    for v in p.iter_mut() {
        *v /= m as f64;
    }
    for &(lo, hi) in d.clusters() {
        if hi > lo {
            let mean = p[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64;
            for v in &mut p[lo..=hi] {
                *v = mean;
            }
        }
    }
    Ok(PsdEstimate { values: p, sample_count: m, fingerprint: Some(d.fingerprint()) })
}

/// Spectral Wiener gains `p / (p + sigma2)`, with `0/0 = 0`.
pub fn wiener_gains(psd: &PsdEstimate, sigma2: f64) -> Result<Vec<f64>> {
    if !(sigma2.is_finite() && sigma2 >= 0.0) {
        return Err(Error::invalid("noise variance must be nonnegative"));
    }
    Ok(psd
        .values()
        .iter()
        .map(|&p| {
            let den = p + sigma2;
            if den == 0.0 {
                0.0
            } else {
                p / den
            }
        })
        .collect())
}

/// Wiener denoising of `y = x + n` (x stationary with the given PSD, n
/// white with variance `sigma2`): applies the gain `p / (p + sigma2)` in
/// the GFT domain. The minimum-MSE spectral-diagonal estimator under the
/// model.
pub fn wiener_denoise(
    d: &SpectralDecomposition,
    psd: &PsdEstimate,
    sigma2: f64,
    y: &ArrayView1<f64>,
) -> Result<Array1<f64>> {
    psd.check_against(d)?;
    if y.len() != d.n() {
        return Err(Error::dims(format!(
            "signal length {} does not match decomposition size {}",
            y.len(),
            d.n()
        )));
    }
    let gains = wiener_gains(psd, sigma2)?;
    let mut yh = d.gft_real(y)?;
    for (v, g) in yh.iter_mut().zip(gains) {
        *v *= g;
    }
    d.igft_real(&yh.view())
}
