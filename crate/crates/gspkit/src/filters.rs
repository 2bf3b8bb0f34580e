//! Graph filters in tap, response, and rational forms.
//!
//! A polynomial filter `H(S) = sum_l h_l S^l` acts locally (an order-L
//! filter mixes values at most L hops away) and diagonalizes in the GFT
//! basis as `H(S) = V diag(h_hat) V^{-1}` with `h_hat_k = sum_l h_l
//! lambda_k^l`. The two forms convert into each other as long as the
//! response is constant on repeated-eigenvalue clusters; the rational
//! form `H(S) = (sum_l a_l S^l)^{-1}` is applied by a direct solve.
//!
//! Polynomial application never forms matrix powers: it runs a Horner
//! multiply-accumulate over the operator's nonzero entries, O(L |E|).
//! Chebyshev approximation gives a decomposition-free route to spectral
//! kernels via the same sparse multiplies.

use ndarray::{Array1, Array2, ArrayView1};

use crate::batch;
use crate::error::{Error, Result};
use crate::graph::Gso;
use crate::linalg;
use crate::signal::SignalMatrix;
use crate::spectral::SpectralDecomposition;

/// Condition-estimate ceiling shared by the rational solve and the
/// Vandermonde conversion.
pub const CONDITION_LIMIT: f64 = 1e12;

/// A graph filter in one of three forms.
///
/// * `Taps`: polynomial coefficients `[h_0, ..., h_L]`. Degrees at or
///   above the operator size are redundant (a matrix satisfies its own
///   characteristic polynomial); [`cascade`] reduces products back below
///   that degree when it has a decomposition to reduce against.
/// * `Response`: per-eigenvalue gains bound to one decomposition via its
///   operator fingerprint; applying to a mismatched operator is an error.
/// * `Rational`: denominator coefficients `[a_0, ..., a_L]` of
///   `(sum_l a_l S^l)^{-1}`, validated at apply time.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphFilter {
    Taps { coefficients: Vec<f64> },
    Response { values: Vec<f64>, fingerprint: u64 },
    Rational { denominator: Vec<f64> },
}

impl GraphFilter {
    pub fn taps(coefficients: Vec<f64>) -> Result<Self> {
        check_coeffs(&coefficients, "taps")?;
        Ok(GraphFilter::Taps { coefficients })
    }

    /// A response filter bound to `d`'s operator.
    pub fn response(values: Vec<f64>, d: &SpectralDecomposition) -> Result<Self> {
        if values.len() != d.n() {
            return Err(Error::dims(format!(
                "response has {} values for a decomposition of size {}",
                values.len(),
                d.n()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("response values must be finite"));
        }
        Ok(GraphFilter::Response { values, fingerprint: d.fingerprint() })
    }

    pub fn rational(denominator: Vec<f64>) -> Result<Self> {
        check_coeffs(&denominator, "denominator")?;
        Ok(GraphFilter::Rational { denominator })
    }

    pub fn form_name(&self) -> &'static str {
        match self {
            GraphFilter::Taps { .. } => "taps",
            GraphFilter::Response { .. } => "response",
            GraphFilter::Rational { .. } => "rational",
        }
    }
}

fn check_coeffs(c: &[f64], what: &str) -> Result<()> {
    if c.is_empty() {
        return Err(Error::invalid(format!("{what} must have at least one coefficient")));
    }
    if c.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("{what} must be finite")));
    }
    Ok(())
}

/// Nonzero entries of an operator, for repeated sparse multiplies.
pub(crate) struct SparseOp {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseOp {
    pub fn from_matrix(m: &Array2<f64>) -> Self {
        let n = m.nrows();
        let mut entries = Vec::new();
        for ((i, j), &w) in m.indexed_iter() {
            if w != 0.0 {
                entries.push((i, j, w));
            }
        }
        SparseOp { n, entries }
    }

    pub fn apply(&self, x: &ArrayView1<f64>) -> Array1<f64> {
        let mut y = Array1::zeros(self.n);
        for &(i, j, w) in &self.entries {
            y[i] += w * x[j];
        }
        y
    }
}

fn check_signal(n: usize, x: &ArrayView1<f64>) -> Result<()> {
    if x.len() != n {
        return Err(Error::dims(format!(
            "signal length {} does not match operator size {n}",
            x.len()
        )));
    }
    Ok(())
}

/// Applies the polynomial filter `sum_l h_l S^l` by Horner
/// multiply-accumulate over the operator's nonzero entries.
pub fn apply_polynomial(s: &Gso, taps: &[f64], x: &ArrayView1<f64>) -> Result<Array1<f64>> {
    check_coeffs(taps, "taps")?;
    check_signal(s.n(), x)?;
    let op = SparseOp::from_matrix(s.matrix());
    Ok(horner(&op, taps, x))
}

fn horner(op: &SparseOp, taps: &[f64], x: &ArrayView1<f64>) -> Array1<f64> {
    let last = *taps.last().expect("taps checked nonempty");
    let mut y = x.mapv(|v| v * last);
    for &h in taps[..taps.len() - 1].iter().rev() {
        y = op.apply(&y.view());
        y.zip_mut_with(x, |a, &b| *a += h * b);
    }
    y
}

/// Column-parallel [`apply_polynomial`] over a signal matrix. Each column
/// is processed independently, so the result is bitwise identical to the
/// sequential path.
pub fn apply_polynomial_batch(s: &Gso, taps: &[f64], xs: &SignalMatrix) -> Result<SignalMatrix> {
    check_coeffs(taps, "taps")?;
    if xs.n() != s.n() {
        return Err(Error::dims(format!(
            "signal matrix has {} rows for an operator of size {}",
            xs.n(),
            s.n()
        )));
    }
    let op = SparseOp::from_matrix(s.matrix());
    let out = batch::map_columns(&xs.values().view(), |_, col| horner(&op, taps, &col));
    SignalMatrix::new(out)
}

/// Sequential reference implementation of [`apply_polynomial_batch`].
pub fn apply_polynomial_batch_seq(
    s: &Gso,
    taps: &[f64],
    xs: &SignalMatrix,
) -> Result<SignalMatrix> {
    check_coeffs(taps, "taps")?;
    if xs.n() != s.n() {
        return Err(Error::dims(format!(
            "signal matrix has {} rows for an operator of size {}",
            xs.n(),
            s.n()
        )));
    }
    let op = SparseOp::from_matrix(s.matrix());
    let out = batch::map_columns_seq(&xs.values().view(), |_, col| horner(&op, taps, &col));
    SignalMatrix::new(out)
}

fn response_values<'f>(
    d: &SpectralDecomposition,
    filter: &'f GraphFilter,
) -> Result<&'f [f64]> {
    match filter {
        GraphFilter::Response { values, fingerprint } => {
            if *fingerprint != d.fingerprint() {
                return Err(Error::FingerprintMismatch {
                    expected: *fingerprint,
                    found: d.fingerprint(),
                });
            }
            if values.len() != d.n() {
                return Err(Error::dims(format!(
                    "response has {} values for a decomposition of size {}",
                    values.len(),
                    d.n()
                )));
            }
            Ok(values)
        }
        other => Err(Error::invalid(format!(
            "expected a response-form filter, got {}",
            other.form_name()
        ))),
    }
}

fn spectral_apply(
    d: &SpectralDecomposition,
    gains: &[f64],
    x: &ArrayView1<f64>,
) -> Result<Array1<f64>> {
    let mut xh = d.gft_real(x)?;
    for (v, &g) in xh.iter_mut().zip(gains) {
        *v *= g;
    }
    d.igft_real(&xh.view())
}

/// Applies a response-form filter: `y = V diag(values) V^{-1} x`.
pub fn apply_response(
    d: &SpectralDecomposition,
    filter: &GraphFilter,
    x: &ArrayView1<f64>,
) -> Result<Array1<f64>> {
    check_signal(d.n(), x)?;
    let values = response_values(d, filter)?;
    spectral_apply(d, values, x)
}

/// Evaluates a scalar kernel on the spectrum and returns the resulting
/// response filter bound to `d`.
pub fn kernel_response<F>(d: &SpectralDecomposition, kernel: F) -> Result<GraphFilter>
where
    F: Fn(f64) -> f64,
{
    let values = d.real_values()?;
    let mut gains = Vec::with_capacity(values.len());
    for &lambda in values {
        let g = kernel(lambda);
        if !g.is_finite() {
            return Err(Error::KernelNotFinite { lambda });
        }
        gains.push(g);
    }
    GraphFilter::response(gains, d)
}

/// Applies a spectral kernel: gains `kernel(lambda_k)` in the GFT domain.
pub fn apply_kernel<F>(
    d: &SpectralDecomposition,
    kernel: F,
    x: &ArrayView1<f64>,
) -> Result<Array1<f64>>
where
    F: Fn(f64) -> f64,
{
    check_signal(d.n(), x)?;
    let filter = kernel_response(d, kernel)?;
    let values = response_values(d, &filter)?;
    spectral_apply(d, values, x)
}

/// The matrix `sum_l c_l S^l`, built by iterated multiplication.
fn polynomial_matrix(s: &Gso, coeffs: &[f64]) -> Array2<f64> {
    let n = s.n();
    let mut out = Array2::eye(n) * coeffs[0];
    let mut power = Array2::eye(n);
    for &c in &coeffs[1..] {
        power = s.matrix().dot(&power);
        out.scaled_add(c, &power);
    }
    out
}

/// Applies the rational filter `(sum_l a_l S^l)^{-1}` by a direct solve.
///
/// The system matrix's condition estimate must stay at or below
/// [`CONDITION_LIMIT`]; the solve runs one iterative-refinement pass and
/// verifies the residual against `1e-8 ||x||`.
pub fn apply_iir(s: &Gso, denominator: &[f64], x: &ArrayView1<f64>) -> Result<Array1<f64>> {
    check_coeffs(denominator, "denominator")?;
    check_signal(s.n(), x)?;
    let m = polynomial_matrix(s, denominator);
    let svd = linalg::svd(&m.view());
    let cond = svd.cond();
    if !cond.is_finite() || cond > CONDITION_LIMIT {
        return Err(Error::IllConditioned { cond, limit: CONDITION_LIMIT });
    }
    let lu = linalg::lu_factor(&m.view()).map_err(|_| Error::IllConditioned {
        cond: f64::INFINITY,
        limit: CONDITION_LIMIT,
    })?;
    let mut y = lu.solve(x);
    // one refinement pass tightens the residual after a marginal solve
    let r = x - &m.dot(&y);
    y += &lu.solve(&r.view());
    let resid = {
        let r = x - &m.dot(&y);
        r.iter().map(|v| v * v).sum::<f64>().sqrt()
    };
    let xnorm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if resid > 1e-8 * xnorm.max(f64::MIN_POSITIVE) {
        return Err(Error::NumericalFailure {
            what: format!("rational solve residual {resid:.3e} exceeds 1e-8 * ||x||"),
        });
    }
    Ok(y)
}

/// Evaluates taps on the spectrum: `values_k = sum_l h_l lambda_k^l`.
pub fn taps_to_response(d: &SpectralDecomposition, taps: &[f64]) -> Result<GraphFilter> {
    check_coeffs(taps, "taps")?;
    let values = d.real_values()?;
    let gains: Vec<f64> = values.iter().map(|&l| eval_poly(taps, l)).collect();
    if gains.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure {
            what: "polynomial evaluation overflowed on the spectrum".into(),
        });
    }
    GraphFilter::response(gains, d)
}

fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Recovers taps realizing a response: one tap per distinct eigenvalue,
/// solved from the Vandermonde system on cluster-representative
/// eigenvalues.
///
/// The response must be constant (to `1e-8`) on every repeated-eigenvalue
/// cluster; no polynomial realizes an inconsistent response. The
/// Vandermonde condition estimate must stay at or below
/// [`CONDITION_LIMIT`]; overflow is reported, never regularized away.
pub fn response_to_taps(d: &SpectralDecomposition, filter: &GraphFilter) -> Result<Vec<f64>> {
    let values = response_values(d, filter)?;
    let lambdas = d.real_values()?;
    let (reps, gains) = cluster_representatives(d, lambdas, values)?;
    vandermonde_solve(&reps, &gains)
}

/// Per-cluster mean eigenvalue and response, rejecting responses that vary
/// within a cluster.
fn cluster_representatives(
    d: &SpectralDecomposition,
    lambdas: &[f64],
    values: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut reps = Vec::with_capacity(d.clusters().len());
    let mut gains = Vec::with_capacity(d.clusters().len());
    for &(lo, hi) in d.clusters() {
        let slice = &values[lo..=hi];
        let vmin = slice.iter().cloned().fold(f64::INFINITY, f64::min);
        let vmax = slice.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let spread = vmax - vmin;
        if spread > 1e-8 {
            return Err(Error::InconsistentCluster { lo, hi, spread });
        }
        reps.push(lambdas[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64);
        gains.push(slice.iter().sum::<f64>() / slice.len() as f64);
    }
    Ok((reps, gains))
}

fn vandermonde_solve(reps: &[f64], gains: &[f64]) -> Result<Vec<f64>> {
    let k = reps.len();
    let mut v = Array2::<f64>::zeros((k, k));
    for (i, &l) in reps.iter().enumerate() {
        let mut p = 1.0;
        for j in 0..k {
            v[[i, j]] = p;
            p *= l;
        }
    }
    let cond = linalg::svd(&v.view()).cond();
    if !cond.is_finite() || cond > CONDITION_LIMIT {
        return Err(Error::VandermondeOverflow { cond, limit: CONDITION_LIMIT });
    }
    let b = Array1::from_vec(gains.to_vec());
    let taps = linalg::solve(&v.view(), &b.view()).map_err(|_| Error::VandermondeOverflow {
        cond: f64::INFINITY,
        limit: CONDITION_LIMIT,
    })?;
    Ok(taps.to_vec())
}

/// Reduces taps to degree < number of distinct eigenvalues by evaluating
/// on the spectrum and re-solving. Equivalent on this operator by the
/// characteristic-polynomial identity.
fn reduce_taps(d: &SpectralDecomposition, taps: &[f64]) -> Result<Vec<f64>> {
    let lambdas = d.real_values()?;
    let values: Vec<f64> = lambdas.iter().map(|&l| eval_poly(taps, l)).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure {
            what: "polynomial evaluation overflowed during degree reduction".into(),
        });
    }
    let reps: Vec<f64> = d
        .clusters()
        .iter()
        .map(|&(lo, hi)| lambdas[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64)
        .collect();
    let gains: Vec<f64> = d.clusters().iter().map(|&(lo, _)| values[lo]).collect();
    vandermonde_solve(&reps, &gains)
}

/// Composes two filters into one: pointwise product of responses, or
/// polynomial convolution of taps.
///
/// Tap products whose degree reaches the operator size are reduced back
/// when a decomposition is supplied (the product is unchanged as an
/// operator). Mixed tap/response pairs need `d` to convert; rational
/// filters do not compose here.
pub fn cascade(
    a: &GraphFilter,
    b: &GraphFilter,
    d: Option<&SpectralDecomposition>,
) -> Result<GraphFilter> {
    match (a, b) {
        (GraphFilter::Rational { .. }, _) | (_, GraphFilter::Rational { .. }) => {
            Err(Error::invalid("cascade supports taps and response forms only"))
        }
        (
            GraphFilter::Response { values: va, fingerprint: fa },
            GraphFilter::Response { values: vb, fingerprint: fb },
        ) => {
            if fa != fb {
                return Err(Error::FingerprintMismatch { expected: *fa, found: *fb });
            }
            if va.len() != vb.len() {
                return Err(Error::dims("cascaded responses differ in length"));
            }
            if let Some(d) = d {
                if d.fingerprint() != *fa {
                    return Err(Error::FingerprintMismatch {
                        expected: *fa,
                        found: d.fingerprint(),
                    });
                }
            }
            let values = va.iter().zip(vb).map(|(x, y)| x * y).collect();
            Ok(GraphFilter::Response { values, fingerprint: *fa })
        }
        (GraphFilter::Taps { coefficients: ha }, GraphFilter::Taps { coefficients: hb }) => {
            let mut conv = vec![0.0; ha.len() + hb.len() - 1];
            for (i, &x) in ha.iter().enumerate() {
                for (j, &y) in hb.iter().enumerate() {
                    conv[i + j] += x * y;
                }
            }
            if let Some(d) = d {
                if conv.len() > d.n() && d.is_real() {
                    conv = reduce_taps(d, &conv)?;
                }
            }
            Ok(GraphFilter::Taps { coefficients: conv })
        }
        (taps @ GraphFilter::Taps { .. }, resp @ GraphFilter::Response { .. })
        | (resp @ GraphFilter::Response { .. }, taps @ GraphFilter::Taps { .. }) => {
            let d = d.ok_or_else(|| {
                Error::invalid("cascading taps with a response needs the decomposition")
            })?;
            let GraphFilter::Taps { coefficients } = taps else { unreachable!() };
            let converted = taps_to_response(d, coefficients)?;
            cascade(&converted, resp, Some(d))
        }
    }
}

/// Chebyshev expansion of a kernel over an interval: coefficients of
/// `c_0 / 2 + sum_k c_k T_k` interpolating the kernel at the order+1
/// Chebyshev nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevCoefficients {
    pub coefficients: Vec<f64>,
    pub interval: (f64, f64),
}

/// Fits a degree-`order` Chebyshev interpolant to a kernel on an interval.
pub fn chebyshev_fit<F>(kernel: F, order: usize, interval: (f64, f64)) -> Result<ChebyshevCoefficients>
where
    F: Fn(f64) -> f64,
{
    let (lo, hi) = interval;
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::invalid(format!("invalid interval [{lo}, {hi}]")));
    }
    let q = order + 1;
    let center = 0.5 * (hi + lo);
    let half = 0.5 * (hi - lo);
    // kernel values at the Chebyshev nodes of the interval
    let mut fv = Vec::with_capacity(q);
    for j in 0..q {
        let theta = std::f64::consts::PI * (j as f64 + 0.5) / q as f64;
        let lambda = center + half * theta.cos();
        let v = kernel(lambda);
        if !v.is_finite() {
            return Err(Error::KernelNotFinite { lambda });
        }
        fv.push(v);
    }
    let mut coefficients = Vec::with_capacity(q);
    for k in 0..q {
        let mut c = 0.0;
        for (j, &v) in fv.iter().enumerate() {
            let theta = std::f64::consts::PI * (j as f64 + 0.5) / q as f64;
            c += v * (k as f64 * theta).cos();
        }
        coefficients.push(2.0 * c / q as f64);
    }
    Ok(ChebyshevCoefficients { coefficients, interval })
}

/// Applies a Chebyshev-form filter with the three-term recurrence on the
/// shifted operator. No eigendecomposition is used; the spectrum of `s`
/// should lie inside the fitted interval.
pub fn chebyshev_apply(
    s: &Gso,
    cheb: &ChebyshevCoefficients,
    x: &ArrayView1<f64>,
) -> Result<Array1<f64>> {
    check_signal(s.n(), x)?;
    check_coeffs(&cheb.coefficients, "Chebyshev coefficients")?;
    let (lo, hi) = cheb.interval;
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::invalid(format!("invalid interval [{lo}, {hi}]")));
    }
    let center = 0.5 * (hi + lo);
    let half = 0.5 * (hi - lo);
    let op = SparseOp::from_matrix(s.matrix());
    // shifted operator: (S - center I) / half, applied on the fly
    let shifted = |v: &ArrayView1<f64>| -> Array1<f64> {
        let mut out = op.apply(v);
        out.zip_mut_with(v, |a, &b| *a = (*a - center * b) / half);
        out
    };
    let c = &cheb.coefficients;
    let mut t_prev = x.to_owned();
    let mut y = t_prev.mapv(|v| v * c[0] * 0.5);
    if c.len() == 1 {
        return Ok(y);
    }
    let mut t_cur = shifted(&x.view());
    y.scaled_add(c[1], &t_cur);
    for &ck in &c[2..] {
        let mut t_next = shifted(&t_cur.view());
        t_next.mapv_inplace(|v| 2.0 * v);
        t_next -= &t_prev;
        y.scaled_add(ck, &t_next);
        t_prev = t_cur;
        t_cur = t_next;
    }
    Ok(y)
}

/// Analyzes a signal against a bank of spectral kernels, one coefficient
/// vector per kernel.
pub fn kernel_filterbank(
    d: &SpectralDecomposition,
    kernels: &[&dyn Fn(f64) -> f64],
    x: &ArrayView1<f64>,
) -> Result<Vec<Array1<f64>>> {
    if kernels.is_empty() {
        return Err(Error::invalid("filterbank needs at least one kernel"));
    }
    kernels.iter().map(|k| apply_kernel(d, k, x)).collect()
}

/// Frame bounds of a kernel bank on this spectrum:
/// `A = min_k sum_j |H_j(lambda_k)|^2`, `B = max_k ...`. A tight frame
/// (`A = B = 1`) preserves total coefficient energy.
pub fn filterbank_frame_bounds(
    d: &SpectralDecomposition,
    kernels: &[&dyn Fn(f64) -> f64],
) -> Result<(f64, f64)> {
    if kernels.is_empty() {
        return Err(Error::invalid("filterbank needs at least one kernel"));
    }
    let values = d.real_values()?;
    let mut a = f64::INFINITY;
    let mut b = f64::NEG_INFINITY;
    for &lambda in values {
        let mut total = 0.0;
        for k in kernels {
            let g = k(lambda);
            if !g.is_finite() {
                return Err(Error::KernelNotFinite { lambda });
            }
            total += g * g;
        }
        a = a.min(total);
        b = b.max(total);
    }
    Ok((a, b))
}

/// Materializes a filter as its dense operator matrix `H(S)`.
///
/// Response form needs the matching decomposition; taps and rational
/// forms work directly on the operator.
pub fn filter_matrix(
    s: &Gso,
    d: Option<&SpectralDecomposition>,
    filter: &GraphFilter,
) -> Result<Array2<f64>> {
    match filter {
        GraphFilter::Taps { coefficients } => Ok(polynomial_matrix(s, coefficients)),
        GraphFilter::Response { .. } => {
            let d = d.ok_or_else(|| {
                Error::invalid("materializing a response filter needs its decomposition")
            })?;
            let values = response_values(d, filter)?;
            let v = d.basis_real()?;
            let vinv = d.inverse_real()?;
            let mut scaled = v.clone();
            for (mut col, &g) in scaled.columns_mut().into_iter().zip(values) {
                col.mapv_inplace(|e| e * g);
            }
            Ok(scaled.dot(vinv))
        }
        GraphFilter::Rational { denominator } => {
            let m = polynomial_matrix(s, denominator);
            let svd = linalg::svd(&m.view());
            let cond = svd.cond();
            if !cond.is_finite() || cond > CONDITION_LIMIT {
                return Err(Error::IllConditioned { cond, limit: CONDITION_LIMIT });
            }
            linalg::inverse(&m.view()).map_err(|_| Error::IllConditioned {
                cond: f64::INFINITY,
                limit: CONDITION_LIMIT,
            })
        }
    }
}
