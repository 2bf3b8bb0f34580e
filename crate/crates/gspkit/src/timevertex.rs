//! Graph-time processing: product shift operators over the joint
//! vertex-time domain, the joint Fourier transform, and vector
//! autoregressive models whose coefficient matrices are either graph
//! filters in a known operator or free sparse matrices.
//!
//! An N x T matrix holds one time series per vertex row (time runs along
//! columns). Stacking it vertex-major, so that entry `(i, t)` lands at
//! index `i * T + t`, identifies the matrix domain with a product graph
//! on NT nodes whose operators are Kronecker combinations of the graph
//! factor `S_g` and the time factor `S_t` in that order, and the joint
//! transform `V_g^{-1} X (V_t^{-1})^T` with the NT-vector statement
//! `(V_g^{-1} kron V_t^{-1}) vec(X)`.

use ndarray::{s, Array1, Array2, ArrayView2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::Gso;
use crate::inverse::RANK_TOLERANCE;
use crate::linalg;
use crate::signal::SignalMatrix;
use crate::spectral::SpectralDecomposition;

/// How the graph and time factors combine into one operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductKind {
    Kronecker,
    Cartesian,
    Strong,
}

impl ProductKind {
    pub fn name(self) -> &'static str {
        match self {
            ProductKind::Kronecker => "kronecker",
            ProductKind::Cartesian => "cartesian",
            ProductKind::Strong => "strong",
        }
    }
}

/// A shift operator on the NT-node product of a graph and a time graph.
#[derive(Debug, Clone)]
pub struct ProductGso {
    matrix: Array2<f64>,
    kind: ProductKind,
    graph_factor: Gso,
    time_factor: Gso,
}

impl ProductGso {
    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn kind(&self) -> ProductKind {
        self.kind
    }

    /// The `(graph, time)` factors the product was built from.
    pub fn factors(&self) -> (&Gso, &Gso) {
        (&self.graph_factor, &self.time_factor)
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    /// Wraps the product matrix as a custom operator so it can feed the
    /// filtering and spectral machinery directly.
    pub fn into_gso(self) -> Result<Gso> {
        Gso::custom(self.matrix)
    }
}

/// Combines a graph operator and a time operator into one product-graph
/// operator: `kronecker = S_g kron S_t`, `cartesian = S_g kron I + I kron
/// S_t`, `strong` is their sum. Node `(i, t)` sits at index `i * T + t`.
pub fn product_gso(s_g: &Gso, s_t: &Gso, kind: ProductKind) -> ProductGso {
    let n = s_g.n();
    let t = s_t.n();
    let matrix = match kind {
        ProductKind::Kronecker => linalg::kron(&s_g.matrix().view(), &s_t.matrix().view()),
        ProductKind::Cartesian => {
            let eye_n = Array2::<f64>::eye(n);
            let eye_t = Array2::<f64>::eye(t);
            linalg::kron(&s_g.matrix().view(), &eye_t.view())
                + linalg::kron(&eye_n.view(), &s_t.matrix().view())
        }
        ProductKind::Strong => {
            let eye_n = Array2::<f64>::eye(n);
            let eye_t = Array2::<f64>::eye(t);
            linalg::kron(&s_g.matrix().view(), &s_t.matrix().view())
                + linalg::kron(&s_g.matrix().view(), &eye_t.view())
                + linalg::kron(&eye_n.view(), &s_t.matrix().view())
        }
    };
    ProductGso { matrix, kind, graph_factor: s_g.clone(), time_factor: s_t.clone() }
}

fn check_joint_dims(
    d_g: &SpectralDecomposition,
    d_t: &SpectralDecomposition,
    rows: usize,
    cols: usize,
) -> Result<()> {
    if rows != d_g.n() || cols != d_t.n() {
        return Err(Error::dims(format!(
            "joint transform expects a {}x{} matrix, got {rows}x{cols}",
            d_g.n(),
            d_t.n()
        )));
    }
    Ok(())
}

/// Joint graph-time Fourier transform `X_hat = V_g^{-1} X (V_t^{-1})^T`
/// (plain transpose, no conjugation). The time factor is typically the
/// decomposition of a directed cycle, which makes the time axis a DFT,
/// but any valid decomposition works.
pub fn joint_gft(
    d_g: &SpectralDecomposition,
    d_t: &SpectralDecomposition,
    xs: &ArrayView2<f64>,
) -> Result<Array2<Complex64>> {
    check_joint_dims(d_g, d_t, xs.nrows(), xs.ncols())?;
    let x = xs.mapv(|v| Complex64::new(v, 0.0));
    let vg_inv = d_g.inverse_complex();
    let vt_inv = d_t.inverse_complex();
    Ok(vg_inv.dot(&x).dot(&vt_inv.t()))
}

/// Inverse of [`joint_gft`]: `X = V_g X_hat V_t^T`.
pub fn joint_igft(
    d_g: &SpectralDecomposition,
    d_t: &SpectralDecomposition,
    x_hat: &ArrayView2<Complex64>,
) -> Result<Array2<Complex64>> {
    check_joint_dims(d_g, d_t, x_hat.nrows(), x_hat.ncols())?;
    let vg = d_g.basis_complex();
    let vt = d_t.basis_complex();
    Ok(vg.dot(x_hat).dot(&vt.t()))
}

/// Real-arithmetic joint transform for two real decompositions.
pub fn joint_gft_real(
    d_g: &SpectralDecomposition,
    d_t: &SpectralDecomposition,
    xs: &ArrayView2<f64>,
) -> Result<Array2<f64>> {
    check_joint_dims(d_g, d_t, xs.nrows(), xs.ncols())?;
    let vg_inv = d_g.inverse_real()?;
    let vt_inv = d_t.inverse_real()?;
    Ok(vg_inv.dot(xs).dot(&vt_inv.t()))
}

/// Inverse of [`joint_gft_real`].
pub fn joint_igft_real(
    d_g: &SpectralDecomposition,
    d_t: &SpectralDecomposition,
    x_hat: &ArrayView2<f64>,
) -> Result<Array2<f64>> {
    check_joint_dims(d_g, d_t, x_hat.nrows(), x_hat.ncols())?;
    let vg = d_g.basis_real()?;
    let vt = d_t.basis_real()?;
    Ok(vg.dot(x_hat).dot(&vt.t()))
}

/// Coefficients of a fitted (or hand-built) vector autoregression.
#[derive(Debug, Clone)]
pub enum VarCoefficients {
    /// `x_t = sum_p sum_l taps[p-1, l] S^l x_{t-p}`: every lag matrix is a
    /// polynomial in one shared shift operator.
    GraphTaps { taps: Array2<f64> },
    /// `x_t = A_0 x_t + sum_p A_p x_{t-p}`: free matrices, `matrices[p]`
    /// holding `A_p`, with the diagonal of `A_0` identically zero.
    Structural { matrices: Vec<Array2<f64>> },
}

/// A vector autoregression of order P on graph signals.
///
/// Stability is not enforced; the estimated spectral radius of the
/// companion matrix is reported in the diagnostics instead (infinite when
/// the structural form's `I - A_0` is singular).
#[derive(Debug, Clone)]
pub struct VarModel {
    order: usize,
    n: usize,
    coefficients: VarCoefficients,
    gso_fingerprint: Option<u64>,
    objective_trace: Vec<f64>,
    diagnostics: Vec<(String, f64)>,
}

/// Gelfand estimate `rho ~ ||A^64||^(1/64)`, rescaling between squarings
/// so powers of unstable operators cannot overflow. Accurate to a few
/// percent, which is all a stability diagnostic needs.
fn spectral_radius_estimate(a: &Array2<f64>) -> f64 {
    let first = linalg::fro_norm(&a.view());
    if first == 0.0 {
        return 0.0;
    }
    let mut b = a.mapv(|v| v / first);
    let mut log_scale = first.ln();
    for _ in 0..6 {
        let squared = b.dot(&b);
        let norm = linalg::fro_norm(&squared.view());
        if norm == 0.0 {
            return 0.0; // nilpotent
        }
        b = squared.mapv(|v| v / norm);
        log_scale = 2.0 * log_scale + norm.ln();
    }
    (log_scale / 64.0).exp()
}

/// Spectral radius of the block-companion form of the lag matrices
/// `A_1..A_P` (the one-step transition of the stacked history).
fn companion_radius(lags: &[Array2<f64>]) -> f64 {
    let n = lags[0].nrows();
    let p = lags.len();
    let mut companion = Array2::<f64>::zeros((n * p, n * p));
    for (k, a_p) in lags.iter().enumerate() {
        companion.slice_mut(s![0..n, k * n..(k + 1) * n]).assign(a_p);
    }
    for k in 1..p {
        for i in 0..n {
            companion[[k * n + i, (k - 1) * n + i]] = 1.0;
        }
    }
    spectral_radius_estimate(&companion)
}

impl VarModel {
    /// Builds a graph VAR from a `P x (L+1)` tap grid over the given
    /// operator; entry `(p-1, l)` multiplies `S^l x_{t-p}`.
    pub fn graph_var(taps: Array2<f64>, s: &Gso) -> Result<Self> {
        if taps.nrows() == 0 || taps.ncols() == 0 {
            return Err(Error::invalid("tap grid must have at least one lag and one power"));
        }
        if let Some(v) = taps.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("tap grid has non-finite entry {v}")));
        }
        let lags = lag_matrices(&taps, s);
        let radius = companion_radius(&lags);
        Ok(VarModel {
            order: taps.nrows(),
            n: s.n(),
            coefficients: VarCoefficients::GraphTaps { taps },
            gso_fingerprint: Some(s.fingerprint()),
            objective_trace: Vec::new(),
            diagnostics: vec![("stability_radius".to_string(), radius)],
        })
    }

    /// Builds a structural VAR from `[A_0, A_1, ..., A_P]`. `A_0` must
    /// have an exactly zero diagonal, which is what separates the
    /// contemporaneous part from plain feedthrough.
    pub fn structural(matrices: Vec<Array2<f64>>) -> Result<Self> {
        if matrices.len() < 2 {
            return Err(Error::invalid(
                "structural model needs A_0 plus at least one lag matrix",
            ));
        }
        let n = matrices[0].nrows();
        for (p, m) in matrices.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::dims(format!(
                    "coefficient matrix {p} is {}x{}, expected {n}x{n}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            if let Some(v) = m.iter().find(|v| !v.is_finite()) {
                return Err(Error::invalid(format!(
                    "coefficient matrix {p} has non-finite entry {v}"
                )));
            }
        }
        for i in 0..n {
            if matrices[0][[i, i]] != 0.0 {
                return Err(Error::invalid(format!(
                    "A_0 must have a zero diagonal, entry ({i}, {i}) is {}",
                    matrices[0][[i, i]]
                )));
            }
        }
        let radius = structural_radius(&matrices);
        Ok(VarModel {
            order: matrices.len() - 1,
            n,
            coefficients: VarCoefficients::Structural { matrices },
            gso_fingerprint: None,
            objective_trace: Vec::new(),
            diagnostics: vec![("stability_radius".to_string(), radius)],
        })
    }

    /// Autoregressive order P.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of vertices the model runs on.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &VarCoefficients {
        &self.coefficients
    }

    /// Fingerprint of the operator a graph-filter model is bound to;
    /// absent for structural models.
    pub fn gso_fingerprint(&self) -> Option<u64> {
        self.gso_fingerprint
    }

    pub fn mode_name(&self) -> &'static str {
        match self.coefficients {
            VarCoefficients::GraphTaps { .. } => "graph-var",
            VarCoefficients::Structural { .. } => "structural-var",
        }
    }

    /// Per-iteration objective for iterative fits; a single entry (the
    /// final residual) for closed-form fits; empty for hand-built models.
    pub fn objective_trace(&self) -> &[f64] {
        &self.objective_trace
    }

    pub fn diagnostics(&self) -> &[(String, f64)] {
        &self.diagnostics
    }
}

/// Reduced one-step transition radius of a structural model,
/// `(I - A_0)^{-1} [A_1 .. A_P]`; infinite when `I - A_0` is singular.
fn structural_radius(matrices: &[Array2<f64>]) -> f64 {
    let n = matrices[0].nrows();
    let mut lhs = Array2::<f64>::eye(n);
    lhs -= &matrices[0];
    let inv = match linalg::inverse(&lhs.view()) {
        Ok(inv) => inv,
        Err(_) => return f64::INFINITY,
    };
    let reduced: Vec<Array2<f64>> = matrices[1..].iter().map(|a| inv.dot(a)).collect();
    companion_radius(&reduced)
}

fn lag_matrices(taps: &Array2<f64>, s: &Gso) -> Vec<Array2<f64>> {
    let n = s.n();
    let l_top = taps.ncols() - 1;
    let mut powers = Vec::with_capacity(l_top + 1);
    powers.push(Array2::<f64>::eye(n));
    for _ in 0..l_top {
        let next = s.matrix().dot(powers.last().expect("seeded with identity"));
        powers.push(next);
    }
    (0..taps.nrows())
        .map(|p| {
            let mut a_p = Array2::<f64>::zeros((n, n));
            for (l, power) in powers.iter().enumerate() {
                a_p.scaled_add(taps[[p, l]], power);
            }
            a_p
        })
        .collect()
}

/// Fits graph-filter taps `h_{p,l}` so that `sum_{p,l} h_{p,l} S^l
/// x_{t-p}` tracks `x_t` in least squares over `t = P..T-1`.
///
/// With `causal` set, the filter order at lag p is capped at p (a degree-l
/// polynomial needs l hops, and information cannot travel further than
/// the elapsed delay); the excluded taps are fixed at zero. The
/// diagnostics report the residual energy fraction, the design
/// conditioning, and the companion spectral radius.
pub fn fit_graph_var(
    xs: &SignalMatrix,
    s: &Gso,
    p_order: usize,
    l_order: usize,
    causal: bool,
) -> Result<VarModel> {
    if xs.n() != s.n() {
        return Err(Error::dims(format!(
            "data has {} rows but the operator is {}x{}",
            xs.n(),
            s.n(),
            s.n()
        )));
    }
    if p_order == 0 {
        return Err(Error::invalid("autoregressive order must be at least 1"));
    }
    if xs.m() <= p_order {
        return Err(Error::invalid(format!(
            "need more than {p_order} time steps to fit order {p_order}, got {}",
            xs.m()
        )));
    }
    let n = xs.n();
    let t = xs.m();
    let x = xs.values();
    // S^l X for every power once, instead of per (t, p) matvecs
    let mut powers: Vec<Array2<f64>> = Vec::with_capacity(l_order + 1);
    powers.push(x.clone());
    for _ in 0..l_order {
        let next = s.matrix().dot(powers.last().expect("seeded with X"));
        powers.push(next);
    }
    let mut columns: Vec<(usize, usize)> = Vec::new();
    for p in 1..=p_order {
        let l_top = if causal { l_order.min(p) } else { l_order };
        for l in 0..=l_top {
            columns.push((p, l));
        }
    }
    let rows = n * (t - p_order);
    let mut design = Array2::<f64>::zeros((rows, columns.len()));
    let mut target = Array1::<f64>::zeros(rows);
    for (block, tt) in (p_order..t).enumerate() {
        for i in 0..n {
            let r = block * n + i;
            target[r] = x[[i, tt]];
            for (c, &(p, l)) in columns.iter().enumerate() {
                design[[r, c]] = powers[l][[i, tt - p]];
            }
        }
    }
    let svd = linalg::svd(&design.view());
    let nullity = svd.nullity(RANK_TOLERANCE);
    if nullity > 0 {
        return Err(Error::RankDeficientDesign { nullity });
    }
    let h = svd.pinv(RANK_TOLERANCE).dot(&target);
    let mut taps = Array2::<f64>::zeros((p_order, l_order + 1));
    for (c, &(p, l)) in columns.iter().enumerate() {
        taps[[p - 1, l]] = h[c];
    }
    let residual = &target - &design.dot(&h);
    let signal_energy = target.dot(&target);
    let fraction =
        if signal_energy > 0.0 { residual.dot(&residual) / signal_energy } else { 0.0 };
    let rss = residual.dot(&residual);
    let cond = svd.cond();

    let mut model = VarModel::graph_var(taps, s)?;
    model.objective_trace = vec![rss];
    model.diagnostics.push(("residual_energy_fraction".to_string(), fraction));
    model.diagnostics.push(("design_cond".to_string(), cond));
    Ok(model)
}

/// One-step-ahead prediction with the innovation set to zero. `history`
/// holds the last P signals as columns, oldest first, so its final column
/// is `x_{t-1}`. Graph VAR models need the operator they were fitted on
/// (checked by fingerprint); structural models solve
/// `(I - A_0) x_t = sum_p A_p x_{t-p}`.
pub fn predict_var(
    m: &VarModel,
    s: Option<&Gso>,
    history: &ArrayView2<f64>,
) -> Result<Array1<f64>> {
    if history.nrows() != m.n || history.ncols() != m.order {
        return Err(Error::dims(format!(
            "history must be {}x{} (columns oldest first), got {}x{}",
            m.n,
            m.order,
            history.nrows(),
            history.ncols()
        )));
    }
    match &m.coefficients {
        VarCoefficients::GraphTaps { taps } => {
            let s = s.ok_or_else(|| {
                Error::invalid("graph-var prediction needs the shift operator it was fitted on")
            })?;
            if let Some(expected) = m.gso_fingerprint {
                if s.fingerprint() != expected {
                    return Err(Error::FingerprintMismatch {
                        expected,
                        found: s.fingerprint(),
                    });
                }
            }
            let mut out = Array1::<f64>::zeros(m.n);
            for p in 1..=m.order {
                // oldest-first layout: x_{t-p} sits at column P - p
                let mut power = history.column(m.order - p).to_owned();
                for l in 0..taps.ncols() {
                    if l > 0 {
                        power = s.matrix().dot(&power);
                    }
                    out.scaled_add(taps[[p - 1, l]], &power);
                }
            }
            Ok(out)
        }
        VarCoefficients::Structural { matrices } => {
            let mut rhs = Array1::<f64>::zeros(m.n);
            for p in 1..=m.order {
                rhs += &matrices[p].dot(&history.column(m.order - p));
            }
            let mut lhs = Array2::<f64>::eye(m.n);
            lhs -= &matrices[0];
            linalg::solve(&lhs.view(), &rhs.view())
        }
    }
}

/// Fits a structural VAR by proximal gradient (ISTA): minimizes
/// `sum_t ||x_t - A_0 x_t - sum_p A_p x_{t-p}||^2 + lambda * sum_p ||A_p||_1`
/// with the diagonal of `A_0` projected to zero after every step. The
/// step size is `1 / (2 sigma_max^2)` of the stacked regressor matrix
/// (the gradient's Lipschitz constant), with halving as a roundoff
/// safeguard, so the recorded objective trace is non-increasing. Stops at
/// relative change below `tol` or after `max_iters` steps.
pub fn fit_structural_var(
    xs: &SignalMatrix,
    p_order: usize,
    lambda: f64,
    max_iters: usize,
    tol: f64,
) -> Result<VarModel> {
    if p_order == 0 {
        return Err(Error::invalid("autoregressive order must be at least 1"));
    }
    if xs.m() <= p_order {
        return Err(Error::invalid(format!(
            "need more than {p_order} time steps to fit order {p_order}, got {}",
            xs.m()
        )));
    }
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::invalid("sparsity penalty must be nonnegative"));
    }
    if max_iters == 0 {
        return Err(Error::invalid("need at least one iteration"));
    }
    if !tol.is_finite() || tol < 0.0 {
        return Err(Error::invalid("stopping tolerance must be nonnegative"));
    }
    let n = xs.n();
    let t = xs.m();
    let x = xs.values();
    let cols = t - p_order;
    // regressors z_t = [x_t; x_{t-1}; ...; x_{t-P}]; block 0 feeds A_0
    let mut z = Array2::<f64>::zeros((n * (p_order + 1), cols));
    let mut y = Array2::<f64>::zeros((n, cols));
    for (c, tt) in (p_order..t).enumerate() {
        for i in 0..n {
            y[[i, c]] = x[[i, tt]];
            for p in 0..=p_order {
                z[[p * n + i, c]] = x[[i, tt - p]];
            }
        }
    }
    let objective = |b: &Array2<f64>| {
        let r = &y - &b.dot(&z);
        let data: f64 = r.iter().map(|v| v * v).sum();
        let l1: f64 = b.iter().map(|v| v.abs()).sum();
        data + lambda * l1
    };

    let mut b = Array2::<f64>::zeros((n, n * (p_order + 1)));
    let mut value = objective(&b);
    let mut trace = vec![value];
    let sigma_max = linalg::svd(&z.view()).sigma_max();
    if sigma_max > 0.0 {
        let step = 1.0 / (2.0 * sigma_max * sigma_max);
        for _ in 0..max_iters {
            let grad = (b.dot(&z) - &y).dot(&z.t()) * 2.0;
            let mut tau = step;
            let (mut next, mut next_value);
            loop {
                let cut = tau * lambda;
                next = &b - &(&grad * tau);
                next.mapv_inplace(|v| {
                    if v > cut {
                        v - cut
                    } else if v < -cut {
                        v + cut
                    } else {
                        0.0
                    }
                });
                for i in 0..n {
                    next[[i, i]] = 0.0; // diagonal of the A_0 block
                }
                next_value = objective(&next);
                if next_value <= value || tau < 1e-18 {
                    break;
                }
                tau *= 0.5;
            }
            if next_value > value {
                break;
            }
            let settled = (value - next_value) <= tol * value.abs().max(1.0);
            b = next;
            value = next_value;
            trace.push(value);
            if settled {
                break;
            }
        }
    }

    let matrices: Vec<Array2<f64>> =
        (0..=p_order).map(|p| b.slice(s![.., p * n..(p + 1) * n]).to_owned()).collect();
    let mut model = VarModel::structural(matrices)?;
    model.objective_trace = trace;
    Ok(model)
}
