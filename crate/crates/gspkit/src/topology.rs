//! Graph learning: estimating a topology from data, either by making the
//! observed signals smooth on the learned Laplacian, by thresholding a
//! statistical association between vertex rows, or by fixing the
//! operator's eigenvectors and optimizing its eigenvalues for sparsity.

use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Gso, GsoVariant};
use crate::inverse::RANK_TOLERANCE;
use crate::linalg;
use crate::signal::SignalMatrix;
use crate::stochastic;

/// Constraint residuals above this mean the learner left its feasible set
/// (or, for spectral templates, that the feasible set is empty).
pub const CONSTRAINT_TOL: f64 = 1e-8;

/// Entries below this fraction of the largest magnitude are zeroed in the
/// operator returned by [`spectral_template_adjacency`].
const SUPPORT_CUT: f64 = 1e-6;

/// Consecutive near-stationary iterations before the subgradient loop stops.
const STALL_LIMIT: usize = 50;

/// Least-squares constraint residuals above this fraction of the
/// normalization mark a template span that cannot represent any hollow,
/// scale-normalized matrix even approximately. Sampling noise in estimated
/// eigenvectors produces residuals orders of magnitude smaller, so this
/// separates structural infeasibility from estimation error.
const INFEASIBLE_RESIDUAL: f64 = 0.1;

/// Output of a learning run: the estimated operator plus the optimizer's
/// audit trail.
///
/// `objective_trace` is non-increasing for every learner. The smoothness
/// learner records its penalized objective directly (monotone by line
/// search); the template learner records the best l1 value reached so far,
/// since raw subgradient iterates oscillate.
#[derive(Debug, Clone)]
pub struct LearnedGraph {
    gso: Gso,
    objective_trace: Vec<f64>,
    diagnostics: Vec<(String, f64)>,
}

impl LearnedGraph {
    pub fn gso(&self) -> &Gso {
        &self.gso
    }

    /// The learned topology as an edge list (zero-weight pairs omitted).
    pub fn graph(&self) -> &Graph {
        self.gso.source().expect("learned operators are assembled from a graph")
    }

    pub fn objective_trace(&self) -> &[f64] {
        &self.objective_trace
    }

    /// Named constraint residuals measured on the returned operator.
    pub fn diagnostics(&self) -> &[(String, f64)] {
        &self.diagnostics
    }
}

/// Upper-triangle vertex pairs in row-major order; the edge-weight
/// parameterization used by the smoothness learner.
fn vertex_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
        }
    }
    pairs
}

/// Euclidean projection of `v` onto the scaled simplex
/// `{w : w >= 0, sum w = s}` for `s > 0`, by the sort-and-shift rule.
fn project_scaled_simplex(v: &Array1<f64>, s: f64) -> Array1<f64> {
    let mut sorted: Vec<f64> = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("weights stay finite"));
    let mut cumulative = 0.0;
    let mut shift = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - s) / (k + 1) as f64;
        if u - candidate > 0.0 {
            shift = candidate;
        }
    }
    v.mapv(|x| (x - shift).max(0.0))
}

/// Learns a combinatorial Laplacian on which the columns of `xs` are
/// smooth, by projected gradient descent over nonnegative edge weights.
///
/// The objective is the mean smoothness `(1/M) tr(X^T L X)` plus
/// `beta * ||L||_F^2`, minimized subject to `sum w = norm_trace / 2` (so
/// `tr(L) = norm_trace` fixes the scale). The smoothness term is averaged
/// over columns so `beta` does not have to track the sample count. Each
/// step projects onto the scaled simplex and backtracks (halving from 1.0)
/// until the objective decreases, so the recorded trace is monotone.
///
/// Stops when the relative objective change drops below `tol` or after
/// `max_iters` steps. Data whose columns are all constant across vertices
/// make every graph equally smooth and are rejected.
pub fn learn_smooth_laplacian(
    xs: &SignalMatrix,
    beta: f64,
    norm_trace: f64,
    max_iters: usize,
    tol: f64,
) -> Result<LearnedGraph> {
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::invalid("smoothness regularization beta must be positive"));
    }
    if !norm_trace.is_finite() || norm_trace <= 0.0 {
        return Err(Error::invalid("trace normalization must be positive"));
    }
    if !tol.is_finite() || tol < 0.0 {
        return Err(Error::invalid("stopping tolerance must be nonnegative"));
    }
    if xs.n() < 2 {
        return Err(Error::invalid("smoothness learning needs at least two vertices"));
    }
    if xs.m() < 2 {
        return Err(Error::invalid("smoothness learning needs at least two columns"));
    }
    let n = xs.n();
    let x = xs.values();
    let m = xs.m() as f64;
    let pairs = vertex_pairs(n);
    // d_e = mean squared difference across pair e, so that w . d equals
    // (1/M) tr(X^T L X) for the Laplacian assembled from w
    let d = Array1::from_iter(pairs.iter().map(|&(i, j)| {
        let mut acc = 0.0;
        for k in 0..xs.m() {
            let diff = x[[i, k]] - x[[j, k]];
            acc += diff * diff;
        }
        acc / m
    }));
    if d.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateData {
            what: "every column is constant across vertices, so any graph is equally smooth"
                .into(),
        });
    }

    let degrees = |w: &Array1<f64>| {
        let mut deg = Array1::<f64>::zeros(n);
        for (e, &(i, j)) in pairs.iter().enumerate() {
            deg[i] += w[e];
            deg[j] += w[e];
        }
        deg
    };
    // ||L||_F^2 = 2 sum w^2 + sum deg^2: off-diagonals appear twice
    let objective = |w: &Array1<f64>| {
        let deg = degrees(w);
        let frob = 2.0 * w.dot(w) + deg.dot(&deg);
        w.dot(&d) + beta * frob
    };
    let gradient = |w: &Array1<f64>| {
        let deg = degrees(w);
        Array1::from_iter(
            pairs
                .iter()
                .enumerate()
                .map(|(e, &(i, j))| d[e] + beta * (4.0 * w[e] + 2.0 * (deg[i] + deg[j]))),
        )
    };

    let budget = norm_trace / 2.0;
    let mut w = Array1::from_elem(pairs.len(), budget / pairs.len() as f64);
    let mut value = objective(&w);
    let mut trace = vec![value];
    for _ in 0..max_iters {
        let g = gradient(&w);
        let mut step = 1.0;
        let (mut next, mut next_value);
        loop {
            next = project_scaled_simplex(&(&w - &(&g * step)), budget);
            next_value = objective(&next);
            if next_value <= value || step < 1e-14 {
                break;
            }
            step *= 0.5;
        }
        if next_value > value {
            break; // no descent direction left at the smallest trial step
        }
        let settled = (value - next_value) <= tol * value.abs().max(1.0);
        w = next;
        value = next_value;
        trace.push(value);
        if settled {
            break;
        }
    }

    let edges: Vec<Edge> = pairs
        .iter()
        .zip(w.iter())
        .filter(|&(_, &weight)| weight > 0.0)
        .map(|(&(i, j), &weight)| Edge::new(i, j, weight))
        .collect();
    let graph = Graph::new(n, edges, false)?;
    let gso = Gso::from_graph(&graph, GsoVariant::CombinatorialLaplacian)?;
    let l = gso.matrix();
    let mut row_sum: f64 = 0.0;
    let mut positive_offdiag: f64 = 0.0;
    let mut lap_trace = 0.0;
    for i in 0..n {
        row_sum = row_sum.max(l.row(i).sum().abs());
        lap_trace += l[[i, i]];
        for j in 0..n {
            if i != j {
                positive_offdiag = positive_offdiag.max(l[[i, j]]);
            }
        }
    }
    let diagnostics = vec![
        ("max_row_sum".to_string(), row_sum),
        ("max_positive_offdiag".to_string(), positive_offdiag.max(0.0)),
        ("trace_gap".to_string(), (lap_trace - norm_trace).abs()),
    ];
    Ok(LearnedGraph { gso, objective_trace: trace, diagnostics })
}

/// Connects vertex pairs whose rows correlate: edge `(i, j)` with weight
/// `|corr(row_i, row_j)|` whenever that exceeds `threshold` (strictly).
/// Rows with zero variance have no defined correlation and stay isolated.
pub fn correlation_graph(xs: &SignalMatrix, threshold: f64) -> Result<Graph> {
    if xs.m() < 2 {
        return Err(Error::invalid("correlation needs at least two columns"));
    }
    if !threshold.is_finite() {
        return Err(Error::invalid("correlation threshold must be finite"));
    }
    let n = xs.n();
    let x = xs.values();
    let m = xs.m() as f64;
    let mut centered = Array2::<f64>::zeros((n, xs.m()));
    let mut norms = vec![0.0; n];
    for i in 0..n {
        let mean = x.row(i).sum() / m;
        for k in 0..xs.m() {
            centered[[i, k]] = x[[i, k]] - mean;
        }
        norms[i] = centered.row(i).dot(&centered.row(i)).sqrt();
    }
    let mut edges = Vec::new();
    for i in 0..n {
        if norms[i] == 0.0 {
            continue;
        }
        for j in i + 1..n {
            if norms[j] == 0.0 {
                continue;
            }
            let r = centered.row(i).dot(&centered.row(j)) / (norms[i] * norms[j]);
            if r.abs() > threshold {
                edges.push(Edge::new(i, j, r.abs()));
            }
        }
    }
    Graph::new(n, edges, false)
}

/// Connects vertex pairs with a large partial correlation: inverts the
/// (ridge-stabilized) second-moment matrix `C + ridge I` and keeps edges
/// where `|P_ij| > threshold`, weighted by `|P_ij|`. Rows are not
/// centered, matching the `(1/M) X X^T` convention of
/// [`stochastic::sample_covariance`] with `subtract_mean = false`.
///
/// `ridge = 0` is allowed but surfaces the solver's error when `C` is
/// singular.
pub fn precision_graph(xs: &SignalMatrix, ridge: f64, threshold: f64) -> Result<Graph> {
    if xs.m() < 2 {
        return Err(Error::invalid("precision estimation needs at least two columns"));
    }
    if !ridge.is_finite() || ridge < 0.0 {
        return Err(Error::invalid("ridge must be nonnegative"));
    }
    if !threshold.is_finite() {
        return Err(Error::invalid("precision threshold must be finite"));
    }
    let c = stochastic::sample_covariance(xs, false)?;
    let n = xs.n();
    let mut a = c.matrix().clone();
    for i in 0..n {
        a[[i, i]] += ridge;
    }
    let p = linalg::inverse(&a.view())?;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            // inverse of a symmetric matrix, up to roundoff
            let v = 0.5 * (p[[i, j]] + p[[j, i]]);
            if v.abs() > threshold {
                edges.push(Edge::new(i, j, v.abs()));
            }
        }
    }
    Graph::new(n, edges, false)
}

/// Recovers a sparse adjacency whose eigenvectors are the given columns:
/// minimizes `||V diag(mu) V^T||_1` over the eigenvalues `mu`, subject to
/// a zero diagonal and the scale normalization `sum_j S_1j = 1`, by
/// projected subgradient descent with step `sparsity_weight / sqrt(k+1)`.
///
/// The affine constraints are enforced after every step through a
/// pseudoinverse projection. Templates estimated from data leave the
/// stacked system inconsistent at the estimation-noise level, so the
/// projection lands on its least-squares solution and the achieved
/// residual is reported in the diagnostics; only a residual so large that
/// no approximately hollow, normalized matrix exists in the span (as for
/// `vhat = I`, which spans only diagonal matrices) is an error. The best
/// iterate by l1 norm is returned, symmetrized, with entries below
/// `1e-6` of the largest magnitude zeroed.
pub fn spectral_template_adjacency(
    vhat: &ArrayView2<f64>,
    sparsity_weight: f64,
    max_iters: usize,
) -> Result<LearnedGraph> {
    let n = vhat.nrows();
    if vhat.ncols() != n {
        return Err(Error::dims(format!(
            "template matrix must be square, got {}x{}",
            vhat.nrows(),
            vhat.ncols()
        )));
    }
    if n < 2 {
        return Err(Error::invalid("template learning needs at least two vertices"));
    }
    if !sparsity_weight.is_finite() || sparsity_weight <= 0.0 {
        return Err(Error::invalid("sparsity weight must be positive"));
    }
    if max_iters == 0 {
        return Err(Error::invalid("need at least one iteration"));
    }
    let gram = vhat.t().dot(vhat);
    let mut gram_err: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            gram_err = gram_err.max((gram[[i, j]] - target).abs());
        }
    }
    if gram_err > CONSTRAINT_TOL {
        return Err(Error::invalid(format!(
            "template columns are not orthonormal: max Gram deviation {gram_err:.2e}"
        )));
    }

    // S(mu)_ii = sum_k mu_k V_ik^2 and sum_j S(mu)_1j = sum_k mu_k V_0k (1^T v_k):
    // both linear in mu, stacked as A mu = b with b = e_{N+1}
    let mut a = Array2::<f64>::zeros((n + 1, n));
    for i in 0..n {
        for k in 0..n {
            a[[i, k]] = vhat[[i, k]] * vhat[[i, k]];
        }
    }
    for k in 0..n {
        a[[n, k]] = vhat[[0, k]] * vhat.column(k).sum();
    }
    let mut b = Array1::<f64>::zeros(n + 1);
    b[n] = 1.0;
    let a_pinv = linalg::pinv(&a.view(), RANK_TOLERANCE);
    let project = |mu: &Array1<f64>| {
        let residual = a.dot(mu) - &b;
        mu - &a_pinv.dot(&residual)
    };
    let residual_norm = |mu: &Array1<f64>| {
        let r = a.dot(mu) - &b;
        r.dot(&r).sqrt()
    };

    let mut mu = project(&Array1::zeros(n));
    let feasibility = residual_norm(&mu);
    if feasibility > INFEASIBLE_RESIDUAL {
        return Err(Error::InfeasibleConstraints { residual: feasibility });
    }

    let assemble = |mu: &Array1<f64>| {
        let mut scaled = vhat.to_owned();
        for (mut col, &factor) in scaled.columns_mut().into_iter().zip(mu.iter()) {
            col.mapv_inplace(|v| v * factor);
        }
        scaled.dot(&vhat.t())
    };
    let l1 = |s: &Array2<f64>| s.iter().map(|v| v.abs()).sum::<f64>();

    let mut s = assemble(&mu);
    let mut best_value = l1(&s);
    let mut best_mu = mu.clone();
    let mut trace = vec![best_value];
    let mut stall = 0usize;
    for k in 0..max_iters {
        // subgradient of ||V diag(mu) V^T||_1 in mu is diag(V^T sign(S) V)
        let sign = s.mapv(|v| {
            if v > 0.0 {
                1.0
            } else if v < 0.0 {
                -1.0
            } else {
                0.0
            }
        });
        let vsv = vhat.t().dot(&sign).dot(vhat);
        let g = Array1::from_iter((0..n).map(|i| vsv[[i, i]]));
        let step = sparsity_weight / ((k + 1) as f64).sqrt();
        mu = project(&(&mu - &(&g * step)));
        s = assemble(&mu);
        let value = l1(&s);
        let before = *trace.last().expect("trace starts nonempty");
        if value < best_value {
            best_value = value;
            best_mu = mu.clone();
        }
        trace.push(best_value);
        if before - best_value <= 1e-8 * before.abs().max(1.0) {
            stall += 1;
            if stall >= STALL_LIMIT {
                break;
            }
        } else {
            stall = 0;
        }
    }

    let mut out = assemble(&best_mu);
    let transposed = out.t().to_owned();
    out += &transposed;
    out *= 0.5;
    let peak = linalg::max_abs(&out.view());
    let cut = SUPPORT_CUT * peak;
    out.mapv_inplace(|v| if v.abs() < cut { 0.0 } else { v });

    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if out[[i, j]] != 0.0 {
                edges.push(Edge::new(i, j, out[[i, j]]));
            }
        }
    }
    let graph = Graph::new(n, edges, false)?;
    let gso = Gso::from_graph(&graph, GsoVariant::Adjacency)?;
    // optimality of the projection: A^T (A mu - b) vanishes at a
    // least-squares point even when the equations themselves cannot
    let gradient_norm = {
        let r = a.dot(&best_mu) - &b;
        let g = a.t().dot(&r);
        g.dot(&g).sqrt()
    };
    let diagnostics = vec![
        ("constraint_residual".to_string(), residual_norm(&best_mu)),
        ("projection_gradient".to_string(), gradient_norm),
        ("support_threshold".to_string(), cut),
    ];
    Ok(LearnedGraph { gso, objective_trace: trace, diagnostics })
}
