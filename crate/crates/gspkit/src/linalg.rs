//! Dense linear-algebra kernels used across the crate.
//!
//! Everything here is deliberately dependency-free and deterministic:
//!
//! * [`jacobi_eigh`]: symmetric eigendecomposition by cyclic Jacobi
//!   rotations. Eigenvalues are returned in ascending order and every
//!   eigenvector is sign-fixed so its largest-magnitude entry is positive,
//!   which makes decompositions reproducible across runs and platforms.
//! * [`svd`]: one-sided Jacobi SVD. Chosen over an eigendecomposition of
//!   the Gram matrix because rank checks downstream need small singular
//!   values to high *relative* accuracy; squaring the matrix would bury
//!   anything below `eps * sigma_max^2`.
//! * [`Lu`]: LU factorization with partial pivoting, plus solve/inverse.
//!
//! Matrices are dense `ndarray` arrays; the intended scale is a few
//! hundred rows, where Jacobi methods are robust and fast enough.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

const MAX_JACOBI_SWEEPS: usize = 64;

pub fn fro_norm(a: &ArrayView2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn max_abs(a: &ArrayView2<f64>) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Relative symmetry test: `||a - a^T|| <= tol * ||a||` entrywise-max.
pub fn is_symmetric(a: &ArrayView2<f64>, tol: f64) -> bool {
    if a.nrows() != a.ncols() {
        return false;
    }
    let scale = max_abs(a).max(1.0);
    for i in 0..a.nrows() {
        for j in (i + 1)..a.ncols() {
            if (a[[i, j]] - a[[j, i]]).abs() > tol * scale {
                return false;
            }
        }
    }
    true
}

pub fn kron(a: &ArrayView2<f64>, b: &ArrayView2<f64>) -> Array2<f64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == 0.0 {
                continue;
            }
            for p in 0..br {
                for q in 0..bc {
                    out[[i * br + p, j * bc + q]] = aij * b[[p, q]];
                }
            }
        }
    }
    out
}

fn offdiag_norm(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += 2.0 * a[[i, j]] * a[[i, j]];
        }
    }
    s.sqrt()
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Returns `(values, vectors)` with `values` ascending and `vectors` holding
/// orthonormal eigenvectors as columns, `a * v_k = values[k] * v_k`. The input
/// must be square and symmetric; symmetry is the caller's contract and is not
/// re-checked here.
pub fn jacobi_eigh(a: &ArrayView2<f64>) -> Result<(Vec<f64>, Array2<f64>)> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "jacobi_eigh requires a square matrix");
    let mut m = a.to_owned();
    let mut v = Array2::<f64>::eye(n);
    if n <= 1 {
        return Ok((m.iter().copied().collect(), v));
    }
    let scale = fro_norm(&a.view());
    if scale == 0.0 {
        return Ok((vec![0.0; n], v));
    }
    let target = scale * f64::EPSILON * n as f64;
    let mut converged = false;
    for _ in 0..MAX_JACOBI_SWEEPS {
        if offdiag_norm(&m) <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                let app = m[[p, p]];
                let aqq = m[[q, q]];
                // Rotation annihilating a_pq; smaller-root tangent for stability.
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                m[[p, p]] = app - t * apq;
                m[[q, q]] = aqq + t * apq;
                m[[p, q]] = 0.0;
                m[[q, p]] = 0.0;
                for i in 0..n {
                    if i != p && i != q {
                        let aip = m[[i, p]];
                        let aiq = m[[i, q]];
                        m[[i, p]] = aip - s * (aiq + tau * aip);
                        m[[p, i]] = m[[i, p]];
                        m[[i, q]] = aiq + s * (aip - tau * aiq);
                        m[[q, i]] = m[[i, q]];
                    }
                }
                for i in 0..n {
                    let vip = v[[i, p]];
                    let viq = v[[i, q]];
                    v[[i, p]] = vip - s * (viq + tau * vip);
                    v[[i, q]] = viq + s * (vip - tau * viq);
                }
            }
        }
    }
    if !converged && offdiag_norm(&m) > target {
        return Err(Error::NumericalFailure {
            what: format!("Jacobi eigensolver did not converge in {MAX_JACOBI_SWEEPS} sweeps"),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].total_cmp(&m[[j, j]]));
    let values: Vec<f64> = order.iter().map(|&i| m[[i, i]]).collect();
    let mut vectors = Array2::<f64>::zeros((n, n));
    for (new, &old) in order.iter().enumerate() {
        let mut col = vectors.column_mut(new);
        col.assign(&v.column(old));
    }
    fix_column_signs(&mut vectors);
    Ok((values, vectors))
}

/// Flips column signs so each column's largest-magnitude entry (lowest index
/// on ties) is positive. No-op for zero columns.
pub fn fix_column_signs(m: &mut Array2<f64>) {
    let (rows, cols) = m.dim();
    for j in 0..cols {
        let mut best = 0usize;
        let mut mag = -1.0f64;
        for i in 0..rows {
            let a = m[[i, j]].abs();
            if a > mag {
                mag = a;
                best = i;
            }
        }
        if mag > 0.0 && m[[best, j]] < 0.0 {
            for i in 0..rows {
                m[[i, j]] = -m[[i, j]];
            }
        }
    }
}

/// Thin singular value decomposition, `a = u * diag(sigma) * v^T`.
///
/// `u` is `m x k` and `v` is `n x k` with `k = min(m, n)`; `sigma` is
/// nonnegative and descending. Columns of `u` whose singular value is zero
/// are zero columns (the factorization is still exact).
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Array2<f64>,
    pub sigma: Vec<f64>,
    pub v: Array2<f64>,
}

pub fn svd(a: &ArrayView2<f64>) -> Svd {
    let (m, n) = a.dim();
    if m < n {
        let t = a.t().to_owned();
        let s = svd(&t.view());
        return Svd { u: s.v, sigma: s.sigma, v: s.u };
    }
    // One-sided Jacobi: orthogonalize the columns of `u` while accumulating
    // the same rotations into `v`, preserving u = a * v.
    let mut u = a.to_owned();
    let mut v = Array2::<f64>::eye(n);
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut max_cos = 0.0f64;
        for i in 0..n.saturating_sub(1) {
            for j in (i + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = 0.0;
                for r in 0..m {
                    let x = u[[r, i]];
                    let y = u[[r, j]];
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let cosine = gamma.abs() / (alpha * beta).sqrt();
                max_cos = max_cos.max(cosine);
                if cosine <= 1e-15 {
                    continue;
                }
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..m {
                    let x = u[[r, i]];
                    let y = u[[r, j]];
                    u[[r, i]] = c * x - s * y;
                    u[[r, j]] = s * x + c * y;
                }
                for r in 0..n {
                    let x = v[[r, i]];
                    let y = v[[r, j]];
                    v[[r, i]] = c * x - s * y;
                    v[[r, j]] = s * x + c * y;
                }
            }
        }
        if max_cos <= 1e-15 {
            break;
        }
    }
    let mut sigma: Vec<f64> = (0..n)
        .map(|j| u.column(j).iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));
    let mut u_sorted = Array2::<f64>::zeros((m, n));
    let mut v_sorted = Array2::<f64>::zeros((n, n));
    for (new, &old) in order.iter().enumerate() {
        u_sorted.column_mut(new).assign(&u.column(old));
        v_sorted.column_mut(new).assign(&v.column(old));
    }
    sigma.sort_by(|a, b| b.total_cmp(a));
    for j in 0..n {
        if sigma[j] > 0.0 {
            let inv = 1.0 / sigma[j];
            u_sorted.column_mut(j).mapv_inplace(|x| x * inv);
        } else {
            u_sorted.column_mut(j).fill(0.0);
        }
    }
    // Deterministic signs: largest-magnitude entry of each left vector positive.
    for j in 0..n {
        let col = u_sorted.column(j);
        let mut best = 0usize;
        let mut mag = -1.0f64;
        for (i, &x) in col.iter().enumerate() {
            if x.abs() > mag {
                mag = x.abs();
                best = i;
            }
        }
        if mag > 0.0 && u_sorted[[best, j]] < 0.0 {
            u_sorted.column_mut(j).mapv_inplace(|x| -x);
            v_sorted.column_mut(j).mapv_inplace(|x| -x);
        }
    }
    Svd { u: u_sorted, sigma, v: v_sorted }
}

impl Svd {
    /// Largest singular value (0 for an empty factorization).
    pub fn sigma_max(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    /// Smallest of the `min(m, n)` singular values.
    pub fn sigma_min(&self) -> f64 {
        self.sigma.last().copied().unwrap_or(0.0)
    }

    /// Two-norm condition estimate; infinite when singular.
    pub fn cond(&self) -> f64 {
        let lo = self.sigma_min();
        if lo == 0.0 {
            f64::INFINITY
        } else {
            self.sigma_max() / lo
        }
    }

    /// Number of singular values at or below `rcond * sigma_max`.
    pub fn nullity(&self, rcond: f64) -> usize {
        let cut = rcond * self.sigma_max();
        self.sigma.iter().filter(|&&s| s <= cut).count()
    }

    /// Moore-Penrose pseudoinverse with relative cutoff `rcond * sigma_max`.
    pub fn pinv(&self, rcond: f64) -> Array2<f64> {
        let (m, k) = self.u.dim();
        let n = self.v.nrows();
        let cut = rcond * self.sigma_max();
        let mut out = Array2::<f64>::zeros((n, m));
        for j in 0..k {
            let s = self.sigma[j];
            if s <= cut || s == 0.0 {
                continue;
            }
            let inv = 1.0 / s;
            let vj = self.v.column(j);
            let uj = self.u.column(j);
            for r in 0..n {
                let vr = vj[r] * inv;
                if vr == 0.0 {
                    continue;
                }
                for c in 0..m {
                    out[[r, c]] += vr * uj[c];
                }
            }
        }
        out
    }
}

/// Pseudoinverse with the crate's standard relative cutoff.
pub fn pinv(a: &ArrayView2<f64>, rcond: f64) -> Array2<f64> {
    svd(a).pinv(rcond)
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Array2<f64>,
    piv: Vec<usize>,
    n: usize,
}

pub fn lu_factor(a: &ArrayView2<f64>) -> Result<Lu> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "lu_factor requires a square matrix");
    let mut lu = a.to_owned();
    let mut piv = vec![0usize; n];
    let scale = max_abs(a);
    if scale == 0.0 && n > 0 {
        return Err(Error::SingularSystem { what: "zero matrix".into() });
    }
    let tiny = scale * f64::EPSILON * n as f64;
    for k in 0..n {
        let mut p = k;
        let mut best = lu[[k, k]].abs();
        for i in (k + 1)..n {
            let v = lu[[i, k]].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best <= tiny {
            return Err(Error::SingularSystem {
                what: format!("pivot {best:.3e} at column {k} below threshold {tiny:.3e}"),
            });
        }
        piv[k] = p;
        if p != k {
            for j in 0..n {
                lu.swap([k, j], [p, j]);
            }
        }
        let pivot = lu[[k, k]];
        for i in (k + 1)..n {
            let f = lu[[i, k]] / pivot;
            lu[[i, k]] = f;
            if f != 0.0 {
                for j in (k + 1)..n {
                    lu[[i, j]] -= f * lu[[k, j]];
                }
            }
        }
    }
    Ok(Lu { lu, piv, n })
}

impl Lu {
    pub fn solve(&self, b: &ArrayView1<f64>) -> Array1<f64> {
        assert_eq!(b.len(), self.n);
        let mut x = b.to_owned();
        for k in 0..self.n {
            x.swap(k, self.piv[k]);
        }
        for k in 0..self.n {
            for j in 0..k {
                let f = self.lu[[k, j]];
                if f != 0.0 {
                    x[k] -= f * x[j];
                }
            }
        }
        for k in (0..self.n).rev() {
            for j in (k + 1)..self.n {
                let f = self.lu[[k, j]];
                if f != 0.0 {
                    x[k] -= f * x[j];
                }
            }
            x[k] /= self.lu[[k, k]];
        }
        x
    }
}

pub fn solve(a: &ArrayView2<f64>, b: &ArrayView1<f64>) -> Result<Array1<f64>> {
    Ok(lu_factor(a)?.solve(b))
}

pub fn inverse(a: &ArrayView2<f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    let lu = lu_factor(a)?;
    let mut out = Array2::<f64>::zeros((n, n));
    let mut e = Array1::<f64>::zeros(n);
    for j in 0..n {
        e.fill(0.0);
        e[j] = 1.0;
        let col = lu.solve(&e.view());
        out.column_mut(j).assign(&col);
    }
    Ok(out)
}
