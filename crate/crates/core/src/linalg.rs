//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Symmetric-definite generalized eigenproblem `K x = lambda M x`.
///
/// Reduced to a standard symmetric problem through the Cholesky factor of
/// `M`. Eigenvalues are returned in ascending order together with
/// `M`-orthonormal eigenvectors (columns).
pub fn generalized_symmetric_eigen(
    k: &DMatrix<f64>,
    m: &DMatrix<f64>,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Eigen("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Eigen("singular Cholesky factor".into()))?;
    let c = &linv * k * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let y = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    let vecs = linv.transpose() * y;
    Ok((vals, vecs))
}

/// Numerical rank: singular values above `rel_tol * sigma_max`.
pub fn numerical_rank(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = a.singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

pub fn is_positive_definite(m: &DMatrix<f64>) -> bool {
    m.clone().cholesky().is_some()
}

pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Exact symmetry check (bitwise equality of mirrored entries).
pub fn is_exactly_symmetric(a: &DMatrix<f64>) -> bool {
    let n = a.nrows();
    (0..n).all(|i| (0..i).all(|j| a[(i, j)] == a[(j, i)]))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeastSquares {
    pub x: Vec<f64>,
    /// Euclidean norm of the final residual.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Damped Gauss-Newton (Levenberg-Marquardt) with a central-difference
/// Jacobian. `f` returns `None` where the residual is undefined; such trial
/// points are rejected like any step that fails to decrease the residual.
pub fn levenberg_marquardt<F>(f: F, x0: &[f64], tol: f64, max_iter: usize) -> LeastSquares
where
    F: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let norm = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let Some(mut r) = f(&x) else {
        return LeastSquares { x, residual: f64::INFINITY, iterations: 0, converged: false };
    };
    let m = r.len();
    let mut rn = norm(&r);
    let mut lambda = 1e-3;
    for it in 0..max_iter {
        if rn <= tol {
            return LeastSquares { x, residual: rn, iterations: it, converged: true };
        }
        let mut jac = DMatrix::zeros(m, n);
        for k in 0..n {
            let h = 1e-7 * x[k].abs().max(1.0);
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            let (Some(fp), Some(fm)) = (f(&xp), f(&xm)) else {
                return LeastSquares { x, residual: rn, iterations: it, converged: false };
            };
            for i in 0..m {
                jac[(i, k)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let g = &jt * DVector::from_column_slice(&r);
        let mut accepted = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for k in 0..n {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
            }
            let Some(step) = a.lu().solve(&(-&g)) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = (0..n).map(|k| x[k] + step[k]).collect();
            match f(&trial) {
                Some(rt) if norm(&rt) < rn => {
                    x = trial;
                    rn = norm(&rt);
                    r = rt;
                    lambda = (lambda * 0.1).max(1e-15);
                    accepted = true;
                    break;
                }
                _ => lambda *= 10.0,
            }
        }
        if !accepted {
            return LeastSquares { x, residual: rn, iterations: it, converged: rn <= tol };
        }
    }
    LeastSquares { x, residual: rn, iterations: max_iter, converged: rn <= tol }
}
