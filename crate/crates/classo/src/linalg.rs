//! Dense kernels shared by the solvers.
//!
//! Matrices are kept in column-major layout so that column extraction (the
//! active-set submatrix copies) and the column-oriented matrix-vector
//! products below touch contiguous memory. Factorizations here are
//! deliberately single-threaded and deterministic; LAPACK is used only for
//! the SVD, which sits outside the solver hot path.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, ShapeBuilder};
use ndarray_linalg::SVD;

use crate::error::{Error, Result};

/// Rebuilds `a` in column-major (Fortran) layout unless it already is.
pub(crate) fn into_col_major(a: Array2<f64>) -> Array2<f64> {
    if a.t().is_standard_layout() {
        a
    } else {
        let mut out = Array2::zeros(a.raw_dim().f());
        out.assign(&a);
        out
    }
}

/// `y = M x` computed column-by-column (fast for column-major `M`).
pub(crate) fn mat_vec(m: &ArrayView2<'_, f64>, x: &ArrayView1<'_, f64>) -> Array1<f64> {
    debug_assert_eq!(m.ncols(), x.len());
    let mut y = Array1::zeros(m.nrows());
    for (j, &xj) in x.iter().enumerate() {
        if xj != 0.0 {
            y.scaled_add(xj, &m.column(j));
        }
    }
    y
}

/// `y = M^T x` as one dot product per column of `M`.
pub(crate) fn mat_t_vec(m: &ArrayView2<'_, f64>, x: &ArrayView1<'_, f64>) -> Array1<f64> {
    debug_assert_eq!(m.nrows(), x.len());
    Array1::from_iter((0..m.ncols()).map(|j| m.column(j).dot(x)))
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
pub(crate) struct CholeskyFactor {
    l: Array2<f64>,
}

/// Left-looking Cholesky on a copy of `a`. Returns `None` when a pivot is
/// not strictly positive (matrix numerically not SPD).
pub(crate) fn cholesky(a: &ArrayView2<'_, f64>) -> Option<CholeskyFactor> {
    let k = a.nrows();
    assert_eq!(k, a.ncols(), "cholesky requires a square matrix");
    let mut l = into_col_major(a.to_owned());
    for j in 0..k {
        // subtract contributions of previous columns: L[j.., j] -= L[j][t] * L[j.., t]
        for t in 0..j {
            let ljt = l[(j, t)];
            if ljt != 0.0 {
                let (prev, cur) = l.multi_slice_mut((ndarray::s![j.., t], ndarray::s![j.., j]));
                cur.into_iter()
                    .zip(prev)
                    .for_each(|(c, p)| *c -= ljt * *p);
            }
        }
        let pivot = l[(j, j)];
        if pivot.is_nan() || pivot <= 0.0 || pivot.is_infinite() {
            return None;
        }
        let root = pivot.sqrt();
        l.slice_mut(ndarray::s![j.., j]).mapv_inplace(|v| v / root);
        l[(j, j)] = root;
    }
    Some(CholeskyFactor { l })
}

impl CholeskyFactor {
    /// Solves `L L^T x = rhs`.
    pub(crate) fn solve(&self, rhs: &ArrayView1<'_, f64>) -> Array1<f64> {
        let k = self.l.nrows();
        assert_eq!(rhs.len(), k, "cholesky solve rhs length");
        let mut x = rhs.to_owned();
        // forward: L y = rhs
        for j in 0..k {
            x[j] /= self.l[(j, j)];
            let xj = x[j];
            if xj != 0.0 && j + 1 < k {
                let col = self.l.slice(ndarray::s![j + 1.., j]);
                x.slice_mut(ndarray::s![j + 1..]).scaled_add(-xj, &col);
            }
        }
        // backward: L^T x = y
        for j in (0..k).rev() {
            let tail = if j + 1 < k {
                self.l
                    .slice(ndarray::s![j + 1.., j])
                    .dot(&x.slice(ndarray::s![j + 1..]))
            } else {
                0.0
            };
            x[j] = (x[j] - tail) / self.l[(j, j)];
        }
        x
    }
}

pub(crate) struct CgOutcome {
    pub x: Array1<f64>,
    pub iters: usize,
    #[allow(dead_code)]
    pub residual_norm: f64,
    #[allow(dead_code)]
    pub converged: bool,
}

/// Conjugate gradient for `M x = rhs` with `M` given as an operator.
///
/// Stops when the residual norm drops below `tol_abs`. Errors out on
/// non-positive curvature, which for the systems solved here means the
/// operator lost positive definiteness to rounding.
pub(crate) fn conjugate_gradient<F>(
    apply: F,
    rhs: &ArrayView1<'_, f64>,
    tol_abs: f64,
    max_iter: usize,
) -> Result<CgOutcome>
where
    F: Fn(&ArrayView1<'_, f64>) -> Array1<f64>,
{
    let mut x = Array1::zeros(rhs.len());
    let mut r = rhs.to_owned();
    let mut rr = r.dot(&r);
    if rr.sqrt() <= tol_abs {
        return Ok(CgOutcome {
            x,
            iters: 0,
            residual_norm: rr.sqrt(),
            converged: true,
        });
    }
    let mut p = r.clone();
    for iter in 1..=max_iter {
        let ap = apply(&p.view());
        let curvature = p.dot(&ap);
        if curvature.is_nan() || curvature <= 0.0 {
            return Err(Error::Factorization(format!(
                "conjugate gradient met non-positive curvature {curvature:e}"
            )));
        }
        let alpha = rr / curvature;
        x.scaled_add(alpha, &p);
        r.scaled_add(-alpha, &ap);
        let rr_new = r.dot(&r);
        if rr_new.sqrt() <= tol_abs {
            return Ok(CgOutcome {
                x,
                iters: iter,
                residual_norm: rr_new.sqrt(),
                converged: true,
            });
        }
        let beta = rr_new / rr;
        rr = rr_new;
        p = &r + &(beta * p);
    }
    Ok(CgOutcome {
        x,
        iters: max_iter,
        residual_norm: rr.sqrt(),
        converged: false,
    })
}

/// Upper estimate of the largest eigenvalue of a symmetric PSD operator.
///
/// Power iteration from a fixed seeded start vector; the converged Rayleigh
/// quotient is inflated by 0.1% so the returned value sits above the true
/// spectral norm while staying within 1% of it.
pub(crate) fn gram_spectral_bound<F>(apply: F, dim: usize, max_iters: usize) -> f64
where
    F: Fn(&ArrayView1<'_, f64>) -> Array1<f64>,
{
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x9e3779b97f4a7c15);
    let mut v: Array1<f64> =
        Array1::from_iter((0..dim).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)));
    let norm = v.dot(&v).sqrt();
    if norm == 0.0 || dim == 0 {
        return 0.0;
    }
    v.mapv_inplace(|t| t / norm);
    let mut lambda = 0.0f64;
    for _ in 0..max_iters.max(1) {
        let mut av = apply(&v.view());
        let rayleigh = v.dot(&av);
        let av_norm = av.dot(&av).sqrt();
        if av_norm == 0.0 {
            return 0.0;
        }
        av.mapv_inplace(|t| t / av_norm);
        let delta = (rayleigh - lambda).abs();
        lambda = rayleigh;
        v = av;
        if delta <= 1e-13 * lambda.max(1.0) {
            break;
        }
    }
    lambda * 1.001
}

/// Full SVD `a = U diag(s) V^T` with square `U` (m×m) and `V^T` (n×n).
pub(crate) fn svd_full(a: &ArrayView2<'_, f64>) -> Result<(Array2<f64>, Array1<f64>, Array2<f64>)> {
    let (u, s, vt) = a
        .svd(true, true)
        .map_err(|e| Error::Factorization(format!("svd: {e}")))?;
    Ok((u.expect("svd requested U"), s, vt.expect("svd requested V^T")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn cholesky_solves_spd_system() {
        let a = array![[4.0, 2.0, 0.6], [2.0, 5.0, 1.0], [0.6, 1.0, 3.0]];
        let rhs = array![1.0, -2.0, 0.5];
        let f = cholesky(&a.view()).expect("spd");
        let x = f.solve(&rhs.view());
        let back = a.dot(&x);
        for i in 0..3 {
            assert_abs_diff_eq!(back[i], rhs[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = array![[1.0, 2.0], [2.0, 1.0]];
        assert!(cholesky(&a.view()).is_none());
    }

    #[test]
    fn cg_matches_direct_solve() {
        let a = array![[4.0, 1.0], [1.0, 3.0]];
        let rhs = array![1.0, 2.0];
        let out = conjugate_gradient(|p| a.dot(p), &rhs.view(), 1e-14, 50).unwrap();
        assert!(out.converged);
        let f = cholesky(&a.view()).unwrap();
        let direct = f.solve(&rhs.view());
        assert_abs_diff_eq!(out.x[0], direct[0], epsilon = 1e-10);
        assert_abs_diff_eq!(out.x[1], direct[1], epsilon = 1e-10);
    }

    #[test]
    fn spectral_bound_brackets_true_norm() {
        let a = array![[3.0, 1.0], [1.0, 2.0]];
        // eigenvalues of [[3,1],[1,2]]: (5 ± sqrt(5)) / 2
        let true_max = (5.0 + 5.0f64.sqrt()) / 2.0;
        let est = gram_spectral_bound(|v| a.dot(v), 2, 200);
        assert!(est >= true_max, "estimate {est} below true {true_max}");
        assert!(est <= 1.01 * true_max, "estimate {est} more than 1% above");
    }

    #[test]
    fn matvec_helpers_match_dot() {
        let a = into_col_major(array![[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]);
        let x = array![1.0, -1.0, 2.0];
        let y = array![0.5, 2.0];
        let ax = mat_vec(&a.view(), &x.view());
        let aty = mat_t_vec(&a.view(), &y.view());
        assert_abs_diff_eq!(ax[0], 5.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ax[1], 11.0, epsilon = 1e-15);
        assert_abs_diff_eq!(aty[0], 8.5, epsilon = 1e-15);
        assert_abs_diff_eq!(aty[1], 11.0, epsilon = 1e-15);
        assert_abs_diff_eq!(aty[2], 13.5, epsilon = 1e-15);
    }

    #[test]
    fn svd_full_shapes() {
        let d = array![[1.0, 0.0], [0.0, 1.0], [1.0, 2.0], [3.0, -1.0]];
        let (u, s, vt) = svd_full(&d.view()).unwrap();
        assert_eq!(u.dim(), (4, 4));
        assert_eq!(s.len(), 2);
        assert_eq!(vt.dim(), (2, 2));
        // U^T U = I
        let utu = u.t().dot(&u);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(utu[(i, j)], want, epsilon = 1e-12);
            }
        }
    }
}
