//! Reduction of the generalized Lasso `min 0.5||Ax-b||^2 + lambda||Dx||_1`
//! to a constrained Lasso instance, and recovery of the original solution.
//!
//! For `D` of size p×n with `p > n` and full column rank, the SVD
//! `D = [U1 U2] [S1; 0] V1^T` turns the problem into a constrained Lasso in
//! `z` with design `A D^+`, constraint `U2^T z = 0` and the same penalty;
//! the original solution is `x = D^+ z` with `D^+ = V1 S1^{-1} U1^T`.

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::ProblemData;

/// Relative singular-value cutoff declaring `D` rank deficient.
const RANK_TOL: f64 = 1e-10;

/// The reduced instance together with what is needed to map back.
#[derive(Debug, Clone)]
pub struct GenLassoReduction {
    /// Constrained Lasso in `z`: design `A D^+`, constraint `U2^T z = 0`.
    pub reduced: ProblemData,
    /// `D^+ = V1 S1^{-1} U1^T`, n×p.
    pub d_pinv: Array2<f64>,
    /// Rows of `D` (dimension of `z`).
    pub p: usize,
    /// Constraint count `p - n`.
    pub s: usize,
}

pub(crate) struct ReducedMatrices {
    pub a_tilde: Array2<f64>,
    pub u2t: Array2<f64>,
    pub d_pinv: Array2<f64>,
}

/// SVD-based core of the reduction, independent of `b` and `lambda`.
pub(crate) fn reduce_matrices(
    a: &ArrayView2<'_, f64>,
    dmat: &ArrayView2<'_, f64>,
) -> Result<ReducedMatrices> {
    let (p, n) = dmat.dim();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "generalized-Lasso design columns",
            expected: n,
            actual: a.ncols(),
        });
    }
    if p < n {
        return Err(Error::InvalidParameter(format!(
            "the reduction requires at least as many penalty rows as variables (p = {p}, n = {n})"
        )));
    }
    if p == n {
        return Err(Error::DegenerateInstance(
            "square full-rank D gives an empty constraint block: the problem reduces to an \
             unconstrained Lasso, which is out of scope"
                .into(),
        ));
    }
    let (u, sv, vt) = linalg::svd_full(dmat)?;
    let (s_max, s_min) = (sv[0], sv[n - 1]);
    if s_min.is_nan() || s_min <= RANK_TOL * s_max {
        return Err(Error::RankDeficient(format!(
            "D must have full column rank: smallest singular value {s_min:e} vs largest {s_max:e}"
        )));
    }
    // D^+ = V S1^{-1} U1^T
    let mut v_scaled = vt.t().to_owned();
    for (i, col) in v_scaled.columns_mut().into_iter().enumerate() {
        let inv = 1.0 / sv[i];
        col.into_iter().for_each(|t| *t *= inv);
    }
    let u1 = u.slice(s![.., ..n]);
    let d_pinv = v_scaled.dot(&u1.t());
    let a_tilde = a.dot(&d_pinv);
    let u2t = u.slice(s![.., n..]).t().to_owned();
    Ok(ReducedMatrices {
        a_tilde,
        u2t,
        d_pinv,
    })
}

/// Builds the reduced constrained-Lasso instance for `(A, b, D, lambda)`.
pub fn genlasso_to_classo(
    a: &ArrayView2<'_, f64>,
    b: &ArrayView1<'_, f64>,
    dmat: &ArrayView2<'_, f64>,
    lambda: f64,
) -> Result<GenLassoReduction> {
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            context: "generalized-Lasso response length",
            expected: a.nrows(),
            actual: b.len(),
        });
    }
    let (p, n) = dmat.dim();
    let mats = reduce_matrices(a, dmat)?;
    let s = p - n;
    let reduced = ProblemData::new(
        mats.a_tilde,
        b.to_owned(),
        mats.u2t,
        Array1::zeros(s),
        lambda,
    )?;
    Ok(GenLassoReduction {
        reduced,
        d_pinv: mats.d_pinv,
        p,
        s,
    })
}

/// Maps a reduced-space solution back: `x = D^+ z`.
pub fn recover_solution(
    reduction: &GenLassoReduction,
    z: &ArrayView1<'_, f64>,
) -> Result<Array1<f64>> {
    if z.len() != reduction.p {
        return Err(Error::DimensionMismatch {
            context: "recover_solution z",
            expected: reduction.p,
            actual: z.len(),
        });
    }
    Ok(reduction.d_pinv.dot(z))
}
