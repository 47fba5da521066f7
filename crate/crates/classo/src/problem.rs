//! Problem instance, primal/dual objectives and KKT accuracy metrics.
//!
//! The problem solved throughout the crate is
//!
//! ```text
//! minimize   0.5 ||A x - b||^2 + lambda ||x||_1
//! subject to B x = d
//! ```
//!
//! with dense `A` (m×n) and `B` (s×n). The dual lives in `(u, v, w)` with
//! `u` paired to the loss, `v` to the equality constraint and `w` to the
//! l1 term; at a KKT point `A^T u - B^T v + w = 0` and `B x = d`.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};
use crate::linalg;

/// One constrained-Lasso instance. Immutable after construction and safe to
/// share across threads; both matrices are stored column-major.
#[derive(Debug, Clone)]
pub struct ProblemData {
    a: Array2<f64>,
    b: Array1<f64>,
    bmat: Array2<f64>,
    d: Array1<f64>,
    lambda: f64,
}

impl ProblemData {
    /// Validates dimensions (`A`: m×n, `b`: m, `B`: s×n, `d`: s with
    /// m, n, s ≥ 1) and `lambda > 0`. Unconstrained instances (s = 0) are
    /// rejected: plain Lasso is out of scope here.
    pub fn new(
        a: Array2<f64>,
        b: Array1<f64>,
        bmat: Array2<f64>,
        d: Array1<f64>,
        lambda: f64,
    ) -> Result<Self> {
        let (m, n) = a.dim();
        let (s, nb) = bmat.dim();
        if m == 0 || n == 0 {
            return Err(Error::InvalidParameter(
                "design matrix must have at least one row and one column".into(),
            ));
        }
        if s == 0 {
            return Err(Error::InvalidParameter(
                "constraint matrix must have at least one row; unconstrained Lasso is unsupported"
                    .into(),
            ));
        }
        if nb != n {
            return Err(Error::DimensionMismatch {
                context: "constraint matrix columns",
                expected: n,
                actual: nb,
            });
        }
        if b.len() != m {
            return Err(Error::DimensionMismatch {
                context: "response length",
                expected: m,
                actual: b.len(),
            });
        }
        if d.len() != s {
            return Err(Error::DimensionMismatch {
                context: "constraint right-hand side length",
                expected: s,
                actual: d.len(),
            });
        }
        if lambda.is_nan() || lambda <= 0.0 || lambda.is_infinite() {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        Ok(Self {
            a: linalg::into_col_major(a),
            b,
            bmat: linalg::into_col_major(bmat),
            d,
            lambda,
        })
    }

    pub fn a(&self) -> ArrayView2<'_, f64> {
        self.a.view()
    }

    pub fn b(&self) -> ArrayView1<'_, f64> {
        self.b.view()
    }

    pub fn bmat(&self) -> ArrayView2<'_, f64> {
        self.bmat.view()
    }

    pub fn d(&self) -> ArrayView1<'_, f64> {
        self.d.view()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `(m, n, s)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.a.nrows(), self.a.ncols(), self.bmat.nrows())
    }
}

/// Primal estimate together with the three dual blocks.
#[derive(Debug, Clone)]
pub struct PrimalDualPoint {
    pub x: Array1<f64>,
    pub u: Array1<f64>,
    pub v: Array1<f64>,
    pub w: Array1<f64>,
}

impl PrimalDualPoint {
    pub fn zeros(m: usize, n: usize, s: usize) -> Self {
        Self {
            x: Array1::zeros(n),
            u: Array1::zeros(m),
            v: Array1::zeros(s),
            w: Array1::zeros(n),
        }
    }

    pub fn zeros_for(data: &ProblemData) -> Self {
        let (m, n, s) = data.dims();
        Self::zeros(m, n, s)
    }
}

/// Feasibility and gap metrics of one primal-dual point.
#[derive(Debug, Clone, Copy)]
pub struct Residuals {
    /// `||Bx - d|| / (1 + ||d||)`
    pub eta_p: f64,
    /// `||A^T u - B^T v + w||` (absolute, as defined)
    pub eta_d: f64,
    /// `(obj_P - obj_D) / (1 + |obj_P| + |obj_D|)`
    pub eta_relgap: f64,
    /// `max(eta_p, eta_d)`
    pub eta_classo: f64,
}

/// `0.5 ||A x - b||^2 + lambda ||x||_1`.
pub fn objective_primal(data: &ProblemData, x: &ArrayView1<'_, f64>) -> Result<f64> {
    let (_, n, _) = data.dims();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            context: "objective_primal x",
            expected: n,
            actual: x.len(),
        });
    }
    let mut r = linalg::mat_vec(&data.a(), x);
    r -= &data.b;
    let fit = 0.5 * r.dot(&r);
    let l1: f64 = x.iter().map(|t| t.abs()).sum();
    Ok(fit + data.lambda * l1)
}

/// `-(0.5 ||u||^2 + <b, u> - <d, v>)`.
pub fn objective_dual(
    data: &ProblemData,
    u: &ArrayView1<'_, f64>,
    v: &ArrayView1<'_, f64>,
) -> Result<f64> {
    let (m, _, s) = data.dims();
    if u.len() != m {
        return Err(Error::DimensionMismatch {
            context: "objective_dual u",
            expected: m,
            actual: u.len(),
        });
    }
    if v.len() != s {
        return Err(Error::DimensionMismatch {
            context: "objective_dual v",
            expected: s,
            actual: v.len(),
        });
    }
    Ok(-(0.5 * u.dot(u) + data.b.dot(u) - data.d.dot(v)))
}

/// KKT residuals of `pt` with respect to `data`.
pub fn residuals(data: &ProblemData, pt: &PrimalDualPoint) -> Result<Residuals> {
    let (m, n, s) = data.dims();
    if pt.w.len() != n {
        return Err(Error::DimensionMismatch {
            context: "residuals w",
            expected: n,
            actual: pt.w.len(),
        });
    }
    let obj_p = objective_primal(data, &pt.x.view())?;
    let obj_d = objective_dual(data, &pt.u.view(), &pt.v.view())?;
    debug_assert_eq!(pt.u.len(), m);
    debug_assert_eq!(pt.v.len(), s);

    let mut bx = linalg::mat_vec(&data.bmat(), &pt.x.view());
    bx -= &data.d;
    let d_norm = data.d.dot(&data.d).sqrt();
    let eta_p = bx.dot(&bx).sqrt() / (1.0 + d_norm);

    let mut stat = linalg::mat_t_vec(&data.a(), &pt.u.view());
    stat -= &linalg::mat_t_vec(&data.bmat(), &pt.v.view());
    stat += &pt.w;
    let eta_d = stat.dot(&stat).sqrt();

    let eta_relgap = (obj_p - obj_d) / (1.0 + obj_p.abs() + obj_d.abs());
    Ok(Residuals {
        eta_p,
        eta_d,
        eta_relgap,
        eta_classo: eta_p.max(eta_d),
    })
}

/// Penalty weight from the fraction rule `lambda = lambda_l ||A^T b||_inf`.
pub fn lambda_from_fraction(
    a: &ArrayView2<'_, f64>,
    b: &ArrayView1<'_, f64>,
    lambda_l: f64,
) -> Result<f64> {
    if lambda_l.is_nan() || lambda_l <= 0.0 || lambda_l >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "lambda_l must lie in (0, 1), got {lambda_l}"
        )));
    }
    if a.nrows() != b.len() {
        return Err(Error::DimensionMismatch {
            context: "lambda_from_fraction b",
            expected: a.nrows(),
            actual: b.len(),
        });
    }
    let atb = linalg::mat_t_vec(a, b);
    let max_abs = atb.iter().fold(0.0f64, |acc, t| acc.max(t.abs()));
    if max_abs == 0.0 {
        return Err(Error::DegenerateInstance(
            "||A^T b||_inf is zero; the penalty rule cannot produce a positive lambda".into(),
        ));
    }
    Ok(lambda_l * max_abs)
}

/// Number of dominant entries: the smallest k whose k largest-magnitude
/// entries account for 99.9% of `||x||_1`. Zero for the zero vector.
pub fn nnz(x: &ArrayView1<'_, f64>) -> usize {
    let l1: f64 = x.iter().map(|t| t.abs()).sum();
    if l1 == 0.0 {
        return 0;
    }
    let mut mags: Vec<f64> = x.iter().map(|t| t.abs()).collect();
    mags.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite entries"));
    let target = 0.999 * l1;
    let mut acc = 0.0;
    for (k, m) in mags.iter().enumerate() {
        acc += m;
        if acc >= target {
            return k + 1;
        }
    }
    mags.len()
}
