//! Semismooth Newton solver for the augmented-Lagrangian subproblem.
//!
//! For a fixed multiplier estimate `x` and penalty `sigma`, the subproblem
//! reduces to minimizing the smooth dual surrogate
//!
//! ```text
//! theta(u, v) = 0.5||u||^2 + <b, u> - <d, v>
//!               + ||prox_l1(z, sigma*lambda)||^2 / (2 sigma) - ||x||^2 / (2 sigma)
//! ```
//!
//! over `y = (u, v)`, where `z = x - sigma (A^T u - B^T v)`. The gradient is
//! piecewise smooth; a generalized Hessian is `V = H + sigma Abar Q Abar^T`
//! with `Abar = [A; -B]`, `H = diag(I_m, 0)` and `Q` the 0/1 diagonal from
//! [`crate::prox::clarke_diag`]. Each Newton system is regularized on the
//! `v` block only and carries at most rank `r = |active|` beyond the
//! identity, which the three solve strategies below exploit.

use ndarray::{s, Array1, Array2, ArrayView1, ShapeBuilder};

use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::ProblemData;
use crate::prox::{clarke_diag, prox_l1, proj_linf, ActiveSet};

/// Regularizer floor keeping the v-block numerically SPD once the gradient
/// norm underflows.
const EPS_REG_FLOOR: f64 = 1e-12;

/// Hard cap on Armijo backtracking steps before declaring stagnation.
const LINE_SEARCH_CAP: usize = 50;

/// How the regularized Newton system is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Pick per iteration: SMW when `2r <= m+s`, otherwise Cholesky while
    /// `m+s` stays under [`SsnConfig::cg_threshold`], otherwise CG.
    Auto,
    /// Factor the full `(m+s) x (m+s)` system `I + sigma Ahat Ahat^T`.
    Cholesky,
    /// Sherman-Morrison-Woodbury through the small `r x r` Gram system.
    Smw,
    /// Conjugate gradient on the operator form.
    Cg,
}

/// Tunables of the inner solver.
#[derive(Debug, Clone)]
pub struct SsnConfig {
    /// Armijo slope, in `(0, 1/2)`.
    pub mu: f64,
    /// Residual cap for inexact (CG) solves, in `(0, 1)`.
    pub eta_bar: f64,
    /// Superlinear exponent in the inexactness rule, in `(0, 1]`.
    pub tau: f64,
    /// Regularizer schedule coefficients `eps_j = tau1 * min(tau2, ||grad||)`.
    pub tau1: f64,
    pub tau2: f64,
    /// Backtracking ratio, in `(0, 1)`.
    pub delta: f64,
    /// Maximum Newton steps per subproblem.
    pub max_inner: usize,
    /// Gradient-norm stop used by [`ssn_solve`].
    pub grad_tol: f64,
    /// Iteration cap for CG solves.
    pub max_cg: usize,
    /// Largest `m+s` for which direct factorization is attempted under
    /// [`Strategy::Auto`].
    pub cg_threshold: usize,
    pub strategy: Strategy,
}

impl Default for SsnConfig {
    fn default() -> Self {
        Self {
            mu: 0.1,
            eta_bar: 0.1,
            tau: 0.5,
            tau1: 0.1,
            tau2: 0.1,
            delta: 0.5,
            max_inner: 100,
            grad_tol: 1e-10,
            max_cg: 500,
            cg_threshold: 10_000,
            strategy: Strategy::Auto,
        }
    }
}

impl SsnConfig {
    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, msg: &str) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter(msg.into()))
            }
        }
        check(self.mu > 0.0 && self.mu < 0.5, "mu must lie in (0, 1/2)")?;
        check(
            self.eta_bar > 0.0 && self.eta_bar < 1.0,
            "eta_bar must lie in (0, 1)",
        )?;
        check(self.tau > 0.0 && self.tau <= 1.0, "tau must lie in (0, 1]")?;
        check(
            self.tau1 > 0.0 && self.tau1 < 1.0 && self.tau2 > 0.0 && self.tau2 < 1.0,
            "tau1, tau2 must lie in (0, 1)",
        )?;
        check(
            self.delta > 0.0 && self.delta < 1.0,
            "delta must lie in (0, 1)",
        )?;
        check(self.max_inner >= 1, "max_inner must be at least 1")?;
        check(self.grad_tol > 0.0, "grad_tol must be positive")?;
        check(self.max_cg >= 1, "max_cg must be at least 1")?;
        check(self.cg_threshold >= 1, "cg_threshold must be at least 1")
    }
}

/// Outcome of one subproblem solve.
#[derive(Debug, Clone)]
pub struct SsnResult {
    pub u: Array1<f64>,
    pub v: Array1<f64>,
    pub w: Array1<f64>,
    /// Newton steps taken.
    pub inner_iters: usize,
    /// `||grad theta||` at the returned point.
    pub final_grad_norm: f64,
    /// Solve strategy actually used at each Newton step (never `Auto`).
    pub strategy_used_per_iter: Vec<Strategy>,
    /// Gradient norms observed at every visited iterate, including the last.
    pub grad_norms: Vec<f64>,
    /// Whether the stop rule was met before `max_inner` / stagnation.
    pub converged: bool,
    /// The stop tolerance was clamped by the f64 noise floor of the
    /// gradient evaluation; asking for more accuracy (e.g. by growing
    /// `sigma`) cannot help.
    pub precision_limited: bool,
}

/// Stopping rule for the inner iteration.
#[derive(Debug, Clone)]
pub(crate) enum InnerStopRule {
    /// Stop when the gradient norm falls below a fixed value.
    FixedGradTol(f64),
    /// Practical reading of the summable-tolerance criteria: stop when
    /// `||grad|| <= max(floor, min(eps_k, zeta_k ||x_trial - x||) / max(1, sqrt(sigma)))`.
    /// `zeta_k = None` at the first outer iteration.
    AlmCriteria {
        eps_k: f64,
        zeta_k: Option<f64>,
        floor: f64,
    },
}

impl InnerStopRule {
    /// Effective tolerance plus whether the f64 noise floor (static part
    /// scaled to the data, dynamic part scaled to the current prox argument)
    /// was the binding term. Gradient entries are assembled from quantities
    /// of magnitude `||z||`, so no tolerance below `eps_mach * ||z||` is
    /// meaningful.
    fn tolerance(&self, sigma: f64, x_step_norm: f64, z_norm: f64) -> (f64, bool) {
        match self {
            InnerStopRule::FixedGradTol(t) => (*t, false),
            InnerStopRule::AlmCriteria {
                eps_k,
                zeta_k,
                floor,
            } => {
                let mut t = *eps_k;
                if let Some(zeta) = zeta_k {
                    t = t.min(zeta * x_step_norm);
                }
                let criteria = t / sigma.sqrt().max(1.0);
                let noise = floor.max(f64::EPSILON * z_norm);
                (criteria.max(noise), noise >= criteria)
            }
        }
    }
}

fn l2(a: &Array1<f64>) -> f64 {
    a.dot(a).sqrt()
}

/// Everything the inner loop needs at the current iterate.
struct Eval {
    /// `x - sigma (A^T u - B^T v)`
    z: Array1<f64>,
    /// `prox_l1(z, sigma*lambda)`; also the would-be multiplier update.
    x_trial: Array1<f64>,
    theta: f64,
    /// stacked `(grad_u, grad_v)`, length `m+s`
    grad: Array1<f64>,
}

fn eval_subproblem(
    u: &ArrayView1<'_, f64>,
    v: &ArrayView1<'_, f64>,
    x: &ArrayView1<'_, f64>,
    sigma: f64,
    data: &ProblemData,
) -> Eval {
    let (m, _, s) = data.dims();
    let mut aty = linalg::mat_t_vec(&data.a(), u);
    aty -= &linalg::mat_t_vec(&data.bmat(), v);
    let mut z = x.to_owned();
    z.scaled_add(-sigma, &aty);
    let x_trial = prox_l1(z.view(), sigma * data.lambda());

    let theta = 0.5 * u.dot(u) + data.b().dot(u) - data.d().dot(v)
        + x_trial.dot(&x_trial) / (2.0 * sigma)
        - x.dot(x) / (2.0 * sigma);

    let mut grad = Array1::zeros(m + s);
    {
        let mut gu = grad.slice_mut(s![..m]);
        gu.assign(u);
        gu += &data.b();
        gu -= &linalg::mat_vec(&data.a(), &x_trial.view());
    }
    {
        let mut gv = grad.slice_mut(s![m..]);
        gv.assign(&linalg::mat_vec(&data.bmat(), &x_trial.view()));
        gv -= &data.d();
    }
    Eval {
        z,
        x_trial,
        theta,
        grad,
    }
}

fn check_dims(
    u: &ArrayView1<'_, f64>,
    v: &ArrayView1<'_, f64>,
    x: &ArrayView1<'_, f64>,
    sigma: f64,
    data: &ProblemData,
) -> Result<()> {
    let (m, n, s) = data.dims();
    if u.len() != m {
        return Err(Error::DimensionMismatch {
            context: "theta u",
            expected: m,
            actual: u.len(),
        });
    }
    if v.len() != s {
        return Err(Error::DimensionMismatch {
            context: "theta v",
            expected: s,
            actual: v.len(),
        });
    }
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            context: "theta x",
            expected: n,
            actual: x.len(),
        });
    }
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    Ok(())
}

/// Value of the subproblem objective `theta` at `(u, v)`.
pub fn theta_value(
    u: ArrayView1<'_, f64>,
    v: ArrayView1<'_, f64>,
    x: ArrayView1<'_, f64>,
    sigma: f64,
    data: &ProblemData,
) -> Result<f64> {
    check_dims(&u, &v, &x, sigma, data)?;
    Ok(eval_subproblem(&u, &v, &x, sigma, data).theta)
}

/// Gradient of `theta` at `(u, v)`, stacked as `(grad_u, grad_v)`.
pub fn theta_grad(
    u: ArrayView1<'_, f64>,
    v: ArrayView1<'_, f64>,
    x: ArrayView1<'_, f64>,
    sigma: f64,
    data: &ProblemData,
) -> Result<Array1<f64>> {
    check_dims(&u, &v, &x, sigma, data)?;
    Ok(eval_subproblem(&u, &v, &x, sigma, data).grad)
}

/// A computed Newton direction.
#[derive(Debug, Clone)]
pub struct NewtonStep {
    /// Stacked `(d_u, d_v)`, length `m+s`.
    pub direction: Array1<f64>,
    /// Strategy that actually produced the direction.
    pub strategy: Strategy,
    /// CG iterations spent (zero for direct solves).
    pub cg_iters: usize,
}

/// Active-set submatrix `Ahat_J = [A_J; -sqrt(1/eps) B_J]`, column-major.
fn active_submatrix(data: &ProblemData, active: &ActiveSet, inv_sqrt_eps: f64) -> Array2<f64> {
    let (m, _, s) = data.dims();
    let r = active.r();
    let mut a_hat = Array2::zeros((m + s, r).f());
    let a = data.a();
    let bmat = data.bmat();
    for (out, &j) in active.indices().iter().enumerate() {
        a_hat.slice_mut(s![..m, out]).assign(&a.column(j));
        let mut lower = a_hat.slice_mut(s![m.., out]);
        lower.assign(&bmat.column(j));
        lower *= -inv_sqrt_eps;
    }
    a_hat
}

/// Solves the regularized generalized-Hessian system
/// `(V + eps_j diag(0, I_s)) dir = -grad`.
///
/// The system is rescaled by `L = diag(I_m, sqrt(eps) I_s)` into
/// `(I + sigma Ahat_J Ahat_J^T) (L dir) = -L^{-1} grad`, which every strategy
/// solves: Cholesky factors it, SMW inverts it through the `r x r` Gram
/// matrix, CG applies it matrix-free. A failed factorization falls back to
/// jittered CG and is recorded as [`Strategy::Cg`].
pub fn newton_direction(
    grad: &ArrayView1<'_, f64>,
    active: &ActiveSet,
    eps_j: f64,
    sigma: f64,
    data: &ProblemData,
    config: &SsnConfig,
) -> Result<NewtonStep> {
    let (m, _, s) = data.dims();
    if grad.len() != m + s {
        return Err(Error::DimensionMismatch {
            context: "newton_direction grad",
            expected: m + s,
            actual: grad.len(),
        });
    }
    if eps_j.is_nan() || eps_j <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "eps_j must be positive, got {eps_j}"
        )));
    }
    let r = active.r();
    let inv_sqrt_eps = 1.0 / eps_j.sqrt();

    // hat-space right-hand side: -L^{-1} grad
    let mut rhs = -grad.to_owned();
    rhs.slice_mut(s![m..]).mapv_inplace(|t| t * inv_sqrt_eps);

    let unscale = |mut h: Array1<f64>| -> Array1<f64> {
        h.slice_mut(s![m..]).mapv_inplace(|t| t * inv_sqrt_eps);
        h
    };

    // rank-0 system is the identity in hat space
    if r == 0 {
        return Ok(NewtonStep {
            direction: unscale(rhs),
            strategy: match config.strategy {
                Strategy::Auto | Strategy::Smw => Strategy::Smw,
                other => other,
            },
            cg_iters: 0,
        });
    }

    let chosen = match config.strategy {
        Strategy::Auto => {
            if 2 * r <= m + s {
                Strategy::Smw
            } else if m + s <= config.cg_threshold {
                Strategy::Cholesky
            } else {
                Strategy::Cg
            }
        }
        fixed => fixed,
    };

    let a_hat = active_submatrix(data, active, inv_sqrt_eps);
    let gnorm = l2(&grad.to_owned());
    let cg_tol = config.eta_bar.min(gnorm.powf(1.0 + config.tau));

    let cg_solve = |jitter: f64| -> Result<(Array1<f64>, usize)> {
        let op = |q: &ArrayView1<'_, f64>| -> Array1<f64> {
            let atq = linalg::mat_t_vec(&a_hat.view(), q);
            let mut out = q.to_owned();
            out.scaled_add(sigma, &linalg::mat_vec(&a_hat.view(), &atq.view()));
            if jitter != 0.0 {
                out.scaled_add(jitter, q);
            }
            out
        };
        let out = linalg::conjugate_gradient(op, &rhs.view(), cg_tol, config.max_cg)?;
        Ok((out.x, out.iters))
    };

    match chosen {
        Strategy::Cholesky => {
            let mut sys = a_hat.dot(&a_hat.t());
            sys *= sigma;
            for i in 0..m + s {
                sys[(i, i)] += 1.0;
            }
            match linalg::cholesky(&sys.view()) {
                Some(f) => Ok(NewtonStep {
                    direction: unscale(f.solve(&rhs.view())),
                    strategy: Strategy::Cholesky,
                    cg_iters: 0,
                }),
                None => {
                    let jitter = 1e-12 * sys.diag().iter().fold(1.0f64, |a, t| a.max(t.abs()));
                    let (h, iters) = cg_solve(jitter)?;
                    Ok(NewtonStep {
                        direction: unscale(h),
                        strategy: Strategy::Cg,
                        cg_iters: iters,
                    })
                }
            }
        }
        Strategy::Smw => {
            let mut gram = a_hat.t().dot(&a_hat);
            for i in 0..r {
                gram[(i, i)] += 1.0 / sigma;
            }
            match linalg::cholesky(&gram.view()) {
                Some(f) => {
                    // (I + sigma Ahat Ahat^T)^{-1} = I - Ahat (I/sigma + Ahat^T Ahat)^{-1} Ahat^T
                    let at_rhs = linalg::mat_t_vec(&a_hat.view(), &rhs.view());
                    let small = f.solve(&at_rhs.view());
                    let mut h = rhs.clone();
                    h.scaled_add(-1.0, &linalg::mat_vec(&a_hat.view(), &small.view()));
                    Ok(NewtonStep {
                        direction: unscale(h),
                        strategy: Strategy::Smw,
                        cg_iters: 0,
                    })
                }
                None => {
                    let jitter = 1e-12 * gram.diag().iter().fold(1.0f64, |a, t| a.max(t.abs()));
                    let (h, iters) = cg_solve(jitter)?;
                    Ok(NewtonStep {
                        direction: unscale(h),
                        strategy: Strategy::Cg,
                        cg_iters: iters,
                    })
                }
            }
        }
        Strategy::Cg => {
            let (h, iters) = cg_solve(0.0)?;
            Ok(NewtonStep {
                direction: unscale(h),
                strategy: Strategy::Cg,
                cg_iters: iters,
            })
        }
        Strategy::Auto => unreachable!("auto resolved above"),
    }
}

/// Accepted Armijo step together with the refreshed iterate state.
struct AcceptedStep {
    y: Array1<f64>,
    eval: Eval,
    alpha: f64,
    backtracks: usize,
}

/// Backtracking line search on `theta` along `dir`.
///
/// Trial values reuse the precomputed `A^T d_u - B^T d_v`, so each trial
/// costs O(n) instead of a fresh matrix-vector product; the accepted point
/// pays the two products needed for its gradient once.
fn armijo_step(
    y: &Array1<f64>,
    eval: &Eval,
    dir: &Array1<f64>,
    x: &ArrayView1<'_, f64>,
    sigma: f64,
    data: &ProblemData,
    config: &SsnConfig,
) -> Result<AcceptedStep> {
    let (m, _, _) = data.dims();
    let gd = eval.grad.dot(dir);
    if gd.is_nan() || gd >= 0.0 {
        return Err(Error::LineSearchStagnation { steps: 0 });
    }
    let (u, v) = (y.slice(s![..m]), y.slice(s![m..]));
    let (du, dv) = (dir.slice(s![..m]), dir.slice(s![m..]));

    let mut ad = linalg::mat_t_vec(&data.a(), &du);
    ad -= &linalg::mat_t_vec(&data.bmat(), &dv);

    // theta(y + alpha d) decomposed into scalar terms plus the prox norm
    let u_dot_du = u.dot(&du);
    let du_sq = du.dot(&du);
    let b_du = data.b().dot(&du);
    let d_dv = data.d().dot(&dv);
    let base_u = 0.5 * u.dot(&u) + data.b().dot(&u) - data.d().dot(&v);
    let x_sq_term = x.dot(x) / (2.0 * sigma);
    let sl = sigma * data.lambda();

    let mut alpha = 1.0;
    for l in 0..=LINE_SEARCH_CAP {
        let mut z_trial = eval.z.clone();
        z_trial.scaled_add(-sigma * alpha, &ad);
        let x_trial = prox_l1(z_trial.view(), sl);
        let theta_trial = base_u + alpha * (u_dot_du + b_du - d_dv)
            + 0.5 * alpha * alpha * du_sq
            + x_trial.dot(&x_trial) / (2.0 * sigma)
            - x_sq_term;
        if theta_trial <= eval.theta + config.mu * alpha * gd {
            let mut y_new = y.clone();
            y_new.scaled_add(alpha, dir);
            let u_new = y_new.slice(s![..m]);
            let mut grad = Array1::zeros(y.len());
            {
                let mut gu = grad.slice_mut(s![..m]);
                gu.assign(&u_new);
                gu += &data.b();
                gu -= &linalg::mat_vec(&data.a(), &x_trial.view());
            }
            {
                let mut gv = grad.slice_mut(s![m..]);
                gv.assign(&linalg::mat_vec(&data.bmat(), &x_trial.view()));
                gv -= &data.d();
            }
            return Ok(AcceptedStep {
                y: y_new,
                eval: Eval {
                    z: z_trial,
                    x_trial,
                    theta: theta_trial,
                    grad,
                },
                alpha,
                backtracks: l,
            });
        }
        alpha *= config.delta;
    }
    Err(Error::LineSearchStagnation {
        steps: LINE_SEARCH_CAP + 1,
    })
}

/// Armijo backtracking from `(u, v)` along `direction`; returns the accepted
/// step size `alpha = delta^l` and the backtrack count `l`.
pub fn line_search(
    u: ArrayView1<'_, f64>,
    v: ArrayView1<'_, f64>,
    direction: ArrayView1<'_, f64>,
    x: ArrayView1<'_, f64>,
    sigma: f64,
    data: &ProblemData,
    config: &SsnConfig,
) -> Result<(f64, usize)> {
    check_dims(&u, &v, &x, sigma, data)?;
    let (m, _, s) = data.dims();
    if direction.len() != m + s {
        return Err(Error::DimensionMismatch {
            context: "line_search direction",
            expected: m + s,
            actual: direction.len(),
        });
    }
    let y = stack_y(&u, &v);
    let eval = eval_subproblem(&u, &v, &x, sigma, data);
    let step = armijo_step(&y, &eval, &direction.to_owned(), &x, sigma, data, config)?;
    Ok((step.alpha, step.backtracks))
}

pub(crate) fn stack_y(u: &ArrayView1<'_, f64>, v: &ArrayView1<'_, f64>) -> Array1<f64> {
    let mut y = Array1::zeros(u.len() + v.len());
    y.slice_mut(s![..u.len()]).assign(u);
    y.slice_mut(s![u.len()..]).assign(v);
    y
}

/// Runs the inner solver from `y_start` (stacked `(u, v)`), stopping when
/// `||grad theta|| <= config.grad_tol`, on `max_inner` Newton steps, or on a
/// stagnated line search; the latter two leave `converged` unset so the
/// outer loop can decide whether to accept the iterate.
///
/// The returned `w` is recovered as `proj_linf(z / sigma, lambda)`, i.e. the
/// prox of the conjugate term at the final iterate.
pub fn ssn_solve(
    x: &ArrayView1<'_, f64>,
    sigma: f64,
    data: &ProblemData,
    config: &SsnConfig,
    y_start: &ArrayView1<'_, f64>,
) -> Result<SsnResult> {
    ssn_solve_with_rule(
        x,
        sigma,
        data,
        config,
        y_start,
        &InnerStopRule::FixedGradTol(config.grad_tol),
    )
}

pub(crate) fn ssn_solve_with_rule(
    x: &ArrayView1<'_, f64>,
    sigma: f64,
    data: &ProblemData,
    config: &SsnConfig,
    y_start: &ArrayView1<'_, f64>,
    rule: &InnerStopRule,
) -> Result<SsnResult> {
    config.validate()?;
    let (m, _, s) = data.dims();
    if y_start.len() != m + s {
        return Err(Error::DimensionMismatch {
            context: "ssn_solve y_start",
            expected: m + s,
            actual: y_start.len(),
        });
    }
    if y_start.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter(
            "ssn_solve start point must be finite".into(),
        ));
    }
    check_dims(
        &y_start.slice(s![..m]),
        &y_start.slice(s![m..]),
        x,
        sigma,
        data,
    )?;

    let sl = sigma * data.lambda();
    let mut y = y_start.to_owned();
    let mut eval = eval_subproblem(&y.slice(s![..m]), &y.slice(s![m..]), x, sigma, data);

    let mut grad_norms = Vec::new();
    let mut strategies = Vec::new();
    let mut newton_steps = 0usize;
    let mut converged = false;
    let mut precision_limited = false;

    loop {
        let gnorm = l2(&eval.grad);
        grad_norms.push(gnorm);
        let mut diff = eval.x_trial.clone();
        diff -= x;
        let (tol, floor_bound) = rule.tolerance(sigma, l2(&diff), l2(&eval.z));
        if gnorm <= tol {
            converged = true;
            precision_limited = floor_bound;
            break;
        }
        if newton_steps >= config.max_inner {
            break;
        }

        let active = clarke_diag(eval.z.view(), sl);
        let eps_j = (config.tau1 * config.tau2.min(gnorm)).max(EPS_REG_FLOOR);
        let step = newton_direction(&eval.grad.view(), &active, eps_j, sigma, data, config)?;
        strategies.push(step.strategy);

        match armijo_step(&y, &eval, &step.direction, x, sigma, data, config) {
            Ok(acc) => {
                y = acc.y;
                eval = acc.eval;
                newton_steps += 1;
            }
            Err(Error::LineSearchStagnation { .. }) => break,
            Err(e) => return Err(e),
        }
    }

    let w = proj_linf((&eval.z / sigma).view(), data.lambda());
    Ok(SsnResult {
        u: y.slice(s![..m]).to_owned(),
        v: y.slice(s![m..]).to_owned(),
        w,
        inner_iters: newton_steps,
        final_grad_norm: *grad_norms.last().expect("at least one pass"),
        strategy_used_per_iter: strategies,
        grad_norms,
        converged,
        precision_limited,
    })
}
