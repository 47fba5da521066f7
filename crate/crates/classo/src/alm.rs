//! Outer inexact augmented Lagrangian loop.
//!
//! Each outer iteration solves the dual subproblem inexactly with
//! [`crate::ssn`], warm-started from the previous `(u, v)`, then updates the
//! multiplier `x <- x - sigma (A^T u - B^T v + w)` and grows `sigma`
//! geometrically up to a cap. The run stops once `eta_classo` falls below
//! the target, on the outer iteration cap, or after two consecutive inner
//! failures.

use std::time::{Duration, Instant};

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::{nnz, objective_dual, objective_primal, residuals, PrimalDualPoint, ProblemData};
use crate::ssn::{ssn_solve_with_rule, stack_y, InnerStopRule, SsnConfig};

/// Summable tolerance sequence `value(k) = scale / (k+1)^exponent`.
#[derive(Debug, Clone, Copy)]
pub struct PowerSeq {
    pub scale: f64,
    /// Must exceed 1 so the sequence is summable.
    pub exponent: f64,
}

impl PowerSeq {
    pub fn value(&self, k: usize) -> f64 {
        self.scale / ((k + 1) as f64).powf(self.exponent)
    }

    fn validate(&self, name: &str) -> Result<()> {
        if self.scale.is_nan() || self.scale <= 0.0 || self.exponent.is_nan() || self.exponent <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "{name} must have positive scale and exponent > 1"
            )));
        }
        Ok(())
    }
}

/// Outer-loop configuration.
#[derive(Debug, Clone)]
pub struct SsnalConfig {
    /// Target on `eta_classo`.
    pub eps: f64,
    pub max_outer: usize,
    pub sigma0: f64,
    /// Geometric growth factor of `sigma`, at least 1.
    pub sigma_growth: f64,
    pub sigma_max: f64,
    /// Inner tolerance sequence gating the first subproblem.
    pub eps_seq: PowerSeq,
    /// Multiplier-progress tolerance sequence driving later subproblems.
    pub zeta_seq: PowerSeq,
    pub ssn: SsnConfig,
}

impl Default for SsnalConfig {
    fn default() -> Self {
        Self {
            eps: 1e-6,
            max_outer: 100,
            sigma0: 1.0,
            sigma_growth: 3.0,
            sigma_max: 1e6,
            eps_seq: PowerSeq {
                scale: 1.0,
                exponent: 2.0,
            },
            zeta_seq: PowerSeq {
                scale: 1.0,
                exponent: 2.0,
            },
            ssn: SsnConfig::default(),
        }
    }
}

impl SsnalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.eps.is_nan() || self.eps <= 0.0 {
            return Err(Error::InvalidParameter("eps must be positive".into()));
        }
        if self.max_outer == 0 {
            return Err(Error::InvalidParameter("max_outer must be at least 1".into()));
        }
        if self.sigma0.is_nan() || self.sigma0 <= 0.0 {
            return Err(Error::InvalidParameter("sigma0 must be positive".into()));
        }
        if self.sigma_growth.is_nan() || self.sigma_growth < 1.0 {
            return Err(Error::InvalidParameter(
                "sigma_growth must be at least 1".into(),
            ));
        }
        if self.sigma_max.is_nan() || self.sigma_max < self.sigma0 {
            return Err(Error::InvalidParameter(
                "sigma_max must be at least sigma0".into(),
            ));
        }
        self.eps_seq.validate("eps_seq")?;
        self.zeta_seq.validate("zeta_seq")?;
        self.ssn.validate()
    }
}

/// Penalty value at outer iteration `k` on the default (failure-free) path:
/// `min(sigma0 * sigma_growth^k, sigma_max)`, nondecreasing in `k`.
pub fn sigma_schedule(k: usize, config: &SsnalConfig) -> f64 {
    (config.sigma0 * config.sigma_growth.powi(k as i32)).min(config.sigma_max)
}

/// How a solve ended. `MaxOuter` doubles as the iteration cap marker for
/// the first-order baselines, which have no inner loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxOuter,
    /// Two consecutive subproblems failed to reach their tolerance.
    InnerFailure,
}

/// Per-outer-iteration record.
#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub k: usize,
    pub sigma: f64,
    pub eta_p: f64,
    pub eta_d: f64,
    pub eta_relgap: f64,
    pub obj_p: f64,
    pub obj_d: f64,
    pub inner_iters: usize,
    /// `||x_{k+1} - x_k||`, measured directly on the update.
    pub x_step_norm: f64,
    pub elapsed: Duration,
}

/// Best iterate seen (the last one on normal convergence), termination
/// status and the full iteration trace.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub point: PrimalDualPoint,
    pub status: SolveStatus,
    pub traces: Vec<IterationTrace>,
    pub nnz: usize,
    pub total_inner: usize,
}

fn l2(a: &Array1<f64>) -> f64 {
    a.dot(a).sqrt()
}

pub(crate) fn check_start(data: &ProblemData, start: &PrimalDualPoint) -> Result<()> {
    let (m, n, s) = data.dims();
    let checks = [
        ("start x", n, start.x.len()),
        ("start u", m, start.u.len()),
        ("start v", s, start.v.len()),
        ("start w", n, start.w.len()),
    ];
    for (context, expected, actual) in checks {
        if expected != actual {
            return Err(Error::DimensionMismatch {
                context,
                expected,
                actual,
            });
        }
    }
    Ok(())
}

/// Runs the augmented Lagrangian method on `data` from `start` (zeros when
/// omitted).
pub fn alm_solve(
    data: &ProblemData,
    config: &SsnalConfig,
    start: Option<PrimalDualPoint>,
) -> Result<SolveResult> {
    config.validate()?;
    let start = start.unwrap_or_else(|| PrimalDualPoint::zeros_for(data));
    check_start(data, &start)?;

    let mut x = start.x;
    let mut y = stack_y(&start.u.view(), &start.v.view());
    let mut point = PrimalDualPoint {
        x: x.clone(),
        u: start.u,
        v: start.v,
        w: start.w,
    };

    let mut sigma = config.sigma0;
    let growth = config.sigma_growth;
    let mut traces = Vec::new();
    let mut total_inner = 0usize;
    let mut consecutive_failures = 0usize;
    let mut status = SolveStatus::MaxOuter;
    let mut best: Option<(f64, PrimalDualPoint)> = None;

    // numeric floor on the inner tolerance, scaled to the data
    let b_norm = {
        let b = data.b().to_owned();
        l2(&b)
    };
    let floor = f64::EPSILON * (1.0 + b_norm);

    for k in 0..config.max_outer {
        let started = Instant::now();
        let rule = InnerStopRule::AlmCriteria {
            eps_k: config.eps_seq.value(k),
            zeta_k: (k > 0).then(|| config.zeta_seq.value(k)),
            floor,
        };
        let inner = ssn_solve_with_rule(&x.view(), sigma, data, &config.ssn, &y.view(), &rule)?;
        total_inner += inner.inner_iters;
        let inner_failed = !inner.converged;

        // multiplier update from the dual-feasibility direction
        let mut t = linalg::mat_t_vec(&data.a(), &inner.u.view());
        t -= &linalg::mat_t_vec(&data.bmat(), &inner.v.view());
        t += &inner.w;
        let mut x_new = x.clone();
        x_new.scaled_add(-sigma, &t);
        let x_step_norm = {
            let mut diff = x_new.clone();
            diff -= &x;
            l2(&diff)
        };

        point = PrimalDualPoint {
            x: x_new.clone(),
            u: inner.u,
            v: inner.v,
            w: inner.w,
        };
        let rsd = residuals(data, &point)?;
        let obj_p = objective_primal(data, &point.x.view())?;
        let obj_d = objective_dual(data, &point.u.view(), &point.v.view())?;
        traces.push(IterationTrace {
            k,
            sigma,
            eta_p: rsd.eta_p,
            eta_d: rsd.eta_d,
            eta_relgap: rsd.eta_relgap,
            obj_p,
            obj_d,
            inner_iters: inner.inner_iters,
            x_step_norm,
            elapsed: started.elapsed(),
        });

        x = x_new;
        y = stack_y(&point.u.view(), &point.v.view());
        if best
            .as_ref()
            .is_none_or(|(eta, _)| rsd.eta_classo < *eta)
        {
            best = Some((rsd.eta_classo, point.clone()));
        }

        if rsd.eta_classo < config.eps {
            status = SolveStatus::Converged;
            break;
        }
        if inner_failed {
            consecutive_failures += 1;
            if consecutive_failures >= 2 {
                status = SolveStatus::InnerFailure;
                break;
            }
        } else {
            consecutive_failures = 0;
        }
        // sigma holds while a subproblem is unfinished (the accepted partial
        // solve warm-starts a retry at the same penalty) and once the
        // subproblem sits at the f64 noise floor, where larger sigma only
        // amplifies the prox rounding error
        if !inner_failed && !inner.precision_limited {
            sigma = (sigma * growth).min(config.sigma_max);
        }
    }

    let point = match best {
        Some((_, pt)) => pt,
        None => point,
    };
    Ok(SolveResult {
        nnz: nnz(&point.x.view()),
        point,
        status,
        traces,
        total_inner,
    })
}

/// The two sides of the exact update identity
/// `||A^T u - B^T v + w|| * sigma = ||x_{k+1} - x_k||`, each recomputed
/// from independently stored trace fields.
pub fn multiplier_step_identity(trace: &IterationTrace) -> (f64, f64) {
    (trace.eta_d * trace.sigma, trace.x_step_norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array2};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sigma_schedule_examples() {
        let mut config = SsnalConfig {
            sigma0: 2.0,
            sigma_growth: 1.0,
            ..SsnalConfig::default()
        };
        assert_abs_diff_eq!(sigma_schedule(0, &config), 2.0);
        assert_abs_diff_eq!(sigma_schedule(7, &config), 2.0);

        config.sigma0 = 1.0;
        config.sigma_growth = 2.0;
        config.sigma_max = f64::INFINITY;
        assert_abs_diff_eq!(sigma_schedule(3, &config), 8.0);

        config.sigma_growth = 3.0;
        config.sigma_max = 10.0;
        assert_abs_diff_eq!(sigma_schedule(12, &config), 10.0);
    }

    #[test]
    fn power_seq_is_decreasing() {
        let seq = PowerSeq {
            scale: 1.0,
            exponent: 2.0,
        };
        assert_abs_diff_eq!(seq.value(0), 1.0);
        assert_abs_diff_eq!(seq.value(1), 0.25);
        assert!(seq.value(5) < seq.value(4));
    }

    fn random_instance(seed: u64, m: usize, n: usize, s: usize) -> ProblemData {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut norm = move || -> f64 { rng.sample(rand_distr::StandardNormal) };
        let a = Array2::from_shape_fn((m, n), |_| norm());
        let b = Array1::from_shape_fn(m, |_| norm());
        let bmat = Array2::from_shape_fn((s, n), |_| norm());
        let d = Array1::from_shape_fn(s, |_| norm());
        let lambda = crate::problem::lambda_from_fraction(&a.view(), &b.view(), 0.1).unwrap();
        ProblemData::new(a, b, bmat, d, lambda).unwrap()
    }

    #[test]
    fn converged_status_implies_residual_bound() {
        let data = random_instance(3, 10, 25, 2);
        let config = SsnalConfig::default();
        let res = alm_solve(&data, &config, None).unwrap();
        assert_eq!(res.status, SolveStatus::Converged);
        let rsd = residuals(&data, &res.point).unwrap();
        assert!(rsd.eta_classo < config.eps);
        assert!(rsd.eta_relgap.abs() < 1e-6);
        // trace indices strictly increasing
        for pair in res.traces.windows(2) {
            assert!(pair[1].k > pair[0].k);
        }
    }

    #[test]
    fn multiplier_step_matches_dual_residual() {
        let data = random_instance(9, 8, 20, 1);
        let res = alm_solve(&data, &SsnalConfig::default(), None).unwrap();
        for trace in &res.traces {
            let (lhs, rhs) = multiplier_step_identity(trace);
            assert!(
                (lhs - rhs).abs() <= 1e-12 * rhs.max(1.0),
                "iteration {}: {} vs {}",
                trace.k,
                lhs,
                rhs
            );
        }
    }

    #[test]
    fn restart_from_solution_is_cheap() {
        let data = random_instance(17, 8, 18, 2);
        let config = SsnalConfig::default();
        let first = alm_solve(&data, &config, None).unwrap();
        assert_eq!(first.status, SolveStatus::Converged);
        let second = alm_solve(&data, &config, Some(first.point.clone())).unwrap();
        assert_eq!(second.status, SolveStatus::Converged);
        assert!(
            second.traces.len() <= 2,
            "warm restart took {} outer iterations",
            second.traces.len()
        );
    }

    #[test]
    fn rejects_bad_start_dimensions() {
        let data = random_instance(23, 5, 9, 1);
        let bad = PrimalDualPoint::zeros(5, 8, 1);
        assert!(matches!(
            alm_solve(&data, &SsnalConfig::default(), Some(bad)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn config_validation_catches_bad_growth() {
        let data = random_instance(29, 4, 6, 1);
        let config = SsnalConfig {
            sigma_growth: 0.5,
            ..SsnalConfig::default()
        };
        assert!(alm_solve(&data, &config, None).is_err());
    }

    #[test]
    fn tiny_sum_zero_instance_solves() {
        // objective with the sign pattern (+, -): x* = (0.9, -0.9)
        let data = ProblemData::new(
            Array2::eye(2),
            array![1.0, -1.0],
            array![[1.0, 1.0]],
            array![0.0],
            0.1,
        )
        .unwrap();
        let config = SsnalConfig {
            eps: 1e-9,
            ..SsnalConfig::default()
        };
        let res = alm_solve(&data, &config, None).unwrap();
        assert_eq!(res.status, SolveStatus::Converged);
        assert_abs_diff_eq!(res.point.x[0], 0.9, epsilon = 1e-6);
        assert_abs_diff_eq!(res.point.x[1], -0.9, epsilon = 1e-6);
        let obj = objective_primal(&data, &res.point.x.view()).unwrap();
        assert_abs_diff_eq!(obj, 0.19, epsilon = 1e-9);
    }
}
