#![allow(dead_code)] // each integration binary uses a different subset

//! Shared test support: a brute-force oracle for tiny instances and seeded
//! instance builders. The oracle enumerates sign patterns and solves dense
//! KKT systems with its own elimination routine, so it shares no code with
//! the solver paths it checks.

use classo::{PrimalDualPoint, ProblemData};
use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub struct OracleSolution {
    pub x: Array1<f64>,
    pub objective: f64,
    /// Full KKT quadruple; absent when the optimum has empty support.
    pub point: Option<PrimalDualPoint>,
}

/// Gaussian elimination with partial pivoting. Returns `None` on a
/// (numerically) singular system.
pub fn solve_dense(mut a: Array2<f64>, mut b: Array1<f64>) -> Option<Array1<f64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    assert_eq!(n, b.len());
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| {
                a[(r1, col)]
                    .abs()
                    .partial_cmp(&a[(r2, col)].abs())
                    .expect("finite")
            })
            .expect("nonempty range");
        if a[(pivot_row, col)].abs() < 1e-12 {
            return None;
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = a[(col, j)];
                a[(col, j)] = a[(pivot_row, j)];
                a[(pivot_row, j)] = tmp;
            }
            b.swap(col, pivot_row);
        }
        for row in col + 1..n {
            let factor = a[(row, col)] / a[(col, col)];
            if factor != 0.0 {
                for j in col..n {
                    a[(row, j)] -= factor * a[(col, j)];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = Array1::zeros(n);
    for row in (0..n).rev() {
        let mut acc = b[row];
        for j in row + 1..n {
            acc -= a[(row, j)] * x[j];
        }
        x[row] = acc / a[(row, row)];
    }
    Some(x)
}

fn primal_objective(data: &ProblemData, x: &Array1<f64>) -> f64 {
    let r = data.a().dot(x) - &data.b().to_owned();
    0.5 * r.dot(&r) + data.lambda() * x.iter().map(|t| t.abs()).sum::<f64>()
}

/// Global optimum of a tiny instance by enumerating all `3^n` sign patterns
/// of `x` and solving each pattern's equality-constrained quadratic.
///
/// A pattern with support `F` and signs `sgn` fixes the smooth model
/// `0.5 x_F^T (A_F^T A_F) x_F - (A_F^T b - lambda sgn)^T x_F` subject to
/// `B_F x_F = d`; its KKT system is solved densely and the candidate kept
/// when the solution signs match the pattern. Every kept candidate is
/// feasible, and the true optimum appears under its own sign pattern, so
/// the minimum over candidates is the global solution.
pub fn sign_pattern_oracle(data: &ProblemData) -> Option<OracleSolution> {
    let (_, n, s) = data.dims();
    assert!(n <= 8, "the oracle is exponential in n");
    let a = data.a();
    let bmat = data.bmat();
    let lambda = data.lambda();
    let d_norm = data.d().iter().map(|t| t * t).sum::<f64>().sqrt();

    let mut best: Option<OracleSolution> = None;
    let mut consider = |cand: OracleSolution| {
        if best.as_ref().is_none_or(|b| cand.objective < b.objective) {
            best = Some(cand);
        }
    };

    let total: usize = 3usize.pow(n as u32);
    for code in 0..total {
        let mut digits = code;
        let mut signs = vec![0i8; n];
        for sign in signs.iter_mut() {
            *sign = match digits % 3 {
                0 => 0,
                1 => 1,
                _ => -1,
            };
            digits /= 3;
        }
        let support: Vec<usize> = (0..n).filter(|&i| signs[i] != 0).collect();
        let k = support.len();

        if k == 0 {
            if d_norm <= 1e-12 {
                let x = Array1::zeros(n);
                let objective = primal_objective(data, &x);
                consider(OracleSolution {
                    x,
                    objective,
                    point: None,
                });
            }
            continue;
        }

        // KKT system of the restricted equality-constrained quadratic:
        // [ A_F^T A_F   B_F^T ] [x_F]   [A_F^T b - lambda*sgn]
        // [ B_F         0     ] [mu ] = [d                   ]
        let dim = k + s;
        let mut sys = Array2::zeros((dim, dim));
        let mut rhs = Array1::zeros(dim);
        for (p, &jp) in support.iter().enumerate() {
            for (q, &jq) in support.iter().enumerate() {
                sys[(p, q)] = a.column(jp).dot(&a.column(jq));
            }
            for row in 0..s {
                sys[(p, k + row)] = bmat[(row, jp)];
                sys[(k + row, p)] = bmat[(row, jp)];
            }
            rhs[p] = a.column(jp).dot(&data.b()) - lambda * signs[jp] as f64;
        }
        for row in 0..s {
            rhs[k + row] = data.d()[row];
        }

        let Some(sol) = solve_dense(sys, rhs) else {
            continue;
        };
        let consistent = support
            .iter()
            .enumerate()
            .all(|(p, &j)| sol[p] * signs[j] as f64 > 0.0);
        if !consistent {
            continue;
        }

        let mut x = Array1::zeros(n);
        for (p, &j) in support.iter().enumerate() {
            x[j] = sol[p];
        }
        let u = a.dot(&x) - &data.b().to_owned();
        let v = Array1::from_iter((0..s).map(|row| -sol[k + row]));
        let w = bmat.t().dot(&v) - &a.t().dot(&u);
        let objective = primal_objective(data, &x);
        consider(OracleSolution {
            x: x.clone(),
            objective,
            point: Some(PrimalDualPoint { x, u, v, w }),
        });
    }
    best
}

/// Seeded tiny instance with standard-normal data, `n <= 6`, `m <= 8`,
/// `s` in {1, 2} and the fraction-rule penalty.
pub fn random_tiny_instance(seed: u64) -> ProblemData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = 4 + (rng.random::<u32>() % 5) as usize; // 4..=8
    let n = 2 + (rng.random::<u32>() % 5) as usize; // 2..=6
    let s = 1 + (rng.random::<u32>() % 2) as usize; // 1..=2
    random_instance(&mut rng, m, n, s)
}

pub fn random_instance(rng: &mut ChaCha8Rng, m: usize, n: usize, s: usize) -> ProblemData {
    let a = Array2::from_shape_fn((m, n), |_| rng.sample::<f64, _>(StandardNormal));
    let b = Array1::from_shape_fn(m, |_| rng.sample::<f64, _>(StandardNormal));
    let bmat = Array2::from_shape_fn((s, n), |_| rng.sample::<f64, _>(StandardNormal));
    let d = Array1::from_shape_fn(s, |_| rng.sample::<f64, _>(StandardNormal));
    let lambda_l = 0.05 + 0.45 * rng.random::<f64>();
    let lambda = classo::lambda_from_fraction(&a.view(), &b.view(), lambda_l)
        .expect("random data is nondegenerate");
    ProblemData::new(a, b, bmat, d, lambda).expect("valid dims")
}
