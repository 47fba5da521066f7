//! Solvers for the linear-equality-constrained Lasso problem
//!
//! ```text
//! minimize   0.5 ||A x - b||^2 + lambda ||x||_1
//! subject to B x = d
//! ```
//!
//! The main solver is an inexact augmented Lagrangian method on the dual
//! whose subproblems are handled by a semismooth Newton iteration; the
//! Newton systems have an identity-plus-low-rank structure that is solved
//! by Cholesky, Sherman-Morrison-Woodbury or CG depending on the active-set
//! size. Four first-order baselines (ADMM, accelerated ADMM, linearized
//! ALM, Chambolle-Pock) share the same problem and result types, and a
//! benchmark harness runs them side by side with convergence traces.
//!
//! ```no_run
//! use classo::{alm_solve, ProblemData, SsnalConfig};
//! use ndarray::{array, Array2};
//!
//! let data = ProblemData::new(
//!     Array2::eye(2),
//!     array![1.0, -1.0],
//!     array![[1.0, 1.0]], // sum-to-zero constraint
//!     array![0.0],
//!     0.1,
//! )?;
//! let result = alm_solve(&data, &SsnalConfig::default(), None)?;
//! println!("x = {}, nnz = {}", result.point.x, result.nnz);
//! # Ok::<(), classo::Error>(())
//! ```

mod error;
mod linalg;

pub mod alm;
pub mod baselines;
pub mod bench;
pub mod data;
pub mod problem;
pub mod prox;
pub mod ssn;
pub mod transforms;

pub use alm::{
    alm_solve, sigma_schedule, IterationTrace, PowerSeq, SolveResult, SolveStatus, SsnalConfig,
};
pub use baselines::{aadmm_solve, admm_solve, lalm_solve, primal_dual_solve, BaselineConfig};
pub use bench::{
    emit_table, records_from_csv, records_to_csv, run_plan, BenchRecord, ExperimentPlan,
    PlanSource, ScenarioKind, SolverKind,
};
pub use data::{
    generate, load_libsvm, parse_libsvm, poly_expand, scale_columns, write_libsvm, Scenario,
    SyntheticInstance, SyntheticSpec,
};
pub use error::{Error, Result};
pub use problem::{
    lambda_from_fraction, nnz, objective_dual, objective_primal, residuals, PrimalDualPoint,
    ProblemData, Residuals,
};
pub use prox::{clarke_diag, proj_linf, prox_l1, ActiveSet};
pub use ssn::{
    line_search, newton_direction, ssn_solve, theta_grad, theta_value, NewtonStep, SsnConfig,
    SsnResult, Strategy,
};
pub use transforms::{genlasso_to_classo, recover_solution, GenLassoReduction};
