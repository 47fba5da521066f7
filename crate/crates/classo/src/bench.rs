//! Experiment harness: builds instances, runs the requested solvers against
//! a high-accuracy reference, and emits summary tables plus per-run
//! convergence traces.
//!
//! For every penalty fraction the harness first solves the instance with the
//! Newton-based solver at `baseline_eps` to pin the reference objective,
//! then runs each requested solver at `eps`, recording wall-clock time
//! around the solver call only. Runs are seeded and reproducible; record
//! fields other than runtimes are identical across repeats.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::alm::{alm_solve, SolveResult, SolveStatus, SsnalConfig};
use crate::baselines::{aadmm_solve, admm_solve, lalm_solve, primal_dual_solve, BaselineConfig};
use crate::data::{generate, load_libsvm, poly_expand, scale_columns, Scenario, SyntheticSpec};
use crate::error::{Error, Result};
use crate::problem::{lambda_from_fraction, objective_primal, ProblemData};
use crate::transforms::reduce_matrices;

/// Solvers the harness can dispatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Ssnal,
    Pd,
    Lalm,
    Admm,
    Aadmm,
}

impl SolverKind {
    pub const ALL: [SolverKind; 5] = [
        SolverKind::Ssnal,
        SolverKind::Pd,
        SolverKind::Lalm,
        SolverKind::Admm,
        SolverKind::Aadmm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Ssnal => "ssnal",
            SolverKind::Pd => "pd",
            SolverKind::Lalm => "lalm",
            SolverKind::Admm => "admm",
            SolverKind::Aadmm => "aadmm",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ssnal" => Ok(SolverKind::Ssnal),
            "pd" => Ok(SolverKind::Pd),
            "lalm" => Ok(SolverKind::Lalm),
            "admm" => Ok(SolverKind::Admm),
            "aadmm" => Ok(SolverKind::Aadmm),
            other => Err(Error::InvalidParameter(format!(
                "unknown solver `{other}` (expected ssnal, pd, lalm, admm or aadmm)"
            ))),
        }
    }
}

/// Constraint scenario of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    SumZero,
    RandomB,
    Genlasso,
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::SumZero => "sum-zero",
            ScenarioKind::RandomB => "random-b",
            ScenarioKind::Genlasso => "genlasso",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sum-zero" | "sum_zero" => Ok(ScenarioKind::SumZero),
            "random-b" | "random_b" => Ok(ScenarioKind::RandomB),
            "genlasso" => Ok(ScenarioKind::Genlasso),
            other => Err(Error::InvalidParameter(format!(
                "unknown scenario `{other}` (expected sum-zero, random-b or genlasso)"
            ))),
        }
    }
}

/// Where the design matrix comes from.
#[derive(Debug, Clone)]
pub enum PlanSource {
    Synthetic { m: usize, n: usize, s: usize },
    File {
        path: PathBuf,
        degree: usize,
        s: usize,
        scale: bool,
    },
}

/// Full description of one benchmark run.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub scenario: ScenarioKind,
    pub source: PlanSource,
    pub lambda_l_list: Vec<f64>,
    pub solvers: Vec<SolverKind>,
    pub eps: f64,
    /// Accuracy of the reference run pinning the optimal objective.
    pub baseline_eps: f64,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Worker threads over penalty cells; 1 forces sequential execution
    /// (use this when timings matter).
    pub jobs: usize,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.solvers.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one solver must be requested".into(),
            ));
        }
        if self.lambda_l_list.is_empty() {
            return Err(Error::InvalidParameter(
                "lambda_l list must not be empty".into(),
            ));
        }
        for &ll in &self.lambda_l_list {
            if ll.is_nan() || ll <= 0.0 || ll >= 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "lambda_l values must lie in (0, 1), got {ll}"
                )));
            }
        }
        if self.eps.is_nan() || self.eps <= 0.0 || self.baseline_eps.is_nan() || self.baseline_eps <= 0.0 {
            return Err(Error::InvalidParameter(
                "eps and baseline_eps must be positive".into(),
            ));
        }
        if self.jobs == 0 {
            return Err(Error::InvalidParameter("jobs must be at least 1".into()));
        }
        match &self.source {
            PlanSource::Synthetic { m, n, s } => {
                if *m == 0 || *n == 0 {
                    return Err(Error::InvalidParameter(
                        "synthetic sources need m >= 1 and n >= 1".into(),
                    ));
                }
                if self.scenario != ScenarioKind::SumZero && *s == 0 {
                    return Err(Error::InvalidParameter(
                        "this scenario needs s >= 1 constraint rows".into(),
                    ));
                }
            }
            PlanSource::File { degree, s, .. } => {
                if *degree == 0 {
                    return Err(Error::InvalidParameter("degree must be at least 1".into()));
                }
                if self.scenario != ScenarioKind::SumZero && *s == 0 {
                    return Err(Error::InvalidParameter(
                        "this scenario needs s >= 1 constraint rows".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// One (instance, penalty, solver) outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub scenario: ScenarioKind,
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub lambda_l: f64,
    pub solver: SolverKind,
    pub nnz: usize,
    pub obj: f64,
    /// `obj - obj(reference run)`; the reference is the best known value.
    pub eta_gap: f64,
    /// Wall-clock seconds around the solver call only.
    pub runtime: f64,
    pub outer_iters: usize,
    pub inner_iters: usize,
    pub status: String,
}

impl BenchRecord {
    /// `m;n;s` label used in the grouped table.
    pub fn size_label(&self) -> String {
        format!("{};{};{}", self.m, self.n, self.s)
    }
}

fn status_str(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Converged => "converged",
        SolveStatus::MaxOuter => "max_iter",
        SolveStatus::InnerFailure => "inner_failure",
    }
}

/// Design, response, constraint matrix and right-hand side of an instance.
type InstanceMatrices = (Array2<f64>, Array1<f64>, Array2<f64>, Array1<f64>);

/// Builds the instance matrices for a plan (before the penalty is chosen).
fn build_instance(plan: &ExperimentPlan) -> Result<InstanceMatrices> {
    match &plan.source {
        PlanSource::Synthetic { m, n, s } => {
            let scenario = match plan.scenario {
                ScenarioKind::SumZero => Scenario::SumZero,
                ScenarioKind::RandomB => Scenario::RandomB { s: *s },
                ScenarioKind::Genlasso => Scenario::GenLasso { s: *s },
            };
            let inst = generate(&SyntheticSpec::new(*m, *n, plan.seed, scenario))?;
            Ok((inst.a, inst.b, inst.bmat, inst.d))
        }
        PlanSource::File {
            path,
            degree,
            s,
            scale,
        } => {
            let (raw, y) = load_libsvm(path)?;
            let feats = if *scale {
                scale_columns(&raw.view())
            } else {
                raw
            };
            let a = poly_expand(&feats.view(), *degree)?;
            let n = a.ncols();
            let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
            match plan.scenario {
                ScenarioKind::SumZero => Ok((a, y, Array2::ones((1, n)), Array1::zeros(1))),
                ScenarioKind::RandomB => {
                    let mut bmat = Array2::zeros((*s, n));
                    for j in 0..n {
                        for i in 0..*s {
                            bmat[(i, j)] = rng.sample::<f64, _>(StandardNormal);
                        }
                    }
                    let d = Array1::from_shape_fn(*s, |_| rng.sample::<f64, _>(StandardNormal));
                    Ok((a, y, bmat, d))
                }
                ScenarioKind::Genlasso => {
                    let mut dmat = Array2::zeros((n + *s, n));
                    for i in 0..n {
                        dmat[(i, i)] = 1.0;
                    }
                    for j in 0..n {
                        for i in 0..*s {
                            dmat[(n + i, j)] = rng.sample::<f64, _>(StandardNormal);
                        }
                    }
                    let mats = reduce_matrices(&a.view(), &dmat.view())?;
                    Ok((mats.a_tilde, y, mats.u2t, Array1::zeros(*s)))
                }
            }
        }
    }
}

fn dispatch(kind: SolverKind, data: &ProblemData, eps: f64) -> Result<SolveResult> {
    match kind {
        SolverKind::Ssnal => {
            let config = SsnalConfig {
                eps,
                ..SsnalConfig::default()
            };
            alm_solve(data, &config, None)
        }
        SolverKind::Admm | SolverKind::Aadmm | SolverKind::Lalm | SolverKind::Pd => {
            let config = BaselineConfig {
                eps,
                ..BaselineConfig::default()
            };
            match kind {
                SolverKind::Admm => admm_solve(data, &config, None),
                SolverKind::Aadmm => aadmm_solve(data, &config, None),
                SolverKind::Lalm => lalm_solve(data, &config, None),
                SolverKind::Pd => primal_dual_solve(data, &config, None),
                SolverKind::Ssnal => unreachable!(),
            }
        }
    }
}

/// Writes one convergence trace as CSV with a cumulative time column.
fn write_trace(path: &Path, result: &SolveResult) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path).map_err(csv_err)?;
    wtr.write_record(["iter", "time_s", "obj", "eta_p", "eta_d"])
        .map_err(csv_err)?;
    let mut elapsed = 0.0f64;
    for trace in &result.traces {
        elapsed += trace.elapsed.as_secs_f64();
        wtr.write_record([
            trace.k.to_string(),
            format!("{elapsed}"),
            format!("{}", trace.obj_p),
            format!("{}", trace.eta_p),
            format!("{}", trace.eta_d),
        ])
        .map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidParameter(format!("csv: {e}"))
}

fn trace_file_name(plan: &ExperimentPlan, m: usize, n: usize, s: usize, lambda_l: f64, solver: SolverKind) -> String {
    format!(
        "trace_{}_{}x{}x{}_ll{:e}_{}.csv",
        plan.scenario, m, n, s, lambda_l, solver
    )
}

/// Runs the whole plan: per penalty value, a reference solve at
/// `baseline_eps` followed by every requested solver at `eps`, with traces
/// written to `output_dir` and a summary emitted as CSV and JSON.
///
/// Penalty cells run on `jobs` worker threads; each cell is internally
/// single-threaded and the returned records are ordered deterministically.
pub fn run_plan(plan: &ExperimentPlan) -> Result<Vec<BenchRecord>> {
    plan.validate()?;
    std::fs::create_dir_all(&plan.output_dir)?;
    let (a, b, bmat, d) = build_instance(plan)?;
    let (m, n) = a.dim();
    let s = bmat.nrows();

    let run_cell = |lambda_l: f64| -> Result<Vec<BenchRecord>> {
        let lambda = lambda_from_fraction(&a.view(), &b.view(), lambda_l)?;
        let data = ProblemData::new(a.clone(), b.clone(), bmat.clone(), d.clone(), lambda)?;

        let reference = alm_solve(
            &data,
            &SsnalConfig {
                eps: plan.baseline_eps,
                ..SsnalConfig::default()
            },
            None,
        )?;
        let f_star = objective_primal(&data, &reference.point.x.view())?;

        let mut records = Vec::with_capacity(plan.solvers.len());
        for &solver in &plan.solvers {
            let started = Instant::now();
            let result = dispatch(solver, &data, plan.eps)?;
            let runtime = started.elapsed().as_secs_f64();
            let obj = objective_primal(&data, &result.point.x.view())?;
            let trace_path = plan
                .output_dir
                .join(trace_file_name(plan, m, n, s, lambda_l, solver));
            write_trace(&trace_path, &result)?;
            records.push(BenchRecord {
                scenario: plan.scenario,
                m,
                n,
                s,
                lambda_l,
                solver,
                nnz: result.nnz,
                obj,
                eta_gap: obj - f_star,
                runtime,
                outer_iters: result.traces.last().map_or(0, |t| t.k + 1),
                inner_iters: result.total_inner,
                status: status_str(result.status).to_string(),
            });
        }
        Ok(records)
    };

    let cells: Vec<f64> = plan.lambda_l_list.clone();
    let mut per_cell: Vec<Option<Vec<BenchRecord>>> = vec![None; cells.len()];
    if plan.jobs == 1 || cells.len() == 1 {
        for (i, &ll) in cells.iter().enumerate() {
            per_cell[i] = Some(run_cell(ll)?);
        }
    } else {
        type CellSink = Mutex<Vec<(usize, Result<Vec<BenchRecord>>)>>;
        let next = AtomicUsize::new(0);
        let sink: CellSink = Mutex::new(Vec::new());
        std::thread::scope(|scope| {
            for _ in 0..plan.jobs.min(cells.len()) {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    if i >= cells.len() {
                        break;
                    }
                    let out = run_cell(cells[i]);
                    sink.lock().expect("sink poisoned").push((i, out));
                });
            }
        });
        for (i, out) in sink.into_inner().expect("sink poisoned") {
            per_cell[i] = Some(out?);
        }
    }

    let records: Vec<BenchRecord> = per_cell
        .into_iter()
        .flat_map(|c| c.expect("every cell ran"))
        .collect();

    std::fs::write(plan.output_dir.join("summary.csv"), records_to_csv(&records)?)?;
    std::fs::write(
        plan.output_dir.join("summary.json"),
        serde_json::to_string_pretty(&records)
            .map_err(|e| Error::InvalidParameter(format!("json: {e}")))?,
    )?;
    Ok(records)
}

/// Flat CSV serialization of records; parse it back with
/// [`records_from_csv`] to recover the records exactly.
pub fn records_to_csv(records: &[BenchRecord]) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    for record in records {
        wtr.serialize(record).map_err(csv_err)?;
    }
    let bytes = wtr
        .into_inner()
        .map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidParameter(format!("csv utf-8: {e}")))
}

pub fn records_from_csv(text: &str) -> Result<Vec<BenchRecord>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        out.push(row.map_err(csv_err)?);
    }
    Ok(out)
}

/// Renders records as a grouped text table (one row per size and penalty,
/// per-solver gap and runtime columns) plus the flat CSV serialization.
pub fn emit_table(records: &[BenchRecord]) -> Result<(String, String)> {
    if records.is_empty() {
        return Err(Error::InvalidParameter(
            "emit_table needs at least one record".into(),
        ));
    }
    let solvers: Vec<SolverKind> = SolverKind::ALL
        .iter()
        .copied()
        .filter(|k| records.iter().any(|r| r.solver == *k))
        .collect();

    // group rows by size then lambda_l, preserving first-seen order
    let mut groups: Vec<((String, String), Vec<&BenchRecord>)> = Vec::new();
    for record in records {
        let key = (record.size_label(), format!("{:e}", record.lambda_l));
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(record),
            None => groups.push((key, vec![record])),
        }
    }

    let mut header = vec!["size".to_string(), "lambda_l".to_string(), "nnz".to_string(), "obj".to_string()];
    for solver in &solvers {
        header.push(format!("gap_{solver}"));
    }
    for solver in &solvers {
        header.push(format!("time_{solver}"));
    }
    for solver in &solvers {
        header.push(format!("status_{solver}"));
    }

    let mut rows: Vec<Vec<String>> = Vec::new();
    for ((size, lambda_l), members) in &groups {
        let lead = members
            .iter()
            .find(|r| r.solver == SolverKind::Ssnal)
            .or_else(|| members.first())
            .expect("nonempty group");
        let mut row = vec![
            size.clone(),
            lambda_l.clone(),
            lead.nnz.to_string(),
            format!("{:.6e}", lead.obj),
        ];
        for solver in &solvers {
            row.push(match members.iter().find(|r| r.solver == *solver) {
                Some(r) => format!("{:.1e}", r.eta_gap),
                None => "-".to_string(),
            });
        }
        for solver in &solvers {
            row.push(match members.iter().find(|r| r.solver == *solver) {
                Some(r) => format!("{:.2}", r.runtime),
                None => "-".to_string(),
            });
        }
        for solver in &solvers {
            row.push(match members.iter().find(|r| r.solver == *solver) {
                Some(r) => r.status.clone(),
                None => "-".to_string(),
            });
        }
        rows.push(row);
    }

    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            rows.iter()
                .map(|r| r[c].len())
                .chain(std::iter::once(header[c].len()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let render = |cells: &[String]| -> String {
        cells
            .iter()
            .enumerate()
            .map(|(c, cell)| format!("{:>width$}", cell, width = widths[c]))
            .collect::<Vec<_>>()
            .join("  ")
    };
    let mut text = String::new();
    text.push_str(&render(&header));
    text.push('\n');
    text.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    text.push('\n');
    for row in &rows {
        text.push_str(&render(row));
        text.push('\n');
    }

    Ok((text, records_to_csv(records)?))
}
