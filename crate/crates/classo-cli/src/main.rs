//! Benchmark harness for the constrained-Lasso solvers.
//!
//! `classo bench` runs the solvers on a synthetic instance of one of the
//! three constraint scenarios; `classo solve` does the same on a LIBSVM
//! regression file after polynomial feature expansion. Both write per-run
//! convergence traces, a summary CSV/JSON pair and a grouped table.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use classo::{emit_table, run_plan, ExperimentPlan, PlanSource, ScenarioKind, SolverKind};

#[derive(Parser)]
#[command(name = "classo", version, about = "Constrained Lasso solver benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Benchmark solvers on a seeded synthetic instance.
    Bench(BenchArgs),
    /// Benchmark solvers on a LIBSVM regression file (optionally gzipped)
    /// after polynomial feature expansion.
    Solve(SolveArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Constraint scenario.
    #[arg(long, value_parser = parse_scenario, default_value = "sum-zero")]
    scenario: ScenarioKind,

    /// Constraint rows for the random-b and genlasso scenarios
    /// (sum-zero always has one row).
    #[arg(long, default_value_t = 30)]
    s: usize,

    /// Penalty fractions lambda_l in (0, 1), comma separated.
    #[arg(long = "lambda-l", value_delimiter = ',', default_value = "1e-3")]
    lambda_l: Vec<f64>,

    /// Solvers to run, comma separated (ssnal, pd, lalm, admm, aadmm).
    #[arg(long, value_delimiter = ',', value_parser = parse_solver, default_value = "ssnal")]
    solvers: Vec<SolverKind>,

    /// Target accuracy of the benchmarked runs.
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,

    /// Accuracy of the reference run that pins the optimal objective.
    #[arg(long = "baseline-eps", default_value_t = 1e-10)]
    baseline_eps: f64,

    /// RNG seed for instance and constraint generation.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output directory for traces, summary.csv, summary.json, table.txt.
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,

    /// Worker threads over penalty values; 1 keeps timings comparable.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

impl CommonArgs {
    fn constraint_rows(&self) -> usize {
        match self.scenario {
            ScenarioKind::SumZero => 1,
            _ => self.s,
        }
    }
}

#[derive(Args)]
struct BenchArgs {
    /// Sample count.
    #[arg(long)]
    m: usize,

    /// Variable count (before reduction for genlasso).
    #[arg(long)]
    n: usize,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SolveArgs {
    /// LIBSVM regression file; gzip detected automatically.
    #[arg(long)]
    input: PathBuf,

    /// Polynomial expansion degree.
    #[arg(long, default_value_t = 1)]
    degree: usize,

    /// Min-max scale raw features to [-1, 1] before expansion.
    #[arg(long)]
    scale: bool,

    #[command(flatten)]
    common: CommonArgs,
}

fn parse_scenario(s: &str) -> Result<ScenarioKind, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_solver(s: &str) -> Result<SolverKind, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn plan_from(common: CommonArgs, source: PlanSource) -> ExperimentPlan {
    ExperimentPlan {
        scenario: common.scenario,
        source,
        lambda_l_list: common.lambda_l,
        solvers: common.solvers,
        eps: common.eps,
        baseline_eps: common.baseline_eps,
        output_dir: common.out,
        seed: common.seed,
        jobs: common.jobs,
    }
}

fn run(plan: ExperimentPlan) -> anyhow::Result<bool> {
    let records = run_plan(&plan)?;
    let (table, _) = emit_table(&records)?;
    std::fs::write(plan.output_dir.join("table.txt"), &table)?;
    print!("{table}");
    println!(
        "\n{} run(s) written to {}",
        records.len(),
        plan.output_dir.display()
    );
    Ok(records.iter().all(|r| r.status != "inner_failure"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let plan = match cli.command {
        Command::Bench(args) => {
            let source = PlanSource::Synthetic {
                m: args.m,
                n: args.n,
                s: args.common.constraint_rows(),
            };
            plan_from(args.common, source)
        }
        Command::Solve(args) => {
            let source = PlanSource::File {
                path: args.input.clone(),
                degree: args.degree,
                s: args.common.constraint_rows(),
                scale: args.scale,
            };
            plan_from(args.common, source)
        }
    };

    match run(plan) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: at least one run ended in inner_failure");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
