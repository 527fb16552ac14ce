//! `tubal`: runs solver sweeps on the test problems and the self-check suites.
//!
//! Exit status: 0 on success, 1 on invalid input or I/O failure, 2 when a
//! verification suite fails.

mod config;
mod plot;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use tubal::verify::{run_suite, Criterion, Suite, SuiteReport};

use config::{ExperimentConfig, MethodList};

#[derive(Parser)]
#[command(name = "tubal", version, about = "Tubular vs global iterative solvers for tensor equations A*X = B")]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a method sweep and write convergence CSVs, a summary and metadata.
    Run(RunArgs),
    /// Run a self-check suite and print a JSON report.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problem family: blur or baart-prolate.
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// First seed for the random solution.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of consecutive seeds in the median summary.
    #[arg(long)]
    seeds: Option<usize>,
    /// Known solution: random or ones.
    #[arg(long)]
    solution: Option<String>,
    /// Blur bandwidth.
    #[arg(long)]
    band: Option<usize>,
    /// Blur width.
    #[arg(long)]
    sigma: Option<f64>,
    /// Prolate bandwidth parameter.
    #[arg(long)]
    w: Option<f64>,
    /// Comma-separated methods, e.g. `TR:alpha_star,Richardson:mu_star,TSD,SD`.
    #[arg(long)]
    methods: Option<String>,
    /// Relative residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration cap.
    #[arg(long)]
    maxit: Option<usize>,
    /// Relaxation direction for TRR/TSDR: relaxed or unrelaxed.
    #[arg(long)]
    relax: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write convergence.svg.
    #[arg(long)]
    plot: bool,
}

impl RunArgs {
    fn as_config(&self) -> ExperimentConfig {
        let mut c = ExperimentConfig::default();
        c.problem.family = self.problem.clone();
        c.problem.n = self.n;
        c.problem.seed = self.seed;
        c.problem.seeds = self.seeds;
        c.problem.solution = self.solution.clone();
        c.problem.band = self.band;
        c.problem.sigma = self.sigma;
        c.problem.w = self.w;
        c.solver.methods = self.methods.clone().map(MethodList::Joined);
        c.solver.tol = self.tol;
        c.solver.maxit = self.maxit;
        c.solver.relax = self.relax.clone();
        c.output.dir = self.out.clone();
        c.output.plot = self.plot.then_some(true);
        c
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// algebra, spectra, inequalities, solvers, experiments or all.
    suite: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Also write the JSON report to this file.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn run(args: &RunArgs) -> Result<()> {
    let file = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let experiment = file.overlay(args.as_config()).resolve()?;
    let result = runner::run_experiment(&experiment)?;
    println!("{}", experiment.descriptor);
    println!(
        "{:<24} {:>7} {:>12} {:>12} {:>9}  stop",
        "method", "iters", "final delta", "rel error", "seconds"
    );
    for row in result.first_seed_summary() {
        let label = if row.step_param.is_empty() {
            row.method.clone()
        } else {
            format!("{}({})", row.method, row.step_param)
        };
        let err = row.final_rel_error.map(|e| format!("{e:.4e}")).unwrap_or_default();
        println!(
            "{label:<24} {:>7} {:>12.4e} {err:>12} {:>9.3}  {}",
            row.iters, row.final_delta, row.seconds, row.stop_reason
        );
    }
    if result.seeds.len() > 1 {
        println!("medians over {} seeds in summary_median.csv", result.seeds.len());
    }
    for f in &result.files {
        log::info!("wrote {}", f.display());
    }
    Ok(())
}

fn report_json(r: &SuiteReport) -> serde_json::Value {
    json!({
        "suite": r.suite.as_str(),
        "passed": r.passed(),
        "seconds": r.seconds,
        "checks": r.checks.iter().map(|c| json!({
            "name": c.name,
            "trials": c.trials,
            "value": c.value,
            "threshold": c.threshold,
            "criterion": match c.criterion { Criterion::AtMost => "at_most", Criterion::AtLeast => "at_least" },
            "passed": c.passed,
            "detail": c.detail,
        })).collect::<Vec<_>>(),
    })
}

/// `Ok(true)` when every check passed.
fn verify(args: &VerifyArgs) -> Result<bool> {
    let suites: Vec<Suite> = if args.suite.eq_ignore_ascii_case("all") {
        Suite::ALL.to_vec()
    } else {
        vec![args.suite.parse()?]
    };
    let mut reports = Vec::new();
    for s in suites {
        let r = run_suite(s, args.seed)?;
        for c in &r.checks {
            eprintln!("[{}] {c}", r.suite);
        }
        reports.push(r);
    }
    let passed = reports.iter().all(SuiteReport::passed);
    let doc = json!({
        "seed": args.seed,
        "passed": passed,
        "suites": reports.iter().map(report_json).collect::<Vec<_>>(),
    });
    let text = serde_json::to_string_pretty(&doc)?;
    println!("{text}");
    if let Some(path) = &args.report {
        std::fs::write(path, &text)?;
    }
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let outcome = match &cli.command {
        Command::Run(a) => run(a).map(|_| true),
        Command::Verify(a) => verify(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
