//! Method sweeps over one or more seeds and the files they produce.
//!
//! Output directory layout:
//! - `<method>.csv`: convergence history on the first seed
//! - `summary.csv`: one row per method on the first seed
//! - `summary_median.csv`: per-method medians over all seeds (seeds > 1)
//! - `metadata.json`: problem, solver options and seed list
//! - `convergence.svg`: `log10 δ_k` against `k` (with `--plot`)

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde_json::json;
use tubal::experiment::{median_summary, run_method, write_summary_csv, MethodRun, StepParameters, SummaryRow};
use tubal::io::write_history_csv;
use tubal::problems::{make_rhs, random_solution, ProblemInstance, SolutionKind};
use tubal::solvers::RelaxDirection;

use crate::config::Experiment;
use crate::plot;

pub struct SweepResult {
    /// `runs[s][j]`: method `j` on seed `s`.
    pub runs: Vec<Vec<MethodRun>>,
    pub seeds: Vec<u64>,
    pub files: Vec<PathBuf>,
}

impl SweepResult {
    pub fn first_seed_summary(&self) -> Vec<SummaryRow> {
        self.runs[0].iter().map(MethodRun::summary).collect()
    }
}

/// Seeds actually used: a known all-ones solution makes every seed identical.
fn seed_list(e: &Experiment) -> Vec<u64> {
    let count = match e.descriptor.solution {
        SolutionKind::Ones => 1,
        SolutionKind::Random => e.seeds,
    };
    (0..count as u64).map(|i| e.descriptor.seed + i).collect()
}

pub fn run_experiment(e: &Experiment) -> Result<SweepResult> {
    let base = e.descriptor.build()?;
    log::info!("problem {}", base.descriptor);
    // 𝒜 does not depend on the seed, so its step parameters are shared.
    let params = StepParameters::new(&base.a)?;
    let seeds = seed_list(e);
    let mut runs = Vec::with_capacity(seeds.len());
    for &seed in &seeds {
        let problem = if seed == base.descriptor.seed {
            base.clone()
        } else {
            let x_star = random_solution(base.descriptor.n, base.descriptor.n, seed);
            ProblemInstance {
                b: make_rhs(&base.a, &x_star)?,
                x_star,
                a: base.a.clone(),
                descriptor: tubal::problems::ProblemDescriptor { seed, ..base.descriptor.clone() },
            }
        };
        let mut row = Vec::with_capacity(e.methods.len());
        for m in &e.methods {
            let run = run_method(m, &problem, &params, &e.opts, e.direction)?;
            log::info!(
                "seed {seed} {m}: {} iterations, delta {:.3e}, {}",
                run.history.iterations(),
                run.history.final_delta(),
                run.history.stop_reason
            );
            row.push(run);
        }
        runs.push(row);
    }
    let files = write_outputs(e, &runs, &seeds)?;
    Ok(SweepResult { runs, seeds, files })
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn write_outputs(e: &Experiment, runs: &[Vec<MethodRun>], seeds: &[u64]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(&e.out).with_context(|| format!("creating {}", e.out.display()))?;
    let mut files = Vec::new();
    for run in &runs[0] {
        let path = e.out.join(format!("{}.csv", run.method.file_stem()));
        write_history_csv(create(&path)?, &run.history)?;
        files.push(path);
    }
    let summary: Vec<SummaryRow> = runs[0].iter().map(MethodRun::summary).collect();
    let path = e.out.join("summary.csv");
    write_summary_csv(create(&path)?, &summary)?;
    files.push(path);
    if runs.len() > 1 {
        let path = e.out.join("summary_median.csv");
        write_summary_csv(create(&path)?, &median_summary(runs))?;
        files.push(path);
    }
    let path = e.out.join("metadata.json");
    let problem: serde_json::Map<String, serde_json::Value> = e
        .descriptor
        .metadata()
        .into_iter()
        .map(|(k, v)| (k, json!(v)))
        .collect();
    let notes: Vec<serde_json::Value> = runs
        .iter()
        .zip(seeds)
        .flat_map(|(row, seed)| {
            row.iter()
                .filter_map(move |r| r.note.as_ref().map(|n| json!({"seed": seed, "method": r.method.to_string(), "note": n})))
        })
        .collect();
    let meta = json!({
        "tool": "tubal",
        "version": env!("CARGO_PKG_VERSION"),
        "problem": problem,
        "methods": e.methods.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "tol": e.opts.rel_residual_tol,
        "maxit": e.opts.max_iterations,
        "divergence_guard": e.opts.divergence_guard,
        "relax": match e.direction {
            RelaxDirection::FromRelaxed => "relaxed",
            RelaxDirection::FromUnrelaxed => "unrelaxed",
        },
        "x0": "zeros",
        "seeds_requested": e.seeds,
        "seeds": seeds,
        "notes": notes,
    });
    serde_json::to_writer_pretty(create(&path)?, &meta)?;
    files.push(path);
    if e.plot {
        let path = e.out.join("convergence.svg");
        plot::convergence_svg(&path, &runs[0], &e.descriptor.to_string())?;
        files.push(path);
    }
    Ok(files)
}
