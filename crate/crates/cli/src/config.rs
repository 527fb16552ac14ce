//! Experiment configuration: a TOML file merged with command-line overrides.
//!
//! ```toml
//! [problem]
//! family = "blur"        # or "baart-prolate"
//! n = 64
//! band = 7
//! sigma = 4.0
//! seed = 1
//! seeds = 10
//! solution = "random"    # or "ones"
//!
//! [solver]
//! methods = ["TR:alpha_star", "Richardson:mu_star", "TSD", "SD"]
//! tol = 1e-8
//! maxit = 3000
//! relax = "relaxed"      # or "unrelaxed"
//!
//! [output]
//! dir = "out"
//! plot = true
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use tubal::experiment::{parse_methods, MethodSpec};
use tubal::problems::{Family, ProblemDescriptor, SolutionKind};
use tubal::solvers::{IterOptions, RelaxDirection};

/// Seeds averaged in a summary when neither the file nor the flags say.
pub const DEFAULT_SEEDS: usize = 10;

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub problem: ProblemSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub family: Option<String>,
    pub n: Option<usize>,
    pub band: Option<usize>,
    pub sigma: Option<f64>,
    pub w: Option<f64>,
    pub seed: Option<u64>,
    pub seeds: Option<usize>,
    pub solution: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub methods: Option<MethodList>,
    pub tol: Option<f64>,
    pub maxit: Option<usize>,
    pub divergence_guard: Option<f64>,
    pub relax: Option<String>,
}

/// Either `"TR,SD"` or `["TR", "SD"]`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum MethodList {
    Joined(String),
    List(Vec<String>),
}

impl MethodList {
    fn joined(&self) -> String {
        match self {
            MethodList::Joined(s) => s.clone(),
            MethodList::List(v) => v.join(","),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub plot: Option<bool>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overlay(mut self, other: ExperimentConfig) -> Self {
        macro_rules! take {
            ($($sec:ident . $f:ident),*) => { $( if other.$sec.$f.is_some() { self.$sec.$f = other.$sec.$f; } )* };
        }
        take!(
            problem.family, problem.n, problem.band, problem.sigma, problem.w, problem.seed, problem.seeds,
            problem.solution, solver.methods, solver.tol, solver.maxit, solver.divergence_guard, solver.relax,
            output.dir, output.plot
        );
        self
    }

    pub fn resolve(&self) -> Result<Experiment> {
        let p = &self.problem;
        let family = match p.family.as_deref().unwrap_or("blur").to_ascii_lowercase().as_str() {
            "blur" => {
                let Family::Blur { band, sigma } = Family::blur_default() else { unreachable!() };
                Family::Blur {
                    band: p.band.unwrap_or(band),
                    sigma: p.sigma.unwrap_or(sigma),
                }
            }
            "baart-prolate" | "baart_prolate" | "baart" => {
                let Family::BaartProlate { w } = Family::baart_prolate_default() else { unreachable!() };
                Family::BaartProlate { w: p.w.unwrap_or(w) }
            }
            other => bail!("problem.family: unknown family '{other}' (expected blur or baart-prolate)"),
        };
        let n = p.n.unwrap_or(64);
        if n == 0 {
            bail!("problem.n: must be positive");
        }
        match family {
            Family::Blur { band, sigma } => {
                if band == 0 || band > n {
                    bail!("problem.band: must lie in 1..={n}, got {band}");
                }
                if !(sigma.is_finite() && sigma > 0.0) {
                    bail!("problem.sigma: must be positive, got {sigma}");
                }
            }
            Family::BaartProlate { w } => {
                if n < 4 {
                    bail!("problem.n: baart-prolate needs n >= 4, got {n}");
                }
                if !(w > 0.0 && w < 0.5) {
                    bail!("problem.w: must lie in (0, 0.5), got {w}");
                }
            }
        }
        let solution: SolutionKind = p
            .solution
            .as_deref()
            .unwrap_or("random")
            .parse()
            .context("problem.solution")?;
        let seeds = p.seeds.unwrap_or(DEFAULT_SEEDS);
        if seeds == 0 {
            bail!("problem.seeds: must be at least 1");
        }
        let s = &self.solver;
        let methods = parse_methods(
            &s.methods
                .as_ref()
                .map(MethodList::joined)
                .unwrap_or_else(|| "TR,Richardson,TSD,SD".into()),
        )
        .context("solver.methods")?;
        let opts = IterOptions {
            max_iterations: s.maxit.unwrap_or(3000),
            rel_residual_tol: s.tol.unwrap_or(1e-8),
            divergence_guard: s.divergence_guard.unwrap_or(1e6),
            ..IterOptions::default()
        };
        opts.validate().context("solver")?;
        let direction = match s.relax.as_deref().unwrap_or("relaxed") {
            "relaxed" => RelaxDirection::FromRelaxed,
            "unrelaxed" => RelaxDirection::FromUnrelaxed,
            other => bail!("solver.relax: expected relaxed or unrelaxed, got '{other}'"),
        };
        Ok(Experiment {
            descriptor: ProblemDescriptor {
                family,
                n,
                seed: p.seed.unwrap_or(0),
                solution,
            },
            seeds,
            methods,
            opts,
            direction,
            out: self.output.dir.clone().unwrap_or_else(|| PathBuf::from("tubal-out")),
            plot: self.output.plot.unwrap_or(false),
        })
    }
}

/// A validated experiment.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub descriptor: ProblemDescriptor,
    /// Seeds `seed, seed + 1, …` averaged in the median summary.
    pub seeds: usize,
    pub methods: Vec<MethodSpec>,
    pub opts: IterOptions,
    pub direction: RelaxDirection,
    pub out: PathBuf,
    pub plot: bool,
}
