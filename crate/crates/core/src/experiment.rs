//! Method sweeps over a test problem.
//!
//! A method is written `NAME` or `NAME:PARAM`, e.g. `TR:alpha_star`,
//! `Richardson:mu_one`, `TR:0.5` (the tube `0.5·[e₁]`) or `TSD`. Every method
//! in a sweep starts from `𝒳₀ = 0` and solves against the same `ℬ`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::problems::ProblemInstance;
use crate::solvers::{
    relax_wrap, solve, ConvergenceHistory, GlobalRichardson, GlobalSteepestDescent, IterOptions, IterationStep,
    NormalSpectrum, RelaxDirection, StopReason, TubularRichardson, TubularSteepestDescent,
};
use crate::tensor::{Tensor3, C64};
use crate::tubal::Tubular;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MethodKind {
    /// Tubular Richardson.
    TR,
    /// Global Richardson.
    Richardson,
    /// Tubular steepest descent.
    TSD,
    /// Global steepest descent.
    SD,
    /// Relaxed tubular Richardson.
    TRR,
    /// Relaxed tubular steepest descent.
    TSDR,
}

impl MethodKind {
    pub const ALL: [MethodKind; 6] = [
        MethodKind::TR,
        MethodKind::Richardson,
        MethodKind::TSD,
        MethodKind::SD,
        MethodKind::TRR,
        MethodKind::TSDR,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MethodKind::TR => "TR",
            MethodKind::Richardson => "Richardson",
            MethodKind::TSD => "TSD",
            MethodKind::SD => "SD",
            MethodKind::TRR => "TRR",
            MethodKind::TSDR => "TSDR",
        }
    }

    fn takes_tube_step(&self) -> bool {
        matches!(self, MethodKind::TR | MethodKind::TRR)
    }

    fn default_step(&self) -> Option<StepChoice> {
        match self {
            MethodKind::TR => Some(StepChoice::AlphaStar),
            MethodKind::TRR => Some(StepChoice::AlphaOne),
            MethodKind::Richardson => Some(StepChoice::MuStar),
            _ => None,
        }
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MethodKind::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown method '{s}' (expected one of TR, Richardson, TSD, SD, TRR, TSDR)"
                ))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepChoice {
    AlphaStar,
    AlphaOne,
    MuStar,
    MuOne,
    /// For tubular methods the tube `c·[e₁]`, for global ones the scalar `c`.
    User(f64),
}

impl StepChoice {
    pub fn label(&self) -> String {
        match self {
            StepChoice::AlphaStar => "alpha_star".into(),
            StepChoice::AlphaOne => "alpha_one".into(),
            StepChoice::MuStar => "mu_star".into(),
            StepChoice::MuOne => "mu_one".into(),
            StepChoice::User(c) => format!("{c}"),
        }
    }
}

impl FromStr for StepChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "alpha_star" => Ok(StepChoice::AlphaStar),
            "alpha_one" | "alpha_1" => Ok(StepChoice::AlphaOne),
            "mu_star" => Ok(StepChoice::MuStar),
            "mu_one" | "mu_1" => Ok(StepChoice::MuOne),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|c| c.is_finite() && *c > 0.0)
                .map(StepChoice::User)
                .ok_or_else(|| Error::InvalidArgument(format!("invalid step parameter '{s}'"))),
        }
    }
}

/// A method with its step parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MethodSpec {
    pub kind: MethodKind,
    pub step: Option<StepChoice>,
}

impl MethodSpec {
    pub fn new(kind: MethodKind, step: Option<StepChoice>) -> Result<Self> {
        let spec = MethodSpec { kind, step };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        use MethodKind::*;
        use StepChoice::*;
        let ok = matches!(
            (self.kind, self.step),
            (TR | TRR, None | Some(AlphaStar | AlphaOne | User(_)))
                | (Richardson, None | Some(MuStar | MuOne | User(_)))
                | (TSD | SD | TSDR, None)
        );
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "method {} does not accept step parameter {}",
                self.kind.as_str(),
                self.step.map(|s| s.label()).unwrap_or_default()
            )))
        }
    }

    pub fn effective_step(&self) -> Option<StepChoice> {
        self.step.or_else(|| self.kind.default_step())
    }

    /// File-safe label, e.g. `TR_alpha_star`.
    pub fn file_stem(&self) -> String {
        match self.effective_step() {
            Some(s) => format!("{}_{}", self.kind.as_str(), s.label()),
            None => self.kind.as_str().to_string(),
        }
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.effective_step() {
            Some(s) => write!(f, "{}({})", self.kind.as_str(), s.label()),
            None => f.write_str(self.kind.as_str()),
        }
    }
}

impl FromStr for MethodSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p.parse::<StepChoice>()?)),
            None => (s, None),
        };
        MethodSpec::new(name.parse()?, param)
    }
}

/// Parses a comma-separated method list.
pub fn parse_methods(list: &str) -> Result<Vec<MethodSpec>> {
    let methods = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(MethodSpec::from_str)
        .collect::<Result<Vec<_>>>()?;
    if methods.is_empty() {
        return Err(Error::InvalidArgument("methods: at least one method is required".into()));
    }
    Ok(methods)
}

/// Step parameters derived from the spectrum of `𝒜ᴴ∗𝒜`, computed once per
/// problem.
#[derive(Clone, Debug)]
pub struct StepParameters {
    spectrum: NormalSpectrum,
    p: usize,
}

impl StepParameters {
    pub fn new(a: &Tensor3) -> Result<Self> {
        Ok(StepParameters {
            spectrum: NormalSpectrum::compute(a)?,
            p: a.p(),
        })
    }

    pub fn spectrum(&self) -> &NormalSpectrum {
        &self.spectrum
    }

    pub fn tube(&self, choice: StepChoice) -> Result<Tubular> {
        match choice {
            StepChoice::AlphaStar => self.spectrum.alpha_star(),
            StepChoice::AlphaOne => self.spectrum.alpha_one(),
            StepChoice::User(c) => Ok(Tubular::scalar(C64::new(c, 0.0), self.p)),
            other => Err(Error::InvalidArgument(format!("{} is not a tubular step", other.label()))),
        }
    }

    pub fn scalar(&self, choice: StepChoice) -> Result<f64> {
        match choice {
            StepChoice::MuStar => self.spectrum.mu_star(),
            StepChoice::MuOne => self.spectrum.mu_one(),
            StepChoice::User(c) => Ok(c),
            other => Err(Error::InvalidArgument(format!("{} is not a scalar step", other.label()))),
        }
    }
}

/// Result of one method on one problem.
#[derive(Clone, Debug)]
pub struct MethodRun {
    pub method: MethodSpec,
    pub history: ConvergenceHistory,
    pub x: Tensor3,
    /// Set when the run ended on a singular tubular denominator.
    pub note: Option<String>,
}

impl MethodRun {
    pub fn summary(&self) -> SummaryRow {
        SummaryRow {
            method: self.method.kind.as_str().to_string(),
            step_param: self.method.effective_step().map(|s| s.label()).unwrap_or_default(),
            iters: self.history.iterations(),
            final_delta: self.history.final_delta(),
            final_rel_error: self.history.final_rel_error(),
            seconds: self.history.total_seconds(),
            stop_reason: self.history.stop_reason,
        }
    }
}

pub fn run_method(
    method: &MethodSpec,
    problem: &ProblemInstance,
    params: &StepParameters,
    opts: &IterOptions,
    direction: RelaxDirection,
) -> Result<MethodRun> {
    method.validate()?;
    let a = &problem.a;
    let b = &problem.b;
    let x0 = Tensor3::zeros(a.m(), b.m(), a.p());
    let mut opts = opts.clone();
    if opts.track_error_against.is_none() {
        opts.track_error_against = Some(problem.x_star.clone());
    }
    let mut step: Box<dyn IterationStep> = match method.kind {
        k if k.takes_tube_step() => {
            let alpha = params.tube(method.effective_step().expect("tube methods have a default"))?;
            Box::new(TubularRichardson::new(alpha)?)
        }
        MethodKind::Richardson => Box::new(GlobalRichardson::new(
            params.scalar(method.effective_step().expect("Richardson has a default"))?,
        )?),
        MethodKind::TSD | MethodKind::TSDR => Box::new(TubularSteepestDescent),
        _ => Box::new(GlobalSteepestDescent),
    };
    let relaxed = matches!(method.kind, MethodKind::TRR | MethodKind::TSDR);
    let outcome = if relaxed {
        relax_wrap(step.as_mut(), a, b, &x0, &opts, direction)
    } else {
        solve(step.as_mut(), a, b, &x0, &opts)
    };
    match outcome {
        Ok(o) => Ok(MethodRun {
            method: *method,
            history: o.history,
            x: o.x,
            note: None,
        }),
        Err(Error::SingularStep {
            iteration,
            component,
            magnitude,
            partial,
        }) => {
            let mut history = partial.history;
            history.stop_reason = StopReason::Breakdown;
            Ok(MethodRun {
                method: *method,
                history,
                x: partial.x,
                note: Some(format!(
                    "singular Fourier component {component} (|d| = {magnitude:e}) at iteration {iteration}"
                )),
            })
        }
        Err(e) => Err(e),
    }
}

/// Runs every method on one problem. Breakdowns are recorded, not fatal.
pub fn run_sweep(
    methods: &[MethodSpec],
    problem: &ProblemInstance,
    opts: &IterOptions,
    direction: RelaxDirection,
) -> Result<Vec<MethodRun>> {
    if methods.is_empty() {
        return Err(Error::InvalidArgument("methods: at least one method is required".into()));
    }
    opts.validate()?;
    let params = StepParameters::new(&problem.a)?;
    methods
        .iter()
        .map(|m| {
            let run = run_method(m, problem, &params, opts, direction)?;
            log::info!(
                "{m}: {} iterations, delta {:e}, {}",
                run.history.iterations(),
                run.history.final_delta(),
                run.history.stop_reason
            );
            Ok(run)
        })
        .collect()
}

/// One line of the sweep summary.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub method: String,
    pub step_param: String,
    pub iters: usize,
    pub final_delta: f64,
    pub final_rel_error: Option<f64>,
    pub seconds: f64,
    pub stop_reason: StopReason,
}

pub const SUMMARY_HEADER: [&str; 7] = [
    "method",
    "step_param",
    "iters",
    "final_delta",
    "final_rel_error",
    "seconds",
    "stop_reason",
];

pub fn write_summary_csv<W: Write>(w: W, rows: &[SummaryRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let e = |e: csv::Error| Error::Format(format!("csv: {e}"));
    out.write_record(SUMMARY_HEADER).map_err(e)?;
    for r in rows {
        out.write_record([
            r.method.clone(),
            r.step_param.clone(),
            r.iters.to_string(),
            format!("{:e}", r.final_delta),
            r.final_rel_error.map(|v| format!("{v:e}")).unwrap_or_default(),
            format!("{:.6}", r.seconds),
            r.stop_reason.as_str().to_string(),
        ])
        .map_err(e)?;
    }
    out.flush()?;
    Ok(())
}

/// Median of a non-empty sample (mean of the middle pair for even sizes).
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() || values.iter().any(|v| v.is_nan()) {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[mid] } else { 0.5 * (v[mid - 1] + v[mid]) })
}

/// Per-method medians of a multi-seed sweep; `runs[s][j]` is method `j` on
/// seed `s`. The stop reason is the most frequent one.
pub fn median_summary(runs: &[Vec<MethodRun>]) -> Vec<SummaryRow> {
    let Some(first) = runs.first() else {
        return Vec::new();
    };
    (0..first.len())
        .map(|j| {
            let rows: Vec<SummaryRow> = runs.iter().map(|r| r[j].summary()).collect();
            let col = |f: &dyn Fn(&SummaryRow) -> f64| median(&rows.iter().map(f).collect::<Vec<_>>());
            let errs: Option<Vec<f64>> = rows.iter().map(|r| r.final_rel_error).collect();
            let mut reasons: Vec<(StopReason, usize)> = Vec::new();
            for r in &rows {
                match reasons.iter_mut().find(|(s, _)| *s == r.stop_reason) {
                    Some((_, c)) => *c += 1,
                    None => reasons.push((r.stop_reason, 1)),
                }
            }
            let stop_reason = reasons.iter().max_by_key(|(_, c)| *c).map(|(s, _)| *s).expect("non-empty");
            SummaryRow {
                method: rows[0].method.clone(),
                step_param: rows[0].step_param.clone(),
                iters: col(&|r| r.iters as f64).unwrap_or(0.0).round() as usize,
                final_delta: col(&|r| r.final_delta).unwrap_or(f64::NAN),
                final_rel_error: errs.and_then(|e| median(&e)),
                seconds: col(&|r| r.seconds).unwrap_or(0.0),
                stop_reason,
            }
        })
        .collect()
}
