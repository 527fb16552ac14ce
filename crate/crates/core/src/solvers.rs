//! Iterative solvers for `𝒜 ∗ 𝒳 = ℬ` through the normal equation
//! `𝒜ᴴ∗𝒜∗𝒳 = 𝒜ᴴ∗ℬ`.
//!
//! Each method is an [`IterationStep`]: given the current iterate and its
//! residual `ℬ − 𝒜∗𝒳_k` it returns the increment `𝒳_{k+1} − 𝒳_k`. The
//! driver [`solve`] records `δ_k = ‖ℬ − 𝒜∗𝒳_k‖_F / ‖ℬ‖_F` and stops on the
//! tolerance, the iteration cap, or the divergence guard.
//!
//! Tubular methods scale by tubes (one step per Fourier slice); global
//! methods scale by a single number.

use std::time::Instant;

use log::debug;
use nalgebra::DMatrix;

use crate::error::{shape_error, Error, Result};
use crate::fourier::FourierSlices;
use crate::spectra::{hermitian_eigenvalues, spectral_radius_components, tubular_spectral_radius};
use crate::tensor::{Tensor3, C64};
use crate::tubal::Tubular;

#[derive(Clone, Debug)]
pub struct IterOptions {
    pub max_iterations: usize,
    /// Stop once `δ_k ≤ rel_residual_tol`.
    pub rel_residual_tol: f64,
    /// Known solution for relative-error tracking.
    pub track_error_against: Option<Tensor3>,
    pub rng_seed: u64,
    /// Abort once `δ_k > divergence_guard · δ_0`.
    pub divergence_guard: f64,
}

impl Default for IterOptions {
    fn default() -> Self {
        IterOptions {
            max_iterations: 10_000,
            rel_residual_tol: 1e-8,
            track_error_against: None,
            rng_seed: 0,
            divergence_guard: 1e6,
        }
    }
}

impl IterOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
        }
        if !(self.rel_residual_tol > 0.0) {
            return Err(Error::InvalidArgument("rel_residual_tol must be positive".into()));
        }
        if !(self.divergence_guard > 0.0) {
            return Err(Error::InvalidArgument("divergence_guard must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Tolerance,
    MaxIterations,
    Diverged,
    Breakdown,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::Tolerance => "tol",
            StopReason::MaxIterations => "maxit",
            StopReason::Diverged => "diverged",
            StopReason::Breakdown => "breakdown",
        }
    }
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-iteration record of a solve; index 0 is the initial guess.
#[derive(Clone, Debug)]
pub struct ConvergenceHistory {
    pub delta: Vec<f64>,
    pub rel_error: Option<Vec<f64>>,
    /// Elapsed wall time since the start of the solve.
    pub seconds: Vec<f64>,
    pub stop_reason: StopReason,
}

impl ConvergenceHistory {
    /// Number of iterations performed.
    pub fn iterations(&self) -> usize {
        self.delta.len() - 1
    }

    pub fn final_delta(&self) -> f64 {
        *self.delta.last().expect("history holds the initial residual")
    }

    pub fn final_rel_error(&self) -> Option<f64> {
        self.rel_error.as_ref().and_then(|e| e.last().copied())
    }

    pub fn total_seconds(&self) -> f64 {
        self.seconds.last().copied().unwrap_or(0.0)
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub history: ConvergenceHistory,
    pub x: Tensor3,
}

/// What a step produced.
#[derive(Clone, Debug)]
pub enum Step {
    Update(Tensor3),
    /// A scalar denominator vanished.
    Breakdown(String),
    /// A tubular denominator has a (numerically) zero Fourier component.
    Singular { component: usize, magnitude: f64 },
}

/// One iteration of a stationary or descent method.
pub trait IterationStep {
    fn name(&self) -> String;

    /// Increment for iterate `x` with residual `r = ℬ − 𝒜∗x`.
    fn increment(&mut self, a: &Tensor3, x: &Tensor3, r: &Tensor3) -> Result<Step>;
}

fn keep_real(t: Tubular, real: bool) -> Tubular {
    if real {
        t.into_real()
    } else {
        t
    }
}

/// Tubular Richardson: `𝒳_{k+1} = 𝒳_k + 𝒜ᴴ∗(ℬ − 𝒜∗𝒳_k)∗[α]`.
#[derive(Clone, Debug)]
pub struct TubularRichardson {
    pub alpha: Tubular,
}

impl TubularRichardson {
    pub fn new(alpha: Tubular) -> Result<Self> {
        if !alpha.is_hermitian() {
            return Err(Error::NotHermitian {
                what: "step tube [α]",
                residual: alpha
                    .fourier_components()
                    .iter()
                    .fold(0.0f64, |m, d| m.max(d.im.abs())),
            });
        }
        Ok(TubularRichardson { alpha })
    }
}

impl IterationStep for TubularRichardson {
    fn name(&self) -> String {
        "TR".into()
    }

    fn increment(&mut self, a: &Tensor3, _x: &Tensor3, r: &Tensor3) -> Result<Step> {
        Ok(Step::Update(a.adjoint_tprod(r)?.mul_tube(&self.alpha)?))
    }
}

/// Global Richardson: `𝒳_{k+1} = 𝒳_k + μ·𝒜ᴴ∗(ℬ − 𝒜∗𝒳_k)`.
#[derive(Clone, Debug)]
pub struct GlobalRichardson {
    pub mu: f64,
}

impl GlobalRichardson {
    pub fn new(mu: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::InvalidArgument(format!("step μ must be positive, got {mu}")));
        }
        Ok(GlobalRichardson { mu })
    }
}

impl IterationStep for GlobalRichardson {
    fn name(&self) -> String {
        "Richardson".into()
    }

    fn increment(&mut self, a: &Tensor3, _x: &Tensor3, r: &Tensor3) -> Result<Step> {
        Ok(Step::Update(a.adjoint_tprod(r)?.scale_real(self.mu)))
    }
}

/// Tubular steepest descent: `𝒳_{k+1} = 𝒳_k + 𝒟_k∗‖𝒟_k‖²∗(‖𝒜∗𝒟_k‖²)⁻¹`
/// with `𝒟_k = 𝒜ᴴ∗(ℬ − 𝒜∗𝒳_k)`.
///
/// Fourier components where `𝒟_k` is already negligible (at most `p·ε`
/// times its largest component) take a zero step. Any other component of
/// `‖𝒜∗𝒟_k‖²` at or below `p·ε` times its largest component is reported as
/// a singular step.
#[derive(Clone, Debug, Default)]
pub struct TubularSteepestDescent;

impl IterationStep for TubularSteepestDescent {
    fn name(&self) -> String {
        "TSD".into()
    }

    fn increment(&mut self, a: &Tensor3, _x: &Tensor3, r: &Tensor3) -> Result<Step> {
        let d = a.adjoint_tprod(r)?;
        let ad = a.tprod(&d)?;
        let (fd, fad) = (d.fourier(), ad.fourier());
        let p = d.p();
        let num: Vec<f64> = fd.slices().iter().map(|s| s.norm_squared()).collect();
        let den: Vec<f64> = fad.slices().iter().map(|s| s.norm_squared()).collect();
        let tol = p as f64 * f64::EPSILON;
        let num_max = num.iter().fold(0.0f64, |m, &v| m.max(v));
        let den_max = den.iter().fold(0.0f64, |m, &v| m.max(v));
        let mut comps = Vec::with_capacity(p);
        for k in 0..p {
            if num[k].sqrt() <= tol * num_max.sqrt() {
                comps.push(C64::default());
            } else if den[k] <= tol * den_max || den[k] == 0.0 {
                return Ok(Step::Singular {
                    component: k,
                    magnitude: den[k],
                });
            } else {
                comps.push(C64::new(num[k] / den[k], 0.0));
            }
        }
        let step = keep_real(Tubular::from_fourier_components(comps), d.is_real());
        Ok(Step::Update(d.mul_tube(&step)?))
    }
}

/// Global steepest descent: `𝒳_{k+1} = 𝒳_k + (‖𝒟_k‖_F² / ‖𝒜∗𝒟_k‖_F²)·𝒟_k`.
#[derive(Clone, Debug, Default)]
pub struct GlobalSteepestDescent;

impl IterationStep for GlobalSteepestDescent {
    fn name(&self) -> String {
        "SD".into()
    }

    fn increment(&mut self, a: &Tensor3, _x: &Tensor3, r: &Tensor3) -> Result<Step> {
        let d = a.adjoint_tprod(r)?;
        let ad = a.tprod(&d)?;
        let den = ad.frob_norm().powi(2);
        if den == 0.0 || !den.is_finite() {
            return Ok(Step::Breakdown(format!("‖𝒜∗𝒟_k‖_F² = {den:e}")));
        }
        Ok(Step::Update(d.scale_real(d.frob_norm().powi(2) / den)))
    }
}

struct Recorder<'a> {
    b_norm: f64,
    x_star: Option<(&'a Tensor3, f64)>,
    start: Instant,
    delta: Vec<f64>,
    rel_error: Vec<f64>,
    seconds: Vec<f64>,
    opts: &'a IterOptions,
}

impl<'a> Recorder<'a> {
    fn new(b: &Tensor3, opts: &'a IterOptions) -> Self {
        let b_norm = b.frob_norm();
        Recorder {
            b_norm: if b_norm == 0.0 { 1.0 } else { b_norm },
            x_star: opts.track_error_against.as_ref().map(|x| {
                let n = x.frob_norm();
                (x, if n == 0.0 { 1.0 } else { n })
            }),
            start: Instant::now(),
            delta: Vec::new(),
            rel_error: Vec::new(),
            seconds: Vec::new(),
            opts,
        }
    }

    /// Records an iterate; returns the stop reason if the solve should end.
    fn record(&mut self, x: &Tensor3, r: &Tensor3) -> Option<StopReason> {
        let delta = r.frob_norm() / self.b_norm;
        self.delta.push(delta);
        if let Some((xs, norm)) = self.x_star {
            self.rel_error.push((x - xs).frob_norm() / norm);
        }
        self.seconds.push(self.start.elapsed().as_secs_f64());
        let k = self.delta.len() - 1;
        if delta <= self.opts.rel_residual_tol {
            Some(StopReason::Tolerance)
        } else if !delta.is_finite() || (k > 0 && delta > self.opts.divergence_guard * self.delta[0]) {
            Some(StopReason::Diverged)
        } else if k >= self.opts.max_iterations {
            Some(StopReason::MaxIterations)
        } else {
            None
        }
    }

    fn finish(self, x: Tensor3, stop_reason: StopReason) -> SolveOutcome {
        SolveOutcome {
            history: ConvergenceHistory {
                delta: self.delta,
                rel_error: self.x_star.map(|_| self.rel_error),
                seconds: self.seconds,
                stop_reason,
            },
            x,
        }
    }
}

fn check_system(a: &Tensor3, b: &Tensor3, x0: &Tensor3) -> Result<()> {
    let (n, m, p) = a.shape();
    if n != m {
        return Err(shape_error("solve", format!("𝒜 must be square, got {:?}", a.shape())));
    }
    if b.shape() != (n, 1, p) || x0.shape() != (n, 1, p) {
        return Err(shape_error(
            "solve",
            format!("ℬ and 𝒳_0 must be {n}x1x{p}, got {:?} and {:?}", b.shape(), x0.shape()),
        ));
    }
    Ok(())
}

fn residual(a: &Tensor3, b: &Tensor3, x: &Tensor3) -> Result<Tensor3> {
    b.try_sub(&a.tprod(x)?)
}

fn singular_step(rec: Recorder<'_>, x: Tensor3, component: usize, magnitude: f64) -> Error {
    let iteration = rec.delta.len() - 1;
    Error::SingularStep {
        iteration,
        component,
        magnitude,
        partial: Box::new(rec.finish(x, StopReason::Breakdown)),
    }
}

/// Runs `step` from `x0` until a stop condition holds.
///
/// A [`Step::Singular`] aborts with [`Error::SingularStep`] carrying the
/// history so far; a [`Step::Breakdown`] ends the solve normally with
/// [`StopReason::Breakdown`].
pub fn solve(
    step: &mut dyn IterationStep,
    a: &Tensor3,
    b: &Tensor3,
    x0: &Tensor3,
    opts: &IterOptions,
) -> Result<SolveOutcome> {
    opts.validate()?;
    check_system(a, b, x0)?;
    let mut rec = Recorder::new(b, opts);
    let mut x = x0.clone();
    let mut r = residual(a, b, &x)?;
    if let Some(stop) = rec.record(&x, &r) {
        return Ok(rec.finish(x, stop));
    }
    loop {
        match step.increment(a, &x, &r)? {
            Step::Update(dx) => x = x.try_add(&dx)?,
            Step::Breakdown(msg) => {
                debug!("{}: breakdown after {} iterations: {msg}", step.name(), rec.delta.len() - 1);
                return Ok(rec.finish(x, StopReason::Breakdown));
            }
            Step::Singular { component, magnitude } => {
                return Err(singular_step(rec, x, component, magnitude));
            }
        }
        r = residual(a, b, &x)?;
        if let Some(stop) = rec.record(&x, &r) {
            return Ok(rec.finish(x, stop));
        }
    }
}

pub fn richardson_tubular(
    a: &Tensor3,
    b: &Tensor3,
    alpha: &Tubular,
    x0: &Tensor3,
    opts: &IterOptions,
) -> Result<SolveOutcome> {
    if alpha.p() != a.p() {
        return Err(shape_error("richardson_tubular", "step tube length differs from p"));
    }
    solve(&mut TubularRichardson::new(alpha.clone())?, a, b, x0, opts)
}

pub fn richardson_global(a: &Tensor3, b: &Tensor3, mu: f64, x0: &Tensor3, opts: &IterOptions) -> Result<SolveOutcome> {
    solve(&mut GlobalRichardson::new(mu)?, a, b, x0, opts)
}

pub fn sd_tubular(a: &Tensor3, b: &Tensor3, x0: &Tensor3, opts: &IterOptions) -> Result<SolveOutcome> {
    solve(&mut TubularSteepestDescent, a, b, x0, opts)
}

pub fn sd_global(a: &Tensor3, b: &Tensor3, x0: &Tensor3, opts: &IterOptions) -> Result<SolveOutcome> {
    solve(&mut GlobalSteepestDescent, a, b, x0, opts)
}

/// Which earlier iterate the relaxation step extrapolates from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RelaxDirection {
    /// `𝒳_{k+1} = 𝒳_{k−1} + ω_k(𝒳̄_{k+1} − 𝒳_{k−1})`, for which `ω_k`
    /// minimizes `‖ℬ − 𝒜∗𝒳_{k+1}‖_F`.
    #[default]
    FromRelaxed,
    /// `𝒳_{k+1} = 𝒳_{k−1} + ω_k(𝒳̄_{k+1} − 𝒳̄_{k−1})`.
    FromUnrelaxed,
}

/// Minimum-residual relaxation around an inner method.
///
/// The first two steps are plain. Afterwards each step computes
/// `𝒳̄_{k+1} = 𝒳_k + F(𝒳_k)` and combines it with the iterate two steps back
/// using `ω_k = ⟨ℛ_{k−1} − ℛ̄_{k+1}, ℛ_{k−1}⟩_F / ‖ℛ_{k−1} − ℛ̄_{k+1}‖_F²`
/// (residuals of the original equation). A zero denominator falls back to the
/// plain iterate for that step. The recorded history is that of the relaxed
/// sequence.
pub fn relax_wrap(
    step: &mut dyn IterationStep,
    a: &Tensor3,
    b: &Tensor3,
    x0: &Tensor3,
    opts: &IterOptions,
    direction: RelaxDirection,
) -> Result<SolveOutcome> {
    opts.validate()?;
    check_system(a, b, x0)?;
    let mut rec = Recorder::new(b, opts);
    // Relaxed iterates 𝒳_{k−1}, 𝒳_k and plain iterates 𝒳̄_{k−1}, 𝒳̄_k.
    let mut x = x0.clone();
    let mut r = residual(a, b, &x)?;
    let mut x_prev = x.clone();
    let mut r_prev = r.clone();
    let mut xbar_prev = x.clone();
    let mut xbar_cur = x.clone();
    if let Some(stop) = rec.record(&x, &r) {
        return Ok(rec.finish(x, stop));
    }
    let mut k = 0usize;
    loop {
        let dx = match step.increment(a, &x, &r)? {
            Step::Update(dx) => dx,
            Step::Breakdown(msg) => {
                debug!("{}: breakdown: {msg}", step.name());
                return Ok(rec.finish(x, StopReason::Breakdown));
            }
            Step::Singular { component, magnitude } => {
                return Err(singular_step(rec, x, component, magnitude));
            }
        };
        let xbar = x.try_add(&dx)?;
        let rbar = residual(a, b, &xbar)?;
        let (x_next, r_next) = if k < 2 {
            (xbar.clone(), rbar)
        } else {
            let diff = r_prev.try_sub(&rbar)?;
            let den = diff.frob_norm().powi(2);
            if den == 0.0 || !den.is_finite() {
                debug!("relaxation denominator vanished at iteration {}; plain step", k + 1);
                (xbar.clone(), rbar)
            } else {
                let mut omega = diff.frob_inner(&r_prev)? / den;
                if x.is_real() && xbar.is_real() {
                    omega.im = 0.0;
                }
                let base = match direction {
                    RelaxDirection::FromRelaxed => &x_prev,
                    RelaxDirection::FromUnrelaxed => &xbar_prev,
                };
                let xn = x_prev.axpy(omega, &xbar.try_sub(base)?)?;
                let rn = residual(a, b, &xn)?;
                (xn, rn)
            }
        };
        xbar_prev = std::mem::replace(&mut xbar_cur, xbar);
        x_prev = std::mem::replace(&mut x, x_next);
        r_prev = std::mem::replace(&mut r, r_next);
        k += 1;
        if let Some(stop) = rec.record(&x, &r) {
            return Ok(rec.finish(x, stop));
        }
    }
}

/// Extreme eigenvalues of every Fourier slice of `𝒜ᴴ∗𝒜`, i.e. of `Ã_kᴴÃ_k`.
#[derive(Clone, Debug)]
pub struct NormalSpectrum {
    pub lambda_min: Vec<f64>,
    pub lambda_max: Vec<f64>,
    real: bool,
}

impl NormalSpectrum {
    pub fn compute(a: &Tensor3) -> Result<Self> {
        if a.n() != a.m() {
            return Err(shape_error("normal_spectrum", "𝒜 must be square"));
        }
        let fa = a.fourier();
        let p = a.p();
        let count = if a.is_real() { p / 2 + 1 } else { p };
        let mut lambda_min = Vec::with_capacity(p);
        let mut lambda_max = Vec::with_capacity(p);
        for k in 0..count {
            let s = fa.slice(k);
            let v = hermitian_eigenvalues(&s.ad_mul(s));
            lambda_min.push(v[0].max(0.0));
            lambda_max.push(v[v.len() - 1]);
        }
        for k in count..p {
            lambda_min.push(lambda_min[p - k]);
            lambda_max.push(lambda_max[p - k]);
        }
        Ok(NormalSpectrum {
            lambda_min,
            lambda_max,
            real: a.is_real(),
        })
    }

    fn tube(&self, comps: &[f64]) -> Tubular {
        keep_real(Tubular::from_real_components(comps), self.real)
    }

    /// `[λ_m(𝒜ᴴ∗𝒜)]`.
    pub fn lambda_m(&self) -> Tubular {
        self.tube(&self.lambda_min)
    }

    /// `[λ_M(𝒜ᴴ∗𝒜)]`.
    pub fn lambda_big_m(&self) -> Tubular {
        self.tube(&self.lambda_max)
    }

    /// `λ̄_m`: smallest eigenvalue over all slices.
    pub fn scalar_min(&self) -> f64 {
        self.lambda_min.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `λ̄_M`: largest eigenvalue over all slices.
    pub fn scalar_max(&self) -> f64 {
        self.lambda_max.iter().copied().fold(0.0, f64::max)
    }

    /// `[α*] = 2([λ_M] + [λ_m])⁻¹`.
    pub fn alpha_star(&self) -> Result<Tubular> {
        let sum = &self.lambda_big_m() + &self.lambda_m();
        Ok(keep_real(sum.inverse()?.scale(C64::new(2.0, 0.0)), self.real))
    }

    /// `[α_1] = [λ_M]⁻¹`.
    pub fn alpha_one(&self) -> Result<Tubular> {
        Ok(keep_real(self.lambda_big_m().inverse()?, self.real))
    }

    /// `μ* = 2 / (λ̄_M + λ̄_m)`.
    pub fn mu_star(&self) -> Result<f64> {
        let s = self.scalar_max() + self.scalar_min();
        if !(s > 0.0) {
            return Err(Error::Singular { components: vec![(0, s)] });
        }
        Ok(2.0 / s)
    }

    /// `μ_1 = 1 / λ̄_M`.
    pub fn mu_one(&self) -> Result<f64> {
        let m = self.scalar_max();
        if !(m > 0.0) {
            return Err(Error::Singular { components: vec![(0, m)] });
        }
        Ok(1.0 / m)
    }

    /// `[k] = [λ_M] ∗ [λ_m]⁻¹`.
    pub fn kappa(&self) -> Result<Tubular> {
        Ok(keep_real(&self.lambda_big_m() * &self.lambda_m().inverse()?, self.real))
    }

    /// `[w] = ([k] − [e_1])² ∗ ([k] + [e_1])⁻²`.
    pub fn sd_contraction(&self) -> Result<Tubular> {
        let k = self.kappa()?;
        let e = Tubular::e1(k.p());
        let minus = &k - &e;
        let plus = (&k + &e).inverse()?;
        let w = &(&minus * &minus) * &(&plus * &plus);
        Ok(keep_real(w, self.real))
    }

    /// Fourier components of `ρ_T(𝒢_[α])` for a Hermitian step tube:
    /// `max(|1 − α_k λ_min|, |1 − α_k λ_max|)`.
    pub fn iteration_radius(&self, alpha: &Tubular) -> Vec<f64> {
        alpha
            .fourier_components()
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let lo = (C64::new(1.0, 0.0) - a * self.lambda_min[k]).norm();
                let hi = (C64::new(1.0, 0.0) - a * self.lambda_max[k]).norm();
                lo.max(hi)
            })
            .collect()
    }
}

pub fn normal_spectrum(a: &Tensor3) -> Result<NormalSpectrum> {
    NormalSpectrum::compute(a)
}

pub fn alpha_star(a: &Tensor3) -> Result<Tubular> {
    NormalSpectrum::compute(a)?.alpha_star()
}

pub fn alpha_one(a: &Tensor3) -> Result<Tubular> {
    NormalSpectrum::compute(a)?.alpha_one()
}

pub fn mu_star(a: &Tensor3) -> Result<f64> {
    NormalSpectrum::compute(a)?.mu_star()
}

pub fn mu_one(a: &Tensor3) -> Result<f64> {
    NormalSpectrum::compute(a)?.mu_one()
}

/// `𝒢_[α] = ℐ − 𝒟_[α] ∗ 𝒜ᴴ ∗ 𝒜`.
pub fn iteration_tensor(a: &Tensor3, alpha: &Tubular) -> Result<Tensor3> {
    let ata = a.adjoint_tprod(a)?;
    let scaled = alpha.dtensor(a.n()).tprod(&ata)?;
    Tensor3::identity(a.n(), a.p()).try_sub(&scaled)
}

/// Fourier components of `ρ_T(𝒢_[α])` computed from the iteration tensor.
pub fn iteration_spectral_radius(a: &Tensor3, alpha: &Tubular) -> Result<Tubular> {
    tubular_spectral_radius(&iteration_tensor(a, alpha)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectionMode {
    /// Tube coefficients: one Galerkin system per Fourier slice.
    Tubular,
    /// Scalar coefficients: one Galerkin system overall.
    Global,
}

/// One orthogonal projection step for the normal equation.
///
/// Finds `𝒳_new = 𝒳_old + Σ_j 𝒱_j∗[c_j]` (tubular) or `+ Σ_j c_j 𝒱_j`
/// (global) so that the normal residual `ℛ = 𝒜ᴴ∗(ℬ − 𝒜∗𝒳_new)` satisfies
/// `⟨ℛ, 𝒱_ℓ⟩ = [0]` (tubular) or `⟨ℛ, 𝒱_ℓ⟩_F = 0` (global) for every `ℓ`.
pub fn project_orthogonal(
    a: &Tensor3,
    b: &Tensor3,
    x_old: &Tensor3,
    vs: &[Tensor3],
    mode: ProjectionMode,
) -> Result<Tensor3> {
    check_system(a, b, x_old)?;
    if vs.is_empty() {
        return Err(Error::InvalidArgument("projection needs at least one direction".into()));
    }
    if vs.iter().any(|v| v.shape() != x_old.shape()) {
        return Err(shape_error("project_orthogonal", "directions must match 𝒳's shape"));
    }
    let m = vs.len();
    let r = a.adjoint_tprod(&residual(a, b, x_old)?)?;
    let avs: Vec<Tensor3> = vs.iter().map(|v| a.tprod(v)).collect::<Result<_>>()?;
    match mode {
        ProjectionMode::Global => {
            let mut g = DMatrix::<C64>::zeros(m, m);
            let mut rhs = DMatrix::<C64>::zeros(m, 1);
            for l in 0..m {
                for j in 0..m {
                    g[(l, j)] = avs[l].frob_inner(&avs[j])?;
                }
                rhs[(l, 0)] = vs[l].frob_inner(&r)?;
            }
            let c = solve_small(g, rhs).ok_or(Error::SingularGalerkin { slice: None })?;
            let mut x = x_old.clone();
            let real = x_old.is_real() && vs.iter().all(Tensor3::is_real) && a.is_real() && b.is_real();
            for (j, v) in vs.iter().enumerate() {
                let mut cj = c[(j, 0)];
                if real {
                    cj.im = 0.0;
                }
                x = x.axpy(cj, v)?;
            }
            Ok(x)
        }
        ProjectionMode::Tubular => {
            let p = a.p();
            let fr = r.fourier();
            let fv: Vec<&FourierSlices> = vs.iter().map(|v| v.fourier()).collect();
            let fav: Vec<&FourierSlices> = avs.iter().map(|v| v.fourier()).collect();
            let mut coeffs = vec![vec![C64::default(); p]; m];
            for s in 0..p {
                let mut g = DMatrix::<C64>::zeros(m, m);
                let mut rhs = DMatrix::<C64>::zeros(m, 1);
                for l in 0..m {
                    for j in 0..m {
                        g[(l, j)] = fav[l].slice(s).column(0).dotc(&fav[j].slice(s).column(0));
                    }
                    rhs[(l, 0)] = fv[l].slice(s).column(0).dotc(&fr.slice(s).column(0));
                }
                let c = solve_small(g, rhs).ok_or(Error::SingularGalerkin { slice: Some(s) })?;
                for j in 0..m {
                    coeffs[j][s] = c[(j, 0)];
                }
            }
            let real = x_old.is_real() && vs.iter().all(Tensor3::is_real) && a.is_real() && b.is_real();
            let mut x = x_old.clone();
            for (j, v) in vs.iter().enumerate() {
                let t = keep_real(Tubular::from_fourier_components(coeffs[j].clone()), real);
                x = x.try_add(&v.mul_tube(&t)?)?;
            }
            Ok(x)
        }
    }
}

/// Solves a small Galerkin system, refusing numerically singular matrices.
fn solve_small(g: DMatrix<C64>, rhs: DMatrix<C64>) -> Option<DMatrix<C64>> {
    let scale = g.norm();
    if scale == 0.0 || !scale.is_finite() {
        return None;
    }
    let sv = g.singular_values();
    if sv.min() <= g.nrows() as f64 * f64::EPSILON * sv.max() {
        return None;
    }
    g.lu().solve(&rhs)
}

/// Partial Neumann sum `Σ_{k=0}^{terms} 𝒜ᵏ`, which tends to `(ℐ − 𝒜)⁻¹`.
/// Requires `ρ_T(𝒜) ≺ [e_1]`.
pub fn neumann_inverse(a: &Tensor3, terms: usize) -> Result<Tensor3> {
    if a.n() != a.m() {
        return Err(shape_error("neumann_inverse", "𝒜 must be square"));
    }
    let rho = spectral_radius_components(a)?;
    if let Some((component, &value)) = rho.iter().enumerate().find(|(_, &v)| v >= 1.0) {
        return Err(Error::SpectralRadiusNotLessThanOne { component, value });
    }
    let fa = a.fourier();
    let n = a.n();
    let slices = fa
        .slices()
        .iter()
        .map(|s| {
            // Horner: S = I + A(I + A(… ))
            let id = DMatrix::<C64>::identity(n, n);
            let mut acc = id.clone();
            for _ in 0..terms {
                acc = &id + s * acc;
            }
            acc
        })
        .collect();
    let out = FourierSlices::from_slices_unchecked(n, n, slices).to_tensor();
    Ok(if a.is_real() { out.into_real(1e-8)? } else { out })
}

/// Tubular energy `⟨𝒜∗ℰ, 𝒜∗ℰ⟩` of an error tensor `ℰ`, as Fourier components.
pub fn energy_components(a: &Tensor3, e: &Tensor3) -> Result<Vec<f64>> {
    let ae = a.tprod(e)?;
    Ok(ae.fourier().slices().iter().map(|s| s.norm_squared()).collect())
}

/// Scalar energy `‖𝒜∗ℰ‖_F²`.
pub fn energy_scalar(a: &Tensor3, e: &Tensor3) -> Result<f64> {
    Ok(a.tprod(e)?.frob_norm().powi(2))
}
