//! Acceptance criteria, one printed PASS/FAIL line each.
//!
//! Runs without the libtest harness so every line is printed in order.
//! Quantities are checked against oracles built here from dense
//! block-circulant and DFT matrices. The process exits non-zero if any
//! criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::{DMatrix, Schur, SymmetricEigen};
use num_complex::Complex64 as C64;
use tubal::experiment::{median, parse_methods, run_method, MethodRun, StepParameters};
use tubal::problems::{
    baart_prolate_problem, baart_prolate_tensor, blur_problem, make_rhs, ones_solution, random_solution, Family,
    ProblemDescriptor, ProblemInstance, SolutionKind,
};
use tubal::random::{self, TensorRng};
use tubal::solvers::{
    neumann_inverse, project_orthogonal, relax_wrap, richardson_tubular, solve, GlobalSteepestDescent,
    IterOptions, IterationStep, ProjectionMode, RelaxDirection, Step, StopReason, TubularSteepestDescent,
};
use tubal::spectra::{
    aligned_eigenpairs, hermitian_decomposition, kantorovich_slack, product_bound_slacks, rayleigh_slack,
    weyl_slack,
};
use tubal::{Tensor3, Tubular};

// ---------------------------------------------------------------------------
// Oracles

fn bcirc(a: &Tensor3) -> DMatrix<C64> {
    let (n, m, p) = a.shape();
    DMatrix::from_fn(n * p, m * p, |r, c| {
        let (bi, i) = (r / n, r % n);
        let (bj, j) = (c / m, c % m);
        a.get(i, j, (bi + p - bj) % p)
    })
}

fn unfold(a: &Tensor3) -> DMatrix<C64> {
    let (n, m, p) = a.shape();
    DMatrix::from_fn(n * p, m, |r, j| a.get(r % n, j, r / n))
}

fn fold(mat: &DMatrix<C64>, p: usize) -> Tensor3 {
    let n = mat.nrows() / p;
    Tensor3::from_fn(n, mat.ncols(), p, |i, j, k| mat[(k * n + i, j)])
}

fn tprod(a: &Tensor3, b: &Tensor3) -> Tensor3 {
    fold(&(bcirc(a) * unfold(b)), a.p())
}

fn adjoint(a: &Tensor3) -> Tensor3 {
    let (n, m, p) = a.shape();
    Tensor3::from_fn(m, n, p, |i, j, k| a.get(j, i, (p - k) % p).conj())
}

fn circ(v: &[C64]) -> DMatrix<C64> {
    let p = v.len();
    DMatrix::from_fn(p, p, |i, j| v[(i + p - j) % p])
}

fn dft(p: usize) -> DMatrix<C64> {
    let s = 1.0 / (p as f64).sqrt();
    DMatrix::from_fn(p, p, |j, k| C64::from_polar(s, 2.0 * PI * (j * k) as f64 / p as f64))
}

/// `Ã_k = Σ_s A_s e^{2πi sk/p}`.
fn fourier_slices(a: &Tensor3) -> Vec<DMatrix<C64>> {
    let (n, m, p) = a.shape();
    (0..p)
        .map(|k| {
            DMatrix::from_fn(n, m, |i, j| {
                (0..p)
                    .map(|s| a.get(i, j, s) * C64::from_polar(1.0, 2.0 * PI * (s * k) as f64 / p as f64))
                    .sum()
            })
        })
        .collect()
}

fn tube_components(v: &[C64]) -> Vec<C64> {
    let p = v.len();
    (0..p)
        .map(|k| (0..p).map(|s| v[s] * C64::from_polar(1.0, 2.0 * PI * (s * k) as f64 / p as f64)).sum())
        .collect()
}

fn dense_eigenvalues(m: DMatrix<C64>) -> Vec<C64> {
    let (_, t) = Schur::new(m).unpack();
    t.diagonal().iter().copied().collect()
}

fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let h = (m + m.adjoint()).scale(0.5);
    let mut v: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut pool = b.to_vec();
    let mut worst = 0.0f64;
    for x in a {
        let (i, d) = pool
            .iter()
            .enumerate()
            .map(|(i, y)| (i, (x - y).norm()))
            .min_by(|u, v| u.1.total_cmp(&v.1))
            .unwrap();
        worst = worst.max(d);
        pool.swap_remove(i);
    }
    worst
}

fn rel_diff(x: &Tensor3, y: &Tensor3) -> f64 {
    let d: f64 = x.as_slice().iter().zip(y.as_slice()).map(|(a, b)| (a - b).norm_sqr()).sum();
    let s: f64 = y.as_slice().iter().map(C64::norm_sqr).sum();
    (d / s.max(f64::MIN_POSITIVE)).sqrt()
}

/// Per-slice extreme eigenvalues of `Ã_kᴴÃ_k`.
fn normal_extremes(a: &Tensor3) -> Vec<(f64, f64)> {
    fourier_slices(a)
        .iter()
        .map(|s| {
            let v = hermitian_eigenvalues(&s.ad_mul(s));
            (v[0].max(0.0), v[v.len() - 1])
        })
        .collect()
}

/// Largest modulus over all eigenvalues of `bcirc(𝒜)`.
fn t_spectral_radius(a: &Tensor3) -> f64 {
    dense_eigenvalues(bcirc(a)).iter().fold(0.0, |m, z| m.max(z.norm()))
}

fn random_system(rng: &mut TensorRng, n: usize, p: usize, shift: f64) -> (Tensor3, Tensor3, Tensor3) {
    let a = &random::real_normal(rng, n, n, p) + &Tensor3::identity(n, p).scale_real(shift);
    let x_star = random::real_normal(rng, n, 1, p);
    let b = tprod(&a, &x_star);
    (a, x_star, b)
}

fn weighted_error(a: &Tensor3, x: &Tensor3, x_star: &Tensor3) -> f64 {
    tprod(a, &(x - x_star)).frob_norm()
}

fn step_from(step: &mut dyn IterationStep, a: &Tensor3, b: &Tensor3, x: &Tensor3) -> Option<Tensor3> {
    let r = b - &tprod(a, x);
    match step.increment(a, x, &r).unwrap() {
        Step::Update(dx) => Some(x + &dx),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Reporting

struct Outcome {
    passed: bool,
    summary: String,
}

fn outcome(passed: bool, summary: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        summary: summary.into(),
    }
}

fn run(id: usize, title: &str, f: impl FnOnce() -> Outcome, failures: &mut Vec<usize>) {
    let start = Instant::now();
    let o = f();
    let secs = start.elapsed().as_secs_f64();
    let tag = if o.passed { "PASS" } else { "FAIL" };
    println!("criterion {id:>2} {tag}  {title}: {} ({secs:.1} s)", o.summary);
    if !o.passed {
        failures.push(id);
    }
}

// ---------------------------------------------------------------------------
// Criteria

fn c1_tprod_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = random::rng(101);
    let mut worst = 0.0f64;
    for t in 0..200 {
        let (n, m, l, p) = (
            random::index(&mut rng, 1, 8),
            random::index(&mut rng, 1, 8),
            random::index(&mut rng, 1, 8),
            random::index(&mut rng, 1, 8),
        );
        let a = if t % 2 == 0 {
            random::real_normal(&mut rng, n, m, p)
        } else {
            random::complex_normal_tensor(&mut rng, n, m, p)
        };
        let b = random::complex_normal_tensor(&mut rng, m, l, p);
        worst = worst.max(rel_diff(&a.tprod(&b).unwrap(), &tprod(&a, &b)));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst <= 1e-10 && secs < 5.0, format!("worst relative error {worst:.2e} <= 1e-10, {secs:.2} s < 5 s"))
}

fn c2_tubular_eigenvalues() -> Outcome {
    let start = Instant::now();
    let mut rng = random::rng(102);
    let (mut worst_res, mut worst_match) = (0.0f64, 0.0f64);
    let f = dft(4);
    for _ in 0..50 {
        let a = random::real_normal(&mut rng, 4, 4, 4);
        let oracle = dense_eigenvalues(bcirc(&a));
        let mut diag = Vec::new();
        for pair in aligned_eigenpairs(&a).unwrap() {
            let lhs = tprod(&a, &pair.x);
            let lam = Tensor3::from_fn(1, 1, 4, |_, _, k| pair.lambda.entries()[k]);
            let rhs = tprod(&pair.x, &lam);
            let res = (&lhs - &rhs).frob_norm() / (a.frob_norm() * pair.x.frob_norm());
            worst_res = worst_res.max(res);
            let d = f.adjoint() * circ(pair.lambda.entries()) * &f;
            diag.extend(d.diagonal().iter().copied());
        }
        let scale = oracle.iter().fold(1.0f64, |m, z| m.max(z.norm()));
        worst_match = worst_match.max(multiset_distance(&diag, &oracle) / scale);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst_res <= 1e-8 && worst_match <= 1e-8 && secs < 10.0,
        format!(
            "residual/(|A||X|) {worst_res:.2e} <= 1e-8, spectrum mismatch {worst_match:.2e} <= 1e-8, {secs:.2} s < 10 s"
        ),
    )
}

fn c3_hermitian_decomposition() -> Outcome {
    let mut rng = random::rng(103);
    let (mut recon, mut unit, mut unordered) = (0.0f64, 0.0f64, 0usize);
    for _ in 0..50 {
        let a = random::hermitian(&mut rng, 5, 4);
        let dec = hermitian_decomposition(&a).unwrap();
        let back = tprod(&adjoint(&dec.q), &tprod(&dec.d, &dec.q));
        recon = recon.max(rel_diff(&back, &a));
        let qq = tprod(&adjoint(&dec.q), &dec.q);
        unit = unit.max((&qq - &Tensor3::identity(5, 4)).frob_norm());
        let comps: Vec<Vec<C64>> = (0..5)
            .map(|j| tube_components(dec.d.tube(j, j).entries()))
            .collect();
        for w in comps.windows(2) {
            if w[0].iter().zip(&w[1]).any(|(lo, hi)| lo.re > hi.re + 1e-12) {
                unordered += 1;
            }
        }
    }
    outcome(
        recon <= 1e-10 && unit <= 1e-10 && unordered == 0,
        format!("reconstruction {recon:.2e}, unitarity {unit:.2e} (<= 1e-10), {unordered} unordered tube pairs"),
    )
}

fn c4_tube_calculus() -> Outcome {
    let mut rng = random::rng(104);
    let mut worst = 0.0f64;
    for t in 0..500 {
        let p = random::index(&mut rng, 1, 12);
        let v = random::hpd_tube(&mut rng, p, 0.05, 10.0);
        let v = if t % 2 == 0 { v.into_real() } else { v };
        let s = v.sqrt().unwrap();
        let sq = circ(s.entries()) * DMatrix::from_column_slice(p, 1, s.entries());
        let err: f64 = sq.iter().zip(v.entries()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max(err / v.norm());
    }
    let mut disagreements = 0;
    for _ in 0..500 {
        let p = random::index(&mut rng, 1, 10);
        let shift = random::uniform(&mut rng, -1.0, 2.5);
        let comps: Vec<f64> = (0..p).map(|_| random::normal(&mut rng) + shift).collect();
        let v = Tubular::from_real_components(&comps);
        let oracle = hermitian_eigenvalues(&circ(v.entries()))[0] > 0.0;
        if v.is_hpd() != oracle {
            disagreements += 1;
        }
    }
    outcome(
        worst <= 1e-12 && disagreements == 0,
        format!("sqrt squared back {worst:.2e} <= 1e-12, HPD disagreements {disagreements}/500"),
    )
}

fn c5_inequalities() -> Outcome {
    let mut rng = random::rng(105);
    let dims = |r: &mut TensorRng| (random::index(r, 1, 6), random::index(r, 1, 6));
    let (mut weyl, mut prod, mut ray, mut kant) = (f64::INFINITY, f64::INFINITY, f64::INFINITY, f64::INFINITY);
    for _ in 0..1000 {
        let (n, p) = dims(&mut rng);
        let a = random::hermitian(&mut rng, n, p);
        let b = random::hermitian(&mut rng, n, p);
        weyl = weyl.min(weyl_slack(&a, &b).unwrap());
    }
    for _ in 0..1000 {
        let (n, p) = dims(&mut rng);
        let a = random::hpd(&mut rng, n, p, 0.1).scale_real(-1.0);
        let rank = random::index(&mut rng, 1, n);
        let b = random::hpsd(&mut rng, n, p, rank);
        prod = prod.min(product_bound_slacks(&a, &b).unwrap().worst());
    }
    for _ in 0..1000 {
        let (n, p) = dims(&mut rng);
        let a = random::hermitian(&mut rng, n, p);
        let x = random::complex_normal_tensor(&mut rng, n, 1, p);
        ray = ray.min(rayleigh_slack(&a, &x).unwrap());
    }
    for _ in 0..1000 {
        let (n, p) = dims(&mut rng);
        let a = random::hpd(&mut rng, n, p, 0.2);
        let x = random::complex_normal_tensor(&mut rng, n, 1, p);
        kant = kant.min(kantorovich_slack(&a, &x).unwrap());
    }
    let worst = weyl.min(prod).min(ray).min(kant);
    outcome(
        worst >= -1e-10,
        format!("worst slack Weyl {weyl:.2e}, product {prod:.2e}, Rayleigh {ray:.2e}, Kantorovich {kant:.2e} (>= -1e-10)"),
    )
}

fn c6_sd_dominance() -> Outcome {
    let mut rng = random::rng(106);
    let steps = 30;
    let mut worst_step = f64::INFINITY;
    let mut trajectory_violations = 0usize;
    for _ in 0..50 {
        let (n, p) = (random::index(&mut rng, 2, 16), random::index(&mut rng, 1, 8));
        let (a, x_star, b) = random_system(&mut rng, n, p, 0.0);
        let (mut xt, mut xg) = (Tensor3::zeros(n, 1, p), Tensor3::zeros(n, 1, p));
        for _ in 0..steps {
            let Some(t_next) = step_from(&mut TubularSteepestDescent, &a, &b, &xt) else { break };
            let Some(g_shared) = step_from(&mut GlobalSteepestDescent, &a, &b, &xt) else { break };
            let et = weighted_error(&a, &t_next, &x_star);
            worst_step = worst_step.min(weighted_error(&a, &g_shared, &x_star) - et);
            if let Some(g_next) = step_from(&mut GlobalSteepestDescent, &a, &b, &xg) {
                if et > weighted_error(&a, &g_next, &x_star) + 1e-10 {
                    trajectory_violations += 1;
                }
                xg = g_next;
            }
            xt = t_next;
        }
    }
    let mut worst_proj = f64::INFINITY;
    for _ in 0..50 {
        let (n, p) = (random::index(&mut rng, 3, 16), random::index(&mut rng, 1, 8));
        let m = random::index(&mut rng, 1, 3);
        let (a, x_star, b) = random_system(&mut rng, n, p, 0.0);
        let x_old = random::real_normal(&mut rng, n, 1, p);
        let vs: Vec<Tensor3> = (0..m).map(|_| random::real_normal(&mut rng, n, 1, p)).collect();
        let xt = project_orthogonal(&a, &b, &x_old, &vs, ProjectionMode::Tubular).unwrap();
        let xg = project_orthogonal(&a, &b, &x_old, &vs, ProjectionMode::Global).unwrap();
        worst_proj = worst_proj.min(weighted_error(&a, &xg, &x_star) - weighted_error(&a, &xt, &x_star));
    }
    outcome(
        worst_step >= -1e-10 && worst_proj >= -1e-10,
        format!(
            "per-iteration SD margin {worst_step:.2e}, projection margin {worst_proj:.2e} (>= -1e-10); \
             separate trajectories cross {trajectory_violations} times (informational)"
        ),
    )
}

fn c7_sd_contraction() -> Outcome {
    let mut rng = random::rng(107);
    let mut worst = f64::INFINITY;
    let mut checked = 0usize;
    for _ in 0..20 {
        let (n, p) = (random::index(&mut rng, 2, 8), random::index(&mut rng, 1, 6));
        let (a, x_star, b) = random_system(&mut rng, n, p, 2.0 * (n as f64).sqrt() + 2.0);
        let w: Vec<f64> = normal_extremes(&a)
            .iter()
            .map(|&(lo, hi)| {
                let k = hi / lo;
                ((k - 1.0) / (k + 1.0)).powi(2)
            })
            .collect();
        let energy = |x: &Tensor3| -> Vec<f64> {
            fourier_slices(&tprod(&a, &(x - &x_star))).iter().map(|s| s.norm_squared()).collect()
        };
        let mut x = Tensor3::zeros(n, 1, p);
        let mut e = energy(&x);
        for _ in 0..30 {
            let Some(next) = step_from(&mut TubularSteepestDescent, &a, &b, &x) else { break };
            let e_next = energy(&next);
            for k in 0..p {
                worst = worst.min((w[k] * e[k] - e_next[k]) / e[k].max(f64::MIN_POSITIVE));
                checked += 1;
            }
            if e_next.iter().all(|&v| v < 1e-24) {
                break;
            }
            x = next;
            e = e_next;
        }
    }
    outcome(
        worst >= -1e-8,
        format!("worst relative slack {worst:.2e} >= -1e-8 over {checked} component steps"),
    )
}

fn c8_stationary() -> Outcome {
    let mut rng = random::rng(108);
    let mut worst_rate = f64::NEG_INFINITY;
    for &target in &[0.3, 0.5, 0.9] {
        for _ in 0..3 {
            let (n, p) = (random::index(&mut rng, 2, 5), random::index(&mut rng, 1, 5));
            let g = random::real_normal(&mut rng, n, n, p);
            let a = g.scale_real(target / t_spectral_radius(&g));
            let inv = fold(
                &(DMatrix::<C64>::identity(n * p, n * p) - bcirc(&a))
                    .try_inverse()
                    .unwrap()
                    .columns(0, n)
                    .into_owned(),
                p,
            );
            let k1 = ((1e-11f64).ln() / target.ln()).floor().max(10.0) as usize;
            let k0 = k1 / 2;
            let e0 = rel_diff(&neumann_inverse(&a, k0).unwrap(), &inv);
            let e1 = rel_diff(&neumann_inverse(&a, k1).unwrap(), &inv);
            let rate = (e1 / e0).powf(1.0 / (k1 - k0) as f64);
            worst_rate = worst_rate.max(rate - target);
        }
    }
    let mut wrong = 0usize;
    for _ in 0..10 {
        let (n, p) = (random::index(&mut rng, 2, 5), random::index(&mut rng, 2, 6));
        let (a, _, b) = random_system(&mut rng, n, p, 2.0 * (n as f64).sqrt() + 2.0);
        let ext = normal_extremes(&a);
        let good: Vec<f64> = ext.iter().map(|&(lo, hi)| 2.0 / (lo + hi)).collect();
        let mut bad = good.clone();
        let j = random::index(&mut rng, 0, p / 2);
        bad[j] = 2.2 / ext[j].1;
        bad[(p - j) % p] = bad[j];
        for (comps, expect) in [(good, true), (bad, false)] {
            let radius = comps
                .iter()
                .zip(&ext)
                .map(|(al, &(lo, hi))| (1.0 - al * lo).abs().max((1.0 - al * hi).abs()))
                .fold(0.0f64, f64::max);
            let alpha = Tubular::from_real_components(&comps).into_real();
            let opts = IterOptions {
                max_iterations: 20_000,
                ..IterOptions::default()
            };
            let out = richardson_tubular(&a, &b, &alpha, &Tensor3::zeros(n, 1, p), &opts).unwrap();
            let converged = out.history.stop_reason == StopReason::Tolerance;
            if (radius < 1.0) != expect || converged != expect {
                wrong += 1;
            }
        }
    }
    outcome(
        worst_rate <= 0.02 && wrong == 0,
        format!("Neumann rate minus radius {worst_rate:.3} <= 0.02; Richardson convergence mismatches {wrong}/20"),
    )
}

fn run_named(spec: &str, problem: &ProblemInstance, params: &StepParameters, opts: &IterOptions) -> MethodRun {
    let m = parse_methods(spec).unwrap()[0];
    run_method(&m, problem, params, opts, RelaxDirection::default()).unwrap()
}

/// Iterations `k` with `δ_k(first) > δ_k(second) + tol`.
fn ordering_breaks(first: &MethodRun, second: &MethodRun, tol: f64) -> Vec<usize> {
    first
        .history
        .delta
        .iter()
        .zip(&second.history.delta)
        .enumerate()
        .filter(|(_, (a, b))| **a > **b + tol)
        .map(|(k, _)| k)
        .collect()
}

fn c9_blur() -> Outcome {
    let start = Instant::now();
    let problem = blur_problem(64, 7, 4.0, 1).unwrap();
    let params = StepParameters::new(&problem.a).unwrap();
    let opts = IterOptions {
        max_iterations: 500,
        rel_residual_tol: 1e-8,
        ..IterOptions::default()
    };
    let specs = ["TR:alpha_star", "TR:alpha_one", "Richardson:mu_star", "Richardson:mu_one", "TSD", "SD"];
    let runs: Vec<MethodRun> = specs.iter().map(|s| run_named(s, &problem, &params, &opts)).collect();
    let mut parts = Vec::new();
    let mut all_converged = true;
    for r in &runs {
        let ok = r.history.stop_reason == StopReason::Tolerance;
        all_converged &= ok;
        parts.push(format!("{} {} its delta {:.1e}", r.method, r.history.iterations(), r.history.final_delta()));
    }
    let tr_rich = ordering_breaks(&runs[0], &runs[2], 0.0);
    let tsd_sd = ordering_breaks(&runs[4], &runs[5], 1e-12);
    let secs = start.elapsed().as_secs_f64();
    let describe = |v: &[usize]| match (v.first(), v.last()) {
        (Some(a), Some(b)) => format!("{} violations (k = {a}..{b})", v.len()),
        _ => "0 violations".to_string(),
    };
    outcome(
        all_converged && tr_rich.is_empty() && tsd_sd.is_empty() && secs < 30.0,
        format!(
            "all reach 1e-8 within 500: {}; [{}]; TR(alpha_star) <= Richardson(mu_star): {}; TSD <= SD: {}; {secs:.1} s < 30 s",
            all_converged,
            parts.join(", "),
            describe(&tr_rich),
            describe(&tsd_sd)
        ),
    )
}

fn c10_baart_prolate() -> Outcome {
    let start = Instant::now();
    let n = 256;
    let a = baart_prolate_tensor(n, 0.46).unwrap();
    let params = StepParameters::new(&a).unwrap();
    let opts = IterOptions {
        max_iterations: 1000,
        rel_residual_tol: 5e-3,
        ..IterOptions::default()
    };
    let instance = |seed: u64, solution: SolutionKind| {
        let x_star = match solution {
            SolutionKind::Random => random_solution(n, n, seed),
            SolutionKind::Ones => ones_solution(n, n),
        };
        ProblemInstance {
            b: make_rhs(&a, &x_star).unwrap(),
            a: a.clone(),
            x_star,
            descriptor: ProblemDescriptor {
                family: Family::BaartProlate { w: 0.46 },
                n,
                seed,
                solution,
            },
        }
    };
    let (mut iters, mut errs) = (Vec::new(), Vec::new());
    let mut all_tol = true;
    for seed in 0..10 {
        let r = run_named("TR:alpha_one", &instance(seed, SolutionKind::Random), &params, &opts);
        all_tol &= r.history.stop_reason == StopReason::Tolerance;
        iters.push(r.history.iterations() as f64);
        errs.push(r.history.final_rel_error().unwrap());
    }
    let (mi, me) = (median(&iters).unwrap(), median(&errs).unwrap());
    let ones = run_named("TR:alpha_one", &instance(0, SolutionKind::Ones), &params, &opts);
    let (oi, oe) = (ones.history.iterations(), ones.history.final_rel_error().unwrap());
    let secs = start.elapsed().as_secs_f64();
    let ok = all_tol
        && (8.0..=35.0).contains(&mi)
        && (0.13..=0.52).contains(&me)
        && ones.history.stop_reason == StopReason::Tolerance
        && oi <= 5
        && oe <= 0.05
        && secs < 180.0;
    outcome(
        ok,
        format!(
            "median iterations {mi} in [8, 35], median relative error {me:.4} in [0.13, 0.52]; \
             ones: {oi} iterations <= 5, relative error {oe:.4} <= 0.05; {secs:.0} s < 180 s"
        ),
    )
}

fn c11_relaxation() -> Outcome {
    let problem = baart_prolate_problem(100, 0.46, 0, SolutionKind::Random).unwrap();
    let params = StepParameters::new(&problem.a).unwrap();
    let opts = IterOptions {
        max_iterations: 300,
        ..IterOptions::default()
    };
    let plain = run_named("TR:alpha_one", &problem, &params, &opts);
    let relaxed = run_named("TRR:alpha_one", &problem, &params, &opts);
    let k = plain.history.iterations().min(relaxed.history.iterations());
    let (dp, dr) = (plain.history.delta[k], relaxed.history.delta[k]);
    let tsd = run_named("TSD", &problem, &params, &opts);
    let tsdr = run_named("TSDR", &problem, &params, &opts);
    let sd = run_named("SD", &problem, &params, &opts);
    let x0 = Tensor3::zeros(100, 1, 100);
    let sdr = relax_wrap(&mut GlobalSteepestDescent, &problem.a, &problem.b, &x0, &opts, RelaxDirection::default())
        .unwrap()
        .history;
    let sd_plain = solve(&mut GlobalSteepestDescent, &problem.a, &problem.b, &x0, &opts).unwrap().history;
    let descent = [
        ("TSD", tsd.history.stop_reason, tsd.history.final_delta()),
        ("TSDR", tsdr.history.stop_reason, tsdr.history.final_delta()),
        ("SD", sd.history.stop_reason, sd.history.final_delta()),
        ("SD relaxed", sdr.stop_reason, sdr.final_delta()),
    ];
    let none_converge = descent.iter().all(|(_, s, _)| *s != StopReason::Tolerance)
        && sd_plain.stop_reason != StopReason::Tolerance;
    let listing: Vec<String> = descent.iter().map(|(m, s, d)| format!("{m} {s} at delta {d:.1e}")).collect();
    outcome(
        dr < dp && none_converge,
        format!(
            "k = {k}: relaxed TR(alpha_one) delta {dr:.2e} < plain {dp:.2e}; descent runs not converged: {}",
            listing.join(", ")
        ),
    )
}

fn c12_acknowledgement() -> Outcome {
    outcome(
        true,
        "exact published curves depend on unreported seeds; criteria 9-11 test orderings and bands only",
    )
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut failures = Vec::new();
    run(1, "t-product vs block-circulant oracle", c1_tprod_oracle, &mut failures);
    run(2, "aligned tubular eigenpairs", c2_tubular_eigenvalues, &mut failures);
    run(3, "Hermitian T-decomposition", c3_hermitian_decomposition, &mut failures);
    run(4, "tube square root and HPD test", c4_tube_calculus, &mut failures);
    run(5, "eigenvalue inequalities", c5_inequalities, &mut failures);
    run(6, "tubular vs global SD and projection", c6_sd_dominance, &mut failures);
    run(7, "tubular SD energy contraction", c7_sd_contraction, &mut failures);
    run(8, "Neumann rate and Richardson convergence", c8_stationary, &mut failures);
    run(9, "blur n=64 convergence and ordering", c9_blur, &mut failures);
    run(10, "baart-prolate n=256 TR(alpha_one)", c10_baart_prolate, &mut failures);
    run(11, "relaxation on baart-prolate n=100", c11_relaxation, &mut failures);
    run(12, "non-reproducible published curves", c12_acknowledgement, &mut failures);
    if failures.is_empty() {
        println!("acceptance: all 12 criteria passed");
    } else {
        println!("acceptance: failed criteria {failures:?}");
        std::process::exit(1);
    }
}
