//! Test problems built as `𝒜_{::i} = A_1(i, 1)·A_2`.
//!
//! Two families:
//! - *blur*: `A_1 = A_2` is a Gaussian point-spread matrix built with MATLAB's
//!   `toeplitz([z(1) fliplr(z(2:end))], z)` on a truncated Gaussian row `z`,
//!   scaled by `1/√(2πσ²)`. That call yields the circulant matrix whose first
//!   row is `z`.
//! - *baart–prolate*: `A_1` is the Galerkin discretization of
//!   `∫₀^π e^{s cos t} x(t) dt = 2 sinh(s)/s` (Regularization Tools `baart`)
//!   and `A_2` is the prolate matrix, a symmetric Toeplitz matrix.
//!
//! Right-hand sides are `ℬ = 𝒜 ∗ 𝒳*` for a known solution `𝒳*`.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::random;
use crate::tensor::{Tensor3, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolutionKind {
    /// i.i.d. standard normal, real.
    Random,
    /// All ones.
    Ones,
}

impl SolutionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolutionKind::Random => "random",
            SolutionKind::Ones => "ones",
        }
    }
}

impl std::str::FromStr for SolutionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random" | "randn" => Ok(SolutionKind::Random),
            "ones" => Ok(SolutionKind::Ones),
            other => Err(Error::InvalidArgument(format!("unknown solution kind '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Blur { band: usize, sigma: f64 },
    BaartProlate { w: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Blur { .. } => "blur",
            Family::BaartProlate { .. } => "baart-prolate",
        }
    }

    pub fn blur_default() -> Self {
        Family::Blur { band: 7, sigma: 4.0 }
    }

    pub fn baart_prolate_default() -> Self {
        Family::BaartProlate { w: 0.46 }
    }
}

/// Everything needed to regenerate an instance.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemDescriptor {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
    pub solution: SolutionKind,
}

impl ProblemDescriptor {
    /// `key = value` pairs for file metadata.
    pub fn metadata(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("family".to_string(), self.family.name().to_string()),
            ("n".to_string(), self.n.to_string()),
            ("seed".to_string(), self.seed.to_string()),
            ("solution".to_string(), self.solution.as_str().to_string()),
        ];
        match self.family {
            Family::Blur { band, sigma } => {
                out.push(("band".into(), band.to_string()));
                out.push(("sigma".into(), sigma.to_string()));
            }
            Family::BaartProlate { w } => out.push(("w".into(), w.to_string())),
        }
        out
    }

    pub fn build(&self) -> Result<ProblemInstance> {
        let a = match self.family {
            Family::Blur { band, sigma } => blur_tensor(self.n, band, sigma)?,
            Family::BaartProlate { w } => baart_prolate_tensor(self.n, w)?,
        };
        let x_star = match self.solution {
            SolutionKind::Random => random_solution(self.n, self.n, self.seed),
            SolutionKind::Ones => ones_solution(self.n, self.n),
        };
        let b = make_rhs(&a, &x_star)?;
        Ok(ProblemInstance {
            a,
            x_star,
            b,
            descriptor: self.clone(),
        })
    }
}

impl fmt::Display for ProblemDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params = self
            .metadata()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ");
        f.write_str(&params)
    }
}

#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub a: Tensor3,
    pub x_star: Tensor3,
    pub b: Tensor3,
    pub descriptor: ProblemDescriptor,
}

/// `n × n × n` tensor with slice `i` equal to `a1(i, 0)·a2`.
pub fn outer_slices(a1: &DMatrix<f64>, a2: &DMatrix<f64>) -> Result<Tensor3> {
    let p = a1.nrows();
    let (n, m) = a2.shape();
    if p == 0 || n == 0 || m == 0 {
        return Err(Error::InvalidArgument("empty generator matrix".into()));
    }
    Ok(Tensor3::from_fn(n, m, p, |i, j, k| C64::new(a1[(k, 0)] * a2[(i, j)], 0.0)))
}

/// Gaussian point-spread matrix: `toeplitz([z(1) fliplr(z(2:end))], z)/√(2πσ²)`
/// with `z = [exp(-(0:band-1)²/(2σ²)), zeros(1, n-band)]`. Entry `(i, j)` is
/// `z[(j − i) mod n]`.
pub fn blur_matrix(n: usize, band: usize, sigma: f64) -> Result<DMatrix<f64>> {
    if band == 0 || band > n {
        return Err(Error::InvalidArgument(format!("band must lie in 1..={n}, got {band}")));
    }
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    let scale = 1.0 / (2.0 * PI * sigma * sigma).sqrt();
    let z: Vec<f64> = (0..n)
        .map(|j| {
            if j < band {
                (-((j * j) as f64) / (2.0 * sigma * sigma)).exp()
            } else {
                0.0
            }
        })
        .collect();
    // First column [z(1) fliplr(z(2:end))], first row z.
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let v = if i >= j {
            if i == j {
                z[0]
            } else {
                z[n - (i - j)]
            }
        } else {
            z[j - i]
        };
        scale * v
    }))
}

pub fn blur_tensor(n: usize, band: usize, sigma: f64) -> Result<Tensor3> {
    let a = blur_matrix(n, band, sigma)?;
    outer_slices(&a, &a)
}

pub fn blur_problem(n: usize, band: usize, sigma: f64, seed: u64) -> Result<ProblemInstance> {
    ProblemDescriptor {
        family: Family::Blur { band, sigma },
        n,
        seed,
        solution: SolutionKind::Random,
    }
    .build()
}

/// `(e^{b·c} − e^{a·c}) / c`, continuous at `c = 0` where it equals `b − a`.
fn exp_diff_over(a: f64, b: f64, c: f64) -> f64 {
    if c.abs() < 1e-300 {
        b - a
    } else {
        (a * c).exp() * ((b - a) * c).exp_m1() / c
    }
}

/// Regularization Tools `baart(n)`: Galerkin discretization with
/// piecewise-constant bases on `s ∈ [0, π/2]` and `t ∈ [0, π]`, element
/// integrals by Simpson's rule in `t`.
pub fn baart_matrix(n: usize) -> Result<DMatrix<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("baart needs n >= 2, got {n}")));
    }
    let hs = PI / (2.0 * n as f64);
    let ht = PI / n as f64;
    let c = 1.0 / (3.0 * 2f64.sqrt());
    let ihs: Vec<f64> = (0..=n).map(|i| i as f64 * hs).collect();
    let column = |co: f64| -> Vec<f64> { (0..n).map(|i| exp_diff_over(ihs[i], ihs[i + 1], co)).collect() };
    let mut out = DMatrix::zeros(n, n);
    let mut f3 = column(1.0);
    for j in 1..=n {
        let f1 = f3;
        let co2 = ((j as f64 - 0.5) * ht).cos();
        let f2 = column(co2);
        f3 = column((j as f64 * ht).cos());
        for i in 0..n {
            out[(i, j - 1)] = c * (f1[i] + 4.0 * f2[i] + f3[i]);
        }
    }
    Ok(out)
}

/// MATLAB `gallery('prolate', n, w)`: symmetric Toeplitz with first row
/// `a_0 = 2w`, `a_k = sin(2πwk)/(πk)`.
pub fn prolate_matrix(n: usize, w: f64) -> Result<DMatrix<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("prolate needs n >= 1".into()));
    }
    let row: Vec<f64> = (0..n)
        .map(|k| {
            if k == 0 {
                2.0 * w
            } else {
                (2.0 * PI * w * k as f64).sin() / (PI * k as f64)
            }
        })
        .collect();
    Ok(DMatrix::from_fn(n, n, |i, j| row[i.abs_diff(j)]))
}

pub fn baart_prolate_tensor(n: usize, w: f64) -> Result<Tensor3> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!("baart-prolate needs n >= 4, got {n}")));
    }
    outer_slices(&baart_matrix(n)?, &prolate_matrix(n, w)?)
}

pub fn baart_prolate_problem(n: usize, w: f64, seed: u64, solution: SolutionKind) -> Result<ProblemInstance> {
    ProblemDescriptor {
        family: Family::BaartProlate { w },
        n,
        seed,
        solution,
    }
    .build()
}

/// `ℬ = 𝒜 ∗ 𝒳*`.
pub fn make_rhs(a: &Tensor3, x_star: &Tensor3) -> Result<Tensor3> {
    a.tprod(x_star)
}

/// Real standard-normal `n × 1 × p` solution from `seed`.
pub fn random_solution(n: usize, p: usize, seed: u64) -> Tensor3 {
    random::real_normal(&mut random::rng(seed), n, 1, p)
}

pub fn ones_solution(n: usize, p: usize) -> Tensor3 {
    Tensor3::from_fn(n, 1, p, |_, _, _| C64::new(1.0, 0.0))
}
