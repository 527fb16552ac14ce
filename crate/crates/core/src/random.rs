//! Seeded random tensors.
//!
//! All sampling goes through [`ChaCha8Rng`] seeded with `seed_from_u64`, and
//! normal variates through `rand_distr::StandardNormal`, so a seed yields the
//! same tensor on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::tensor::{Tensor3, C64};
use crate::tubal::Tubular;

pub type TensorRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TensorRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut TensorRng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_normal(rng: &mut TensorRng) -> C64 {
    C64::new(normal(rng), normal(rng))
}

/// Tensor with i.i.d. standard-normal real entries.
pub fn real_normal(rng: &mut TensorRng, n: usize, m: usize, p: usize) -> Tensor3 {
    Tensor3::from_fn(n, m, p, |_, _, _| C64::new(normal(rng), 0.0))
}

/// Tensor with i.i.d. complex entries (independent standard-normal parts).
pub fn complex_normal_tensor(rng: &mut TensorRng, n: usize, m: usize, p: usize) -> Tensor3 {
    Tensor3::from_fn(n, m, p, |_, _, _| complex_normal(rng))
}

/// Hermitian tensor `(G + Gᴴ)/2` from a complex Gaussian `G`.
pub fn hermitian(rng: &mut TensorRng, n: usize, p: usize) -> Tensor3 {
    let g = complex_normal_tensor(rng, n, n, p);
    (&g + &g.ttranspose()).scale_real(0.5)
}

/// Hermitian positive definite tensor `Gᴴ∗G + shift·ℐ`.
pub fn hpd(rng: &mut TensorRng, n: usize, p: usize, shift: f64) -> Tensor3 {
    let g = complex_normal_tensor(rng, n, n, p);
    let gg = g.adjoint_tprod(&g).expect("square");
    let sym = (&gg + &gg.ttranspose()).scale_real(0.5);
    &sym + &Tensor3::identity(n, p).scale_real(shift)
}

/// Hermitian positive semidefinite tensor of slice rank at most `rank`.
pub fn hpsd(rng: &mut TensorRng, n: usize, p: usize, rank: usize) -> Tensor3 {
    let g = complex_normal_tensor(rng, rank.max(1), n, p);
    let gg = g.adjoint_tprod(&g).expect("conforming");
    (&gg + &gg.ttranspose()).scale_real(0.5)
}

pub fn complex_tube(rng: &mut TensorRng, p: usize) -> Tubular {
    Tubular::new((0..p).map(|_| complex_normal(rng)).collect())
}

/// Hermitian tube with real Fourier components drawn standard-normal.
pub fn hermitian_tube(rng: &mut TensorRng, p: usize) -> Tubular {
    let comps: Vec<f64> = (0..p).map(|_| normal(rng)).collect();
    Tubular::from_real_components(&comps)
}

/// Hermitian positive definite tube with components in `[lo, hi]`.
pub fn hpd_tube(rng: &mut TensorRng, p: usize, lo: f64, hi: f64) -> Tubular {
    let comps: Vec<f64> = (0..p).map(|_| rng.random_range(lo..=hi)).collect();
    Tubular::from_real_components(&comps)
}

pub fn uniform(rng: &mut TensorRng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

pub fn index(rng: &mut TensorRng, lo: usize, hi_inclusive: usize) -> usize {
    rng.random_range(lo..=hi_inclusive)
}
