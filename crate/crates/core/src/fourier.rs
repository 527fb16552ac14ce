//! Mode-3 discrete Fourier transform.
//!
//! A tensor with frontal slices `A_1..A_p` is block-diagonalized by
//!
//! ```text
//! bcirc(A) = (F_p ⊗ I_n) · blockdiag(Ã_1, …, Ã_p) · (F_p^H ⊗ I_m)
//! ```
//!
//! where `F_p` is the unitary DFT matrix with `(j, k)` entry `ω^{jk} / √p`,
//! `ω = exp(-2πi/p)`. Solving for the diagonal blocks gives
//!
//! ```text
//! Ã_k = Σ_s A_s · exp(+2πi·s·k/p)          (analysis, unnormalized)
//! A_s = (1/p) Σ_k Ã_k · exp(-2πi·s·k/p)    (synthesis)
//! ```
//!
//! so [`to_fourier`] runs an unnormalized transform along every tube and
//! [`FourierSlices::to_tensor`] carries the single `1/p` factor. The unitary
//! `F_p` itself only appears in [`dft_matrix`], which the oracles use.
//! Bridging the two conventions: `Ã_k` equals the `k`-th diagonal block of
//! `(F_p^H ⊗ I_n) · bcirc(A) · (F_p ⊗ I_m)` exactly, with no extra scaling.
//!
//! Any `p ≥ 1` is supported; `rustfft` picks mixed-radix or Bluestein plans.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{shape_error, Result};
use crate::tensor::{Tensor3, C64};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(len, direction))
}

/// Analysis transform of consecutive length-`p` tubes stored back to back.
pub(crate) fn analyze_tubes(buf: &mut [C64], p: usize) {
    if p > 1 {
        plan(p, FftDirection::Inverse).process(buf);
    }
}

/// Synthesis transform (including the `1/p` factor) of consecutive tubes.
pub(crate) fn synthesize_tubes(buf: &mut [C64], p: usize) {
    if p > 1 {
        plan(p, FftDirection::Forward).process(buf);
        let scale = 1.0 / p as f64;
        buf.iter_mut().for_each(|v| *v *= scale);
    }
}

/// Per-slice matrix form of a tensor in the Fourier domain.
#[derive(Clone, Debug)]
pub struct FourierSlices {
    n: usize,
    m: usize,
    slices: Vec<DMatrix<C64>>,
}

impl FourierSlices {
    /// Builds from explicit slices; every slice must have the same shape.
    pub fn from_slices(slices: Vec<DMatrix<C64>>) -> Result<Self> {
        let first = slices
            .first()
            .ok_or_else(|| shape_error("from_fourier", "at least one slice is required"))?;
        let (n, m) = first.shape();
        if n == 0 || m == 0 {
            return Err(shape_error("from_fourier", "slices must be non-empty"));
        }
        if let Some((i, s)) = slices.iter().enumerate().find(|(_, s)| s.shape() != (n, m)) {
            return Err(shape_error(
                "from_fourier",
                format!("slice {i} is {:?}, expected {:?}", s.shape(), (n, m)),
            ));
        }
        Ok(FourierSlices { n, m, slices })
    }

    pub(crate) fn from_slices_unchecked(n: usize, m: usize, slices: Vec<DMatrix<C64>>) -> Self {
        FourierSlices { n, m, slices }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> usize {
        self.slices.len()
    }

    pub fn slice(&self, k: usize) -> &DMatrix<C64> {
        &self.slices[k]
    }

    pub fn slices(&self) -> &[DMatrix<C64>] {
        &self.slices
    }

    pub fn into_slices(self) -> Vec<DMatrix<C64>> {
        self.slices
    }

    /// `blockdiag(Ã_1, …, Ã_p)` as a dense `np × mp` matrix (oracle use).
    pub fn block_diagonal(&self) -> DMatrix<C64> {
        let p = self.p();
        let mut out = DMatrix::zeros(self.n * p, self.m * p);
        for (k, s) in self.slices.iter().enumerate() {
            out.view_mut((k * self.n, k * self.m), (self.n, self.m)).copy_from(s);
        }
        out
    }

    /// Inverse transform back to a spatial tensor.
    pub fn to_tensor(&self) -> Tensor3 {
        let (n, m, p) = (self.n, self.m, self.p());
        let nm = n * m;
        let mut buf = vec![C64::default(); nm * p];
        for (k, s) in self.slices.iter().enumerate() {
            for j in 0..m {
                for i in 0..n {
                    buf[(j * n + i) * p + k] = s[(i, j)];
                }
            }
        }
        synthesize_tubes(&mut buf, p);
        let mut data = vec![C64::default(); nm * p];
        for idx in 0..nm {
            for k in 0..p {
                data[k * nm + idx] = buf[idx * p + k];
            }
        }
        Tensor3::from_parts(n, m, p, data)
    }

    /// Whether `Ã_{p-k} = conj(Ã_k)` for all `k ≥ 1` within `tol` (relative to
    /// the largest slice entry). True exactly when the spatial tensor is real.
    pub fn is_conjugate_symmetric(&self, tol: f64) -> bool {
        let p = self.p();
        let scale = self
            .slices
            .iter()
            .flat_map(|s| s.iter())
            .fold(0.0f64, |acc, v| acc.max(v.norm()));
        let bound = tol * scale.max(f64::MIN_POSITIVE);
        (1..p).all(|k| {
            self.slices[k]
                .iter()
                .zip(self.slices[p - k].iter())
                .all(|(a, b)| (a - b.conj()).norm() <= bound)
        })
    }
}

/// Mode-3 transform of a tensor (uncached; [`Tensor3::fourier`] caches it).
pub fn to_fourier(a: &Tensor3) -> FourierSlices {
    let (n, m, p) = (a.n(), a.m(), a.p());
    let nm = n * m;
    let data = a.as_slice();
    let mut buf = vec![C64::default(); nm * p];
    for k in 0..p {
        for idx in 0..nm {
            buf[idx * p + k] = data[k * nm + idx];
        }
    }
    analyze_tubes(&mut buf, p);
    let slices = (0..p)
        .map(|k| DMatrix::from_fn(n, m, |i, j| buf[(j * n + i) * p + k]))
        .collect();
    FourierSlices { n, m, slices }
}

/// Inverse of [`to_fourier`].
pub fn from_fourier(s: &FourierSlices) -> Tensor3 {
    s.to_tensor()
}

/// Unitary DFT matrix `F_p`, `(j, k)` entry `exp(-2πi·jk/p) / √p`.
pub fn dft_matrix(p: usize) -> DMatrix<C64> {
    let scale = 1.0 / (p as f64).sqrt();
    DMatrix::from_fn(p, p, |j, k| {
        let phase = -2.0 * PI * ((j * k) % p) as f64 / p as f64;
        Complex64::from_polar(scale, phase)
    })
}

/// Fourier components of a single tube under the analysis convention.
pub(crate) fn tube_components(entries: &[C64]) -> Vec<C64> {
    let mut buf = entries.to_vec();
    analyze_tubes(&mut buf, entries.len());
    buf
}

/// Tube entries from Fourier components (synthesis, with `1/p`).
pub(crate) fn tube_from_components(components: &[C64]) -> Vec<C64> {
    let mut buf = components.to_vec();
    synthesize_tubes(&mut buf, components.len());
    buf
}
