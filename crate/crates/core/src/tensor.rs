//! Dense third-order tensors and the T-product.
//!
//! Storage is slice-major with column-major frontal slices: entry `(i, j, k)`
//! lives at `k·n·m + j·n + i`. Tensors are immutable once built; the mode-3
//! transform is computed on first use and cached, so repeated products with the
//! same operand (the coefficient tensor of an iterative solve) transform it
//! only once.
//!
//! Real-valued data is stored as complex with exactly zero imaginary parts.
//! Products of real operands only compute the Fourier slices `0..=p/2` and
//! mirror the rest by conjugate symmetry, then drop the roundoff imaginary
//! residue so the result stays exactly real.

use std::ops::{Add, Neg, Sub};
use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{shape_error, Error, Result};
use crate::fourier::{self, FourierSlices};
use crate::tubal::Tubular;

pub type C64 = Complex64;

/// Largest number of entries [`Tensor3::bcirc_explicit`] will materialize.
pub const BCIRC_ENTRY_LIMIT: usize = 4_000_000;

#[derive(Clone, Debug)]
pub struct Tensor3 {
    n: usize,
    m: usize,
    p: usize,
    data: Vec<C64>,
    real: bool,
    fourier: OnceLock<Arc<FourierSlices>>,
}

impl Tensor3 {
    pub(crate) fn from_parts(n: usize, m: usize, p: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), n * m * p);
        let real = data.iter().all(|v| v.im == 0.0);
        Tensor3 {
            n,
            m,
            p,
            data,
            real,
            fourier: OnceLock::new(),
        }
    }

    fn check_dims(op: &'static str, n: usize, m: usize, p: usize) -> Result<()> {
        if n == 0 || m == 0 || p == 0 {
            return Err(shape_error(op, format!("dimensions must be positive, got {n}x{m}x{p}")));
        }
        Ok(())
    }

    /// Builds from slice-major, column-major-within-slice entries.
    pub fn from_vec(n: usize, m: usize, p: usize, data: Vec<C64>) -> Result<Self> {
        Self::check_dims("from_vec", n, m, p)?;
        if data.len() != n * m * p {
            return Err(shape_error(
                "from_vec",
                format!("expected {} entries, got {}", n * m * p, data.len()),
            ));
        }
        Ok(Self::from_parts(n, m, p, data))
    }

    pub fn from_real(n: usize, m: usize, p: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(n, m, p, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Panics if a dimension is zero.
    pub fn from_fn(n: usize, m: usize, p: usize, mut f: impl FnMut(usize, usize, usize) -> C64) -> Self {
        assert!(n > 0 && m > 0 && p > 0, "tensor dimensions must be positive");
        let mut data = Vec::with_capacity(n * m * p);
        for k in 0..p {
            for j in 0..m {
                for i in 0..n {
                    data.push(f(i, j, k));
                }
            }
        }
        Self::from_parts(n, m, p, data)
    }

    /// Builds from frontal slices `X_1..X_p` (all `n × m`).
    pub fn from_frontal_slices(slices: &[DMatrix<C64>]) -> Result<Self> {
        let first = slices
            .first()
            .ok_or_else(|| shape_error("from_frontal_slices", "no slices"))?;
        let (n, m) = first.shape();
        Self::check_dims("from_frontal_slices", n, m, slices.len())?;
        if slices.iter().any(|s| s.shape() != (n, m)) {
            return Err(shape_error("from_frontal_slices", "slices differ in shape"));
        }
        let data = slices.iter().flat_map(|s| s.iter().copied()).collect();
        Ok(Self::from_parts(n, m, slices.len(), data))
    }

    pub fn zeros(n: usize, m: usize, p: usize) -> Self {
        Self::from_fn(n, m, p, |_, _, _| C64::default())
    }

    /// `n × n × p` identity: first frontal slice `I_n`, the rest zero.
    pub fn identity(n: usize, p: usize) -> Self {
        Self::from_fn(n, n, p, |i, j, k| {
            if k == 0 && i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::default()
            }
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.n, self.m, self.p)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// True when every stored imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> C64 {
        self.data[k * self.n * self.m + j * self.n + i]
    }

    pub fn frontal_slice(&self, k: usize) -> DMatrix<C64> {
        let nm = self.n * self.m;
        DMatrix::from_column_slice(self.n, self.m, &self.data[k * nm..(k + 1) * nm])
    }

    /// Tube `(i, j, :)` as a tubular tensor.
    pub fn tube(&self, i: usize, j: usize) -> Tubular {
        Tubular::new((0..self.p).map(|k| self.get(i, j, k)).collect())
    }

    /// Lateral slice `(:, j, :)` as an `n × 1 × p` tensor.
    pub fn lateral(&self, j: usize) -> Tensor3 {
        Tensor3::from_fn(self.n, 1, self.p, |i, _, k| self.get(i, j, k))
    }

    /// Concatenates `n × 1 × p` tensors into an `n × k × p` tensor.
    pub fn from_laterals(columns: &[Tensor3]) -> Result<Tensor3> {
        let first = columns
            .first()
            .ok_or_else(|| shape_error("from_laterals", "no columns"))?;
        let (n, _, p) = first.shape();
        if columns.iter().any(|c| c.shape() != (n, 1, p)) {
            return Err(shape_error("from_laterals", format!("all columns must be {n}x1x{p}")));
        }
        Ok(Tensor3::from_fn(n, columns.len(), p, |i, j, k| columns[j].get(i, 0, k)))
    }

    /// Cached mode-3 transform.
    pub fn fourier(&self) -> &FourierSlices {
        self.fourier.get_or_init(|| Arc::new(fourier::to_fourier(self)))
    }

    /// Builds the spatial tensor from slices computed for `k ∈ 0..=p/2` when
    /// `real` holds (mirroring the rest), or for every `k` otherwise.
    fn from_slicewise(n: usize, m: usize, p: usize, real: bool, mut f: impl FnMut(usize) -> DMatrix<C64>) -> Tensor3 {
        let slices: Vec<DMatrix<C64>> = if real {
            let mut half: Vec<DMatrix<C64>> = (0..=p / 2).map(&mut f).collect();
            for k in (p / 2 + 1)..p {
                let mirrored = half[p - k].map(|v| v.conj());
                half.push(mirrored);
            }
            half
        } else {
            (0..p).map(f).collect()
        };
        let out = FourierSlices::from_slices_unchecked(n, m, slices).to_tensor();
        if real {
            out.real_part()
        } else {
            out
        }
    }

    fn real_part(mut self) -> Tensor3 {
        self.data.iter_mut().for_each(|v| v.im = 0.0);
        self.real = true;
        self.fourier = OnceLock::new();
        self
    }

    /// T-product `self ∗ rhs` computed slice-wise in the Fourier domain.
    pub fn tprod(&self, rhs: &Tensor3) -> Result<Tensor3> {
        if self.m != rhs.n || self.p != rhs.p {
            return Err(shape_error(
                "tprod",
                format!("{:?} * {:?}", self.shape(), rhs.shape()),
            ));
        }
        let (fa, fb) = (self.fourier(), rhs.fourier());
        Ok(Self::from_slicewise(self.n, rhs.m, self.p, self.real && rhs.real, |k| {
            fa.slice(k) * fb.slice(k)
        }))
    }

    /// `selfᴴ ∗ rhs` without materializing the transpose.
    pub fn adjoint_tprod(&self, rhs: &Tensor3) -> Result<Tensor3> {
        if self.n != rhs.n || self.p != rhs.p {
            return Err(shape_error(
                "adjoint_tprod",
                format!("{:?}ᴴ * {:?}", self.shape(), rhs.shape()),
            ));
        }
        let (fa, fb) = (self.fourier(), rhs.fourier());
        Ok(Self::from_slicewise(self.m, rhs.m, self.p, self.real && rhs.real, |k| {
            fa.slice(k).ad_mul(fb.slice(k))
        }))
    }

    /// `self ∗ [t]`: every tube of `self` convolved with `t`.
    pub fn mul_tube(&self, t: &Tubular) -> Result<Tensor3> {
        if t.p() != self.p {
            return Err(shape_error("mul_tube", format!("tube length {} vs p = {}", t.p(), self.p)));
        }
        let fa = self.fourier();
        let d = t.fourier_components();
        Ok(Self::from_slicewise(self.n, self.m, self.p, self.real && t.is_real(), |k| {
            fa.slice(k) * d[k]
        }))
    }

    /// Conjugate T-transpose: slice 1 is `A_1ᴴ`, slice `k ≥ 2` is `A_{p-k+2}ᴴ`.
    pub fn ttranspose(&self) -> Tensor3 {
        let p = self.p;
        Tensor3::from_fn(self.m, self.n, p, |i, j, k| {
            let src = if k == 0 { 0 } else { p - k };
            self.get(j, i, src).conj()
        })
    }

    /// T-inverse of a square tensor, slice-wise in the Fourier domain.
    pub fn t_inverse(&self) -> Result<Tensor3> {
        if self.n != self.m {
            return Err(shape_error("t_inverse", "tensor must have square frontal slices"));
        }
        let fa = self.fourier();
        let mut slices = Vec::with_capacity(self.p);
        for (k, s) in fa.slices().iter().enumerate() {
            let inv = s.clone().try_inverse().ok_or(Error::SingularGalerkin { slice: Some(k) })?;
            slices.push(inv);
        }
        let out = FourierSlices::from_slices_unchecked(self.n, self.n, slices).to_tensor();
        Ok(if self.real { out.real_part() } else { out })
    }

    /// `self^k` under the T-product (`k = 0` gives the identity).
    pub fn tpow(&self, k: u32) -> Result<Tensor3> {
        if self.n != self.m {
            return Err(shape_error("tpow", "tensor must have square frontal slices"));
        }
        let fa = self.fourier();
        Ok(Self::from_slicewise(self.n, self.n, self.p, self.real, |s| {
            fa.slice(s).pow(k)
        }))
    }

    pub fn frob_norm(&self) -> f64 {
        pairwise_sum(&self.data.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>()).sqrt()
    }

    /// `⟨A, B⟩_F = Σ conj(A)·B`.
    pub fn frob_inner(&self, other: &Tensor3) -> Result<C64> {
        if self.shape() != other.shape() {
            return Err(shape_error(
                "frob_inner",
                format!("{:?} vs {:?}", self.shape(), other.shape()),
            ));
        }
        let terms: Vec<C64> = self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).collect();
        Ok(pairwise_sum_complex(&terms))
    }

    /// Bilinear form `⟨X, Y⟩ = Xᴴ ∗ Y` of two `n × 1 × p` tensors.
    pub fn bilinear(&self, other: &Tensor3) -> Result<Tubular> {
        if self.m != 1 || other.m != 1 || self.shape() != other.shape() {
            return Err(shape_error(
                "bilinear",
                format!("expected two n x 1 x p tensors, got {:?} and {:?}", self.shape(), other.shape()),
            ));
        }
        let (fx, fy) = (self.fourier(), other.fourier());
        let comps = (0..self.p)
            .map(|k| fx.slice(k).column(0).dotc(&fy.slice(k).column(0)))
            .collect();
        let t = Tubular::from_fourier_components(comps);
        Ok(if self.real && other.real { t.into_real() } else { t })
    }

    /// Tubular norm `⟨X, X⟩^{1/2}`: Fourier component `k` is `‖x̃_k‖`.
    pub fn tubular_norm(&self) -> Result<Tubular> {
        if self.m != 1 {
            return Err(shape_error("tubular_norm", "expected an n x 1 x p tensor"));
        }
        let fx = self.fourier();
        let comps = (0..self.p)
            .map(|k| C64::new(fx.slice(k).column(0).norm(), 0.0))
            .collect();
        let t = Tubular::from_fourier_components(comps);
        Ok(if self.real { t.into_real() } else { t })
    }

    pub fn scale(&self, s: C64) -> Tensor3 {
        let data = self.data.iter().map(|v| v * s).collect();
        Tensor3::from_parts(self.n, self.m, self.p, data)
    }

    pub fn scale_real(&self, s: f64) -> Tensor3 {
        self.scale(C64::new(s, 0.0))
    }

    /// `self + s·x`.
    pub fn axpy(&self, s: C64, x: &Tensor3) -> Result<Tensor3> {
        self.zip_with(x, "axpy", |a, b| a + s * b)
    }

    pub fn try_add(&self, other: &Tensor3) -> Result<Tensor3> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Tensor3) -> Result<Tensor3> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    fn zip_with(&self, other: &Tensor3, op: &'static str, f: impl Fn(C64, C64) -> C64) -> Result<Tensor3> {
        if self.shape() != other.shape() {
            return Err(shape_error(op, format!("{:?} vs {:?}", self.shape(), other.shape())));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect();
        Ok(Tensor3::from_parts(self.n, self.m, self.p, data))
    }

    pub fn conj(&self) -> Tensor3 {
        Tensor3::from_parts(self.n, self.m, self.p, self.data.iter().map(|v| v.conj()).collect())
    }

    /// Whether `‖A − Aᴴ‖_F ≤ tol·‖A‖_F`; returns the relative residual too.
    pub fn hermitian_residual(&self) -> f64 {
        if self.n != self.m {
            return f64::INFINITY;
        }
        let diff = self.try_sub(&self.ttranspose()).expect("square");
        let scale = self.frob_norm();
        if scale == 0.0 {
            0.0
        } else {
            diff.frob_norm() / scale
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_residual() <= tol
    }

    /// Real entries, provided every imaginary part is within
    /// `tol · max(1, max|entry|)`.
    pub fn to_real(&self, tol: f64) -> Result<Vec<f64>> {
        let scale = self.data.iter().fold(1.0f64, |acc, v| acc.max(v.norm()));
        let worst = self.data.iter().fold(0.0f64, |acc, v| acc.max(v.im.abs()));
        if worst > tol * scale {
            return Err(Error::InvalidArgument(format!(
                "tensor is not real: imaginary residue {worst:.3e} exceeds {:.3e}",
                tol * scale
            )));
        }
        Ok(self.data.iter().map(|v| v.re).collect())
    }

    /// Drops imaginary parts after checking they are roundoff (`≤ tol`).
    pub fn into_real(self, tol: f64) -> Result<Tensor3> {
        self.to_real(tol)?;
        Ok(self.real_part())
    }

    /// `Ufold`: the `np × m` block column `[X_1; …; X_p]`.
    pub fn unfold(&self) -> DMatrix<C64> {
        let (n, m) = (self.n, self.m);
        DMatrix::from_fn(n * self.p, m, |r, j| self.get(r % n, j, r / n))
    }

    /// `Fold`: inverse of [`Tensor3::unfold`] for a given tube length.
    pub fn fold(mat: &DMatrix<C64>, p: usize) -> Result<Tensor3> {
        if p == 0 || !mat.nrows().is_multiple_of(p) || mat.nrows() == 0 || mat.ncols() == 0 {
            return Err(shape_error(
                "fold",
                format!("{} rows cannot be split into {p} slices", mat.nrows()),
            ));
        }
        let n = mat.nrows() / p;
        Ok(Tensor3::from_fn(n, mat.ncols(), p, |i, j, k| mat[(k * n + i, j)]))
    }

    /// Explicit `np × mp` block-circulant matrix, block `(r, c)` equal to
    /// `A_{1 + ((r − c) mod p)}`. Intended for verification only.
    pub fn bcirc_explicit(&self) -> Result<DMatrix<C64>> {
        let (n, m, p) = self.shape();
        let entries = n * p * m * p;
        if entries > BCIRC_ENTRY_LIMIT {
            return Err(Error::OracleTooLarge {
                entries,
                limit: BCIRC_ENTRY_LIMIT,
            });
        }
        let mut out = DMatrix::zeros(n * p, m * p);
        for r in 0..p {
            for c in 0..p {
                let k = (r + p - c) % p;
                out.view_mut((r * n, c * m), (n, m)).copy_from(&self.frontal_slice(k));
            }
        }
        Ok(out)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.norm()))
    }
}

impl Add for &Tensor3 {
    type Output = Tensor3;

    /// Panics on shape mismatch; use [`Tensor3::try_add`] otherwise.
    fn add(self, rhs: &Tensor3) -> Tensor3 {
        self.try_add(rhs).expect("tensor shapes must match")
    }
}

impl Sub for &Tensor3 {
    type Output = Tensor3;

    fn sub(self, rhs: &Tensor3) -> Tensor3 {
        self.try_sub(rhs).expect("tensor shapes must match")
    }
}

impl Neg for &Tensor3 {
    type Output = Tensor3;

    fn neg(self) -> Tensor3 {
        self.scale_real(-1.0)
    }
}

/// Pairwise summation with a fixed split order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        values.iter().sum()
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

pub(crate) fn pairwise_sum_complex(values: &[C64]) -> C64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        values.iter().sum()
    } else {
        let mid = values.len() / 2;
        pairwise_sum_complex(&values[..mid]) + pairwise_sum_complex(&values[mid..])
    }
}
