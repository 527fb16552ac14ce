//! Tubular tensors: the scalars of the T-algebra.
//!
//! A tube `[v]` of length `p` acts through its circulant matrix `circ([v])`,
//! which the DFT diagonalizes. Everything here (products, inverses, functions,
//! square roots, positive definiteness, the partial order) works on the `p`
//! Fourier components `d_i` of the tube.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fourier::{tube_components, tube_from_components};
use crate::tensor::{Tensor3, C64};

/// A `1 × 1 × p` tensor stored as its tube entries `v_1..v_p`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tubular {
    entries: Vec<C64>,
}

/// Result of comparing two Hermitian tubes under `⪯`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TubularOrder {
    Equal,
    /// `a ⪯ b` with at least one component strictly smaller.
    Precedes,
    /// `b ⪯ a` with at least one component strictly smaller.
    Succeeds,
    Incomparable,
}

/// Outcome of a Hermitian positive-definiteness test.
#[derive(Clone, Debug, PartialEq)]
pub struct HpdReport {
    pub hpd: bool,
    /// Components with non-negligible imaginary part or value `≤ tol`.
    pub failing: Vec<usize>,
    pub components: Vec<C64>,
}

impl Tubular {
    /// Panics if `entries` is empty.
    pub fn new(entries: Vec<C64>) -> Self {
        assert!(!entries.is_empty(), "a tube needs at least one entry");
        Tubular { entries }
    }

    pub fn from_real(entries: &[f64]) -> Self {
        Self::new(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Tube whose Fourier components are `components`.
    pub fn from_fourier_components(components: Vec<C64>) -> Self {
        Self::new(tube_from_components(&components))
    }

    pub fn from_real_components(components: &[f64]) -> Self {
        Self::from_fourier_components(components.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// `[e_1] = (1, 0, …, 0)`, the multiplicative identity.
    pub fn e1(p: usize) -> Self {
        Self::scalar(C64::new(1.0, 0.0), p)
    }

    /// `c·[e_1]`.
    pub fn scalar(c: C64, p: usize) -> Self {
        let mut entries = vec![C64::default(); p];
        entries[0] = c;
        Self::new(entries)
    }

    pub fn zeros(p: usize) -> Self {
        Self::new(vec![C64::default(); p])
    }

    pub fn p(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<C64> {
        self.entries
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|v| v.im == 0.0)
    }

    /// Drops imaginary parts.
    pub fn into_real(mut self) -> Self {
        self.entries.iter_mut().for_each(|v| v.im = 0.0);
        self
    }

    /// Fourier components `d_1..d_p`, the eigenvalues of `circ([v])`.
    pub fn fourier_components(&self) -> Vec<C64> {
        tube_components(&self.entries)
    }

    /// Euclidean norm of the entries.
    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.entries.iter().map(|v| v * s).collect())
    }

    /// Circulant matrix: first column `v`, each later column shifted down.
    pub fn circ_matrix(&self) -> DMatrix<C64> {
        let p = self.p();
        DMatrix::from_fn(p, p, |i, j| self.entries[(i + p - j) % p])
    }

    /// `[v]ᴴ`: `v_1` conjugated, remaining entries reversed and conjugated.
    pub fn hermitian_transpose(&self) -> Self {
        let p = self.p();
        Self::new((0..p).map(|k| self.entries[(p - k) % p].conj()).collect())
    }

    /// Product `[a] ∗ [b]` (circular convolution).
    pub fn tprod(&self, other: &Tubular) -> Result<Tubular> {
        self.check_len("tubular product", other)?;
        let (da, db) = (self.fourier_components(), other.fourier_components());
        let out = Self::from_fourier_components(da.iter().zip(&db).map(|(a, b)| a * b).collect());
        Ok(if self.is_real() && other.is_real() { out.into_real() } else { out })
    }

    fn check_len(&self, op: &'static str, other: &Tubular) -> Result<()> {
        if self.p() != other.p() {
            return Err(crate::error::shape_error(
                op,
                format!("tube lengths {} and {}", self.p(), other.p()),
            ));
        }
        Ok(())
    }

    /// Default hermiticity tolerance `1e-10·(1 + max|d_i|)`.
    fn hermitian_tol(components: &[C64]) -> f64 {
        let scale = components.iter().fold(0.0f64, |acc, d| acc.max(d.norm()));
        1e-10 * (1.0 + scale)
    }

    /// Whether every Fourier component is real up to `1e-10·(1 + max|d_i|)`.
    pub fn is_hermitian(&self) -> bool {
        let d = self.fourier_components();
        let tol = Self::hermitian_tol(&d);
        d.iter().all(|c| c.im.abs() <= tol)
    }

    /// Inverse with the default tolerance `p·ε·max|d_i|`.
    pub fn inverse(&self) -> Result<Tubular> {
        self.inverse_with_tol(self.p() as f64 * f64::EPSILON)
    }

    /// Inverse; components with `|d_i| ≤ rel_tol·max|d_i|` are reported as
    /// singular.
    pub fn inverse_with_tol(&self, rel_tol: f64) -> Result<Tubular> {
        let d = self.fourier_components();
        let scale = d.iter().fold(0.0f64, |acc, v| acc.max(v.norm()));
        let threshold = rel_tol * scale;
        let singular: Vec<(usize, f64)> = d
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm() <= threshold || v.norm() == 0.0)
            .map(|(i, v)| (i, v.norm()))
            .collect();
        if !singular.is_empty() {
            return Err(Error::Singular { components: singular });
        }
        let out = Self::from_fourier_components(d.iter().map(|v| v.inv()).collect());
        Ok(if self.is_real() { out.into_real() } else { out })
    }

    /// `f([v])`: the tube whose Fourier components are `f(d_i)`. `f` returns
    /// `None` where it is undefined.
    pub fn func(&self, f: impl Fn(C64) -> Option<C64>) -> Result<Tubular> {
        let d = self.fourier_components();
        let mut out = Vec::with_capacity(d.len());
        for (index, &value) in d.iter().enumerate() {
            out.push(f(value).ok_or(Error::Domain { index, value })?);
        }
        Ok(Self::from_fourier_components(out))
    }

    /// Like [`Tubular::func`] for functions defined everywhere.
    pub fn map_components(&self, f: impl Fn(C64) -> C64) -> Tubular {
        let d = self.fourier_components();
        Self::from_fourier_components(d.into_iter().map(f).collect())
    }

    /// Hermitian positive-definiteness with the default tolerances.
    pub fn hpd_report(&self) -> HpdReport {
        let d = self.fourier_components();
        let tol = Self::hermitian_tol(&d);
        Self::hpd_report_from(d, tol)
    }

    /// Components must satisfy `|Im d_i| ≤ tol` and `Re d_i > tol`.
    pub fn hpd_report_with_tol(&self, tol: f64) -> HpdReport {
        Self::hpd_report_from(self.fourier_components(), tol)
    }

    fn hpd_report_from(components: Vec<C64>, tol: f64) -> HpdReport {
        let failing: Vec<usize> = components
            .iter()
            .enumerate()
            .filter(|(_, d)| d.im.abs() > tol || d.re <= tol)
            .map(|(i, _)| i)
            .collect();
        HpdReport {
            hpd: failing.is_empty(),
            failing,
            components,
        }
    }

    pub fn is_hpd(&self) -> bool {
        self.hpd_report().hpd
    }

    /// Principal square root of a Hermitian positive definite tube.
    pub fn sqrt(&self) -> Result<Tubular> {
        let report = self.hpd_report();
        if !report.hpd {
            return Err(Error::NotHpd {
                failing: report.failing,
            });
        }
        Ok(Self::from_fourier_components(
            report.components.iter().map(|d| C64::new(d.re.sqrt(), 0.0)).collect(),
        ))
    }

    /// Square root of a Hermitian positive semidefinite tube; components in
    /// `[-tol, 0]` map to zero.
    pub fn sqrt_psd(&self) -> Result<Tubular> {
        let d = self.fourier_components();
        let tol = Self::hermitian_tol(&d);
        let failing: Vec<usize> = d
            .iter()
            .enumerate()
            .filter(|(_, c)| c.im.abs() > tol || c.re < -tol)
            .map(|(i, _)| i)
            .collect();
        if !failing.is_empty() {
            return Err(Error::NotHpd { failing });
        }
        Ok(Self::from_fourier_components(
            d.iter().map(|c| C64::new(c.re.max(0.0).sqrt(), 0.0)).collect(),
        ))
    }

    /// Partial order on Hermitian tubes with the default tolerance.
    pub fn order_cmp(&self, other: &Tubular) -> Result<TubularOrder> {
        let (da, db) = (self.fourier_components(), other.fourier_components());
        let tol = Self::hermitian_tol(&da).max(Self::hermitian_tol(&db));
        self.order_cmp_with_tol(other, tol)
    }

    /// Componentwise comparison of Fourier components; differences within
    /// `tol` count as equal.
    pub fn order_cmp_with_tol(&self, other: &Tubular, tol: f64) -> Result<TubularOrder> {
        self.check_len("order comparison", other)?;
        let (da, db) = (self.fourier_components(), other.fourier_components());
        let herm_tol = Self::hermitian_tol(&da).max(Self::hermitian_tol(&db));
        if da.iter().any(|d| d.im.abs() > herm_tol) {
            return Err(Error::NotHermitian {
                what: "left operand",
                residual: da.iter().fold(0.0f64, |acc, d| acc.max(d.im.abs())),
            });
        }
        if db.iter().any(|d| d.im.abs() > herm_tol) {
            return Err(Error::NotHermitian {
                what: "right operand",
                residual: db.iter().fold(0.0f64, |acc, d| acc.max(d.im.abs())),
            });
        }
        Ok(compare_components(
            &da.iter().map(|d| d.re).collect::<Vec<_>>(),
            &db.iter().map(|d| d.re).collect::<Vec<_>>(),
            tol,
        ))
    }

    /// `𝒟_[a]`: the `n × n × p` F-diagonal tensor with every diagonal tube `[a]`.
    pub fn dtensor(&self, n: usize) -> Tensor3 {
        Tensor3::from_fn(n, n, self.p(), |i, j, k| {
            if i == j {
                self.entries[k]
            } else {
                C64::default()
            }
        })
    }
}

/// Componentwise order of two real component vectors.
pub fn compare_components(a: &[f64], b: &[f64], tol: f64) -> TubularOrder {
    let mut below = false;
    let mut above = false;
    for (x, y) in a.iter().zip(b) {
        match (x - y).partial_cmp(&0.0) {
            _ if (x - y).abs() <= tol => {}
            Some(Ordering::Less) => below = true,
            Some(Ordering::Greater) => above = true,
            _ => {
                below = true;
                above = true;
            }
        }
    }
    match (below, above) {
        (false, false) => TubularOrder::Equal,
        (true, false) => TubularOrder::Precedes,
        (false, true) => TubularOrder::Succeeds,
        (true, true) => TubularOrder::Incomparable,
    }
}

/// Free-function form of [`Tubular::dtensor`].
pub fn dtensor_from_tubular(a: &Tubular, n: usize) -> Tensor3 {
    a.dtensor(n)
}

impl Add for &Tubular {
    type Output = Tubular;

    /// Panics on length mismatch.
    fn add(self, rhs: &Tubular) -> Tubular {
        assert_eq!(self.p(), rhs.p(), "tube lengths must match");
        Tubular::new(self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Tubular {
    type Output = Tubular;

    fn sub(self, rhs: &Tubular) -> Tubular {
        assert_eq!(self.p(), rhs.p(), "tube lengths must match");
        Tubular::new(self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect())
    }
}

impl Mul for &Tubular {
    type Output = Tubular;

    fn mul(self, rhs: &Tubular) -> Tubular {
        self.tprod(rhs).expect("tube lengths must match")
    }
}

impl Neg for &Tubular {
    type Output = Tubular;

    fn neg(self) -> Tubular {
        self.scale(C64::new(-1.0, 0.0))
    }
}
