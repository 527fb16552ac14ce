//! Eigenvalues of tensors under the T-product.
//!
//! Every spectral object is assembled from dense eigendecompositions of the
//! Fourier slices `Ã_1..Ã_p`. A tubular eigenvalue picks one eigenvalue per
//! slice (a *selection*) and synthesizes a tube from them; the matching
//! eigentensor stacks the selected unit eigenvectors as its Fourier slices.
//!
//! Selections are 0-based: `selection[k] = j` picks the `j`-th sorted
//! eigenvalue of slice `k`. Hermitian slices are sorted ascending; general
//! slices lexicographically by `(re, im)`.

use log::warn;
use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};

use crate::error::{shape_error, Error, Result};
use crate::fourier::FourierSlices;
use crate::tensor::{Tensor3, C64};
use crate::tubal::{compare_components, Tubular, TubularOrder};

/// Hermitian residual below which the Hermitian eigensolver path is taken.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvector-matrix condition number above which a slice counts as defective.
pub const DEFECTIVE_COND: f64 = 1e12;
/// Largest `n^p` for which all tubular eigenvalues may be enumerated.
pub const ENUMERATION_LIMIT: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SortKey {
    /// Real eigenvalues, ascending.
    Ascending,
    /// Lexicographic by real then imaginary part.
    Lexicographic,
}

/// Eigendecompositions of all Fourier slices.
#[derive(Clone, Debug)]
pub struct SliceSpectrum {
    values: Vec<Vec<C64>>,
    vectors: Vec<DMatrix<C64>>,
    sort_key: SortKey,
    defective: Vec<usize>,
}

impl SliceSpectrum {
    pub fn n(&self) -> usize {
        self.vectors.first().map_or(0, |v| v.nrows())
    }

    pub fn p(&self) -> usize {
        self.values.len()
    }

    pub fn sort_key(&self) -> SortKey {
        self.sort_key
    }

    pub fn is_hermitian(&self) -> bool {
        self.sort_key == SortKey::Ascending
    }

    /// Sorted eigenvalues of slice `k`.
    pub fn values(&self, k: usize) -> &[C64] {
        &self.values[k]
    }

    /// Unit eigenvectors of slice `k`, column `j` belonging to `values(k)[j]`.
    pub fn vectors(&self, k: usize) -> &DMatrix<C64> {
        &self.vectors[k]
    }

    /// Slices whose eigenvector matrix is numerically singular.
    pub fn defective_slices(&self) -> &[usize] {
        &self.defective
    }

    /// All `n·p` eigenvalues, slice by slice.
    pub fn all_values(&self) -> Vec<C64> {
        self.values.iter().flatten().copied().collect()
    }

    fn check_selection(&self, selection: &[usize]) -> Result<()> {
        if selection.len() != self.p() {
            return Err(shape_error(
                "selection",
                format!("expected {} indices, got {}", self.p(), selection.len()),
            ));
        }
        let n = self.n();
        if let Some((slice, &index)) = selection.iter().enumerate().find(|(_, &j)| j >= n) {
            return Err(Error::SelectionOutOfRange { slice, index, n });
        }
        Ok(())
    }

    /// Tubular eigenvalue for a selection, without the eigentensor.
    pub fn tubular_eigenvalue(&self, selection: &[usize]) -> Result<Tubular> {
        self.check_selection(selection)?;
        Ok(Tubular::from_fourier_components(
            selection.iter().enumerate().map(|(k, &j)| self.values[k][j]).collect(),
        ))
    }

    /// Tubular eigenpair for a selection; the residual is measured against `a`.
    pub fn eigenpair(&self, a: &Tensor3, selection: &[usize]) -> Result<TubularEigenPair> {
        let lambda = self.tubular_eigenvalue(selection)?;
        let slices = selection
            .iter()
            .enumerate()
            .map(|(k, &j)| self.vectors[k].columns(j, 1).into_owned())
            .collect();
        let x = FourierSlices::from_slices(slices)?.to_tensor();
        let defective: Vec<usize> = self
            .defective
            .iter()
            .copied()
            .filter(|k| selection.get(*k).is_some())
            .collect();
        let residual = eigen_residual(a, &x, &lambda)?;
        if !defective.is_empty() {
            warn!("defective Fourier slices {defective:?}; eigenpair residual {residual:.3e}");
        }
        Ok(TubularEigenPair {
            lambda,
            x,
            selection: selection.to_vec(),
            residual,
            defective,
        })
    }

    /// Selection `(j, j, …, j)`.
    pub fn aligned_selection(&self, j: usize) -> Vec<usize> {
        vec![j; self.p()]
    }

    /// Every tubular eigenvalue, refused when `n^p` exceeds
    /// [`ENUMERATION_LIMIT`].
    pub fn enumerate(&self) -> Result<Vec<(Vec<usize>, Tubular)>> {
        let (n, p) = (self.n(), self.p());
        let count = (n as f64).powi(p as i32);
        if count > ENUMERATION_LIMIT as f64 {
            return Err(Error::EnumerationTooLarge {
                count,
                limit: ENUMERATION_LIMIT,
            });
        }
        let mut out = Vec::with_capacity(count as usize);
        let mut sel = vec![0usize; p];
        loop {
            out.push((sel.clone(), self.tubular_eigenvalue(&sel)?));
            let mut pos = 0;
            loop {
                if pos == p {
                    return Ok(out);
                }
                sel[pos] += 1;
                if sel[pos] < n {
                    break;
                }
                sel[pos] = 0;
                pos += 1;
            }
        }
    }
}

/// A tubular eigenvalue `[λ]` with eigentensor `𝒳` (`n × 1 × p`).
#[derive(Clone, Debug)]
pub struct TubularEigenPair {
    pub lambda: Tubular,
    pub x: Tensor3,
    pub selection: Vec<usize>,
    /// `‖𝒜∗𝒳 − 𝒳∗[λ]‖_F / (‖𝒜‖_F·‖𝒳‖_F)`.
    pub residual: f64,
    /// Selected slices flagged as defective.
    pub defective: Vec<usize>,
}

fn eigen_residual(a: &Tensor3, x: &Tensor3, lambda: &Tubular) -> Result<f64> {
    let ax = a.tprod(x)?;
    let xl = x.mul_tube(lambda)?;
    let denom = a.frob_norm() * x.frob_norm();
    let r = (&ax - &xl).frob_norm();
    Ok(if denom == 0.0 { r } else { r / denom })
}

fn require_square(op: &'static str, a: &Tensor3) -> Result<()> {
    if a.n() != a.m() {
        return Err(shape_error(op, format!("frontal slices must be square, got {:?}", a.shape())));
    }
    Ok(())
}

/// Fourier slice indices that must be decomposed: for real tensors only
/// `0..=p/2`, the rest follow by conjugation.
fn independent_slices(a: &Tensor3) -> usize {
    if a.is_real() {
        a.p() / 2 + 1
    } else {
        a.p()
    }
}

fn mirror<T: Clone>(half: Vec<T>, p: usize, conj: impl Fn(&T) -> T) -> Vec<T> {
    let mut out = half;
    let filled = out.len();
    for k in filled..p {
        let v = conj(&out[p - k]);
        out.push(v);
    }
    out
}

/// Eigendecomposition of every Fourier slice. Hermitian tensors use the
/// Hermitian solver; everything else the general one.
pub fn slice_spectra(a: &Tensor3) -> Result<SliceSpectrum> {
    require_square("slice_spectra", a)?;
    if a.hermitian_residual() <= HERMITIAN_TOL {
        hermitian_slice_spectra(a)
    } else {
        general_slice_spectra(a)
    }
}

/// Hermitian path; errors if `a` is not Hermitian to [`HERMITIAN_TOL`].
pub fn hermitian_slice_spectra(a: &Tensor3) -> Result<SliceSpectrum> {
    require_square("hermitian_slice_spectra", a)?;
    let residual = a.hermitian_residual();
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian {
            what: "tensor",
            residual,
        });
    }
    let fa = a.fourier();
    let half: Vec<(Vec<C64>, DMatrix<C64>)> = (0..independent_slices(a))
        .map(|k| hermitian_eig(fa.slice(k)))
        .collect();
    let full = mirror(half, a.p(), |(v, q)| (v.clone(), q.map(|z| z.conj())));
    let (values, vectors) = full.into_iter().unzip();
    Ok(SliceSpectrum {
        values,
        vectors,
        sort_key: SortKey::Ascending,
        defective: Vec::new(),
    })
}

fn hermitian_eig(s: &DMatrix<C64>) -> (Vec<C64>, DMatrix<C64>) {
    let h = (s + s.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| C64::new(eig.eigenvalues[i], 0.0)).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Ascending eigenvalues of the Hermitian part of each matrix (no vectors).
pub(crate) fn hermitian_eigenvalues(s: &DMatrix<C64>) -> Vec<f64> {
    let h = (s + s.adjoint()) * C64::new(0.5, 0.0);
    let mut v: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// General (non-Hermitian) path, regardless of structure.
pub fn general_slice_spectra(a: &Tensor3) -> Result<SliceSpectrum> {
    require_square("general_slice_spectra", a)?;
    let fa = a.fourier();
    let mut half = Vec::new();
    for k in 0..independent_slices(a) {
        half.push(general_eig(fa.slice(k)).ok_or(Error::Eigensolver { slice: k })?);
    }
    let p = a.p();
    let half_len = half.len();
    let full = mirror(half, p, |(v, q, d)| {
        // conj(Ã) has conjugated eigenvalues, which changes the sort order.
        let conj_vals: Vec<C64> = v.iter().map(|z: &C64| z.conj()).collect();
        let mut order: Vec<usize> = (0..conj_vals.len()).collect();
        order.sort_by(|&i, &j| lex_cmp(&conj_vals[i], &conj_vals[j]));
        let vals = order.iter().map(|&i| conj_vals[i]).collect();
        let vecs = DMatrix::from_fn(q.nrows(), q.ncols(), |r, c| q[(r, order[c])].conj());
        (vals, vecs, *d)
    });
    let mut values = Vec::with_capacity(p);
    let mut vectors = Vec::with_capacity(p);
    let mut defective = Vec::new();
    for (k, (v, q, d)) in full.into_iter().enumerate() {
        if d {
            defective.push(k);
        }
        values.push(v);
        vectors.push(q);
    }
    if !defective.is_empty() {
        warn!(
            "Fourier slices {defective:?} have ill-conditioned eigenvector bases ({} slices decomposed)",
            half_len
        );
    }
    Ok(SliceSpectrum {
        values,
        vectors,
        sort_key: SortKey::Lexicographic,
        defective,
    })
}

fn lex_cmp(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Eigenvalues, unit eigenvectors and a defectiveness flag of a general
/// square matrix via the complex Schur form.
fn general_eig(s: &DMatrix<C64>) -> Option<(Vec<C64>, DMatrix<C64>, bool)> {
    let n = s.nrows();
    let schur = Schur::try_new(s.clone(), f64::EPSILON, 10_000)?;
    let (q, t) = schur.unpack();
    let scale = t.norm().max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * scale;
    let mut vecs = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut y = DVector::<C64>::zeros(n);
        y[k] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = C64::default();
            for j in (i + 1)..=k {
                acc += t[(i, j)] * y[j];
            }
            let mut denom = t[(i, i)] - lambda;
            if denom.norm() < tiny {
                denom = C64::new(tiny, 0.0);
            }
            y[i] = -acc / denom;
        }
        let mut v = &q * y;
        let norm = v.norm();
        v /= C64::new(norm, 0.0);
        vecs.set_column(k, &v);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| lex_cmp(&t[(i, i)], &t[(j, j)]));
    let values = order.iter().map(|&i| t[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| vecs[(r, order[c])]);
    let sv = vectors.singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let defective = smin == 0.0 || smax / smin > DEFECTIVE_COND;
    Some((values, vectors, defective))
}

/// All T-eigenvalues (the spectrum of `bcirc(A)`), slice by slice.
pub fn t_eigenvalues(a: &Tensor3) -> Result<Vec<C64>> {
    Ok(slice_spectra(a)?.all_values())
}

/// Tubular eigenpair for a 0-based selection.
pub fn tubular_eig_from_selection(a: &Tensor3, selection: &[usize]) -> Result<TubularEigenPair> {
    slice_spectra(a)?.eigenpair(a, selection)
}

/// The `n` aligned eigenpairs `(j, …, j)`, `j = 0..n`.
pub fn aligned_eigenpairs(a: &Tensor3) -> Result<Vec<TubularEigenPair>> {
    let spec = slice_spectra(a)?;
    (0..spec.n())
        .map(|j| spec.eigenpair(a, &spec.aligned_selection(j)))
        .collect()
}

/// Ordered tubular eigenpairs `[λ_1] ⪯ … ⪯ [λ_n]` of a Hermitian tensor.
pub fn hermitian_ordered_spectrum(a: &Tensor3) -> Result<Vec<TubularEigenPair>> {
    let spec = hermitian_slice_spectra(a)?;
    (0..spec.n())
        .map(|j| spec.eigenpair(a, &spec.aligned_selection(j)))
        .collect()
}

/// `A = Qᴴ ∗ D ∗ Q` with `Q` unitary and `D` F-diagonal.
#[derive(Clone, Debug)]
pub struct HermitianDecomposition {
    pub q: Tensor3,
    pub d: Tensor3,
    /// Diagonal tubes of `D`, ordered `[λ_1] ⪯ … ⪯ [λ_n]`.
    pub eigenvalues: Vec<Tubular>,
}

impl HermitianDecomposition {
    /// `‖Qᴴ∗D∗Q − A‖_F / ‖A‖_F`.
    pub fn reconstruction_error(&self, a: &Tensor3) -> Result<f64> {
        let back = self.q.adjoint_tprod(&self.d.tprod(&self.q)?)?;
        let scale = a.frob_norm();
        let err = (&back - a).frob_norm();
        Ok(if scale == 0.0 { err } else { err / scale })
    }

    /// `‖Qᴴ∗Q − I‖_F`.
    pub fn unitarity_error(&self) -> Result<f64> {
        let qq = self.q.adjoint_tprod(&self.q)?;
        Ok((&qq - &Tensor3::identity(self.q.n(), self.q.p())).frob_norm())
    }

    /// `λ_m(A)`.
    pub fn lambda_min(&self) -> &Tubular {
        &self.eigenvalues[0]
    }

    /// `λ_M(A)`.
    pub fn lambda_max(&self) -> &Tubular {
        self.eigenvalues.last().expect("n >= 1")
    }
}

pub fn hermitian_decomposition(a: &Tensor3) -> Result<HermitianDecomposition> {
    let spec = hermitian_slice_spectra(a)?;
    let (n, p) = (spec.n(), spec.p());
    let q_slices: Vec<DMatrix<C64>> = (0..p).map(|k| spec.vectors(k).adjoint()).collect();
    let d_slices: Vec<DMatrix<C64>> = (0..p)
        .map(|k| DMatrix::from_diagonal(&DVector::from_column_slice(spec.values(k))))
        .collect();
    let real = a.is_real();
    let finish = |t: Tensor3| -> Tensor3 {
        if real {
            t.clone().into_real(1e-10).unwrap_or(t)
        } else {
            t
        }
    };
    let q = finish(FourierSlices::from_slices_unchecked(n, n, q_slices).to_tensor());
    let d = finish(FourierSlices::from_slices_unchecked(n, n, d_slices).to_tensor());
    let eigenvalues = (0..n)
        .map(|j| spec.tubular_eigenvalue(&spec.aligned_selection(j)))
        .collect::<Result<_>>()?;
    Ok(HermitianDecomposition { q, d, eigenvalues })
}

/// Per-slice extreme eigenvalues of a Hermitian tensor:
/// `(λ_min(Ã_k), λ_max(Ã_k))`.
pub fn hermitian_extremes(a: &Tensor3) -> Result<Vec<(f64, f64)>> {
    require_square("hermitian_extremes", a)?;
    let residual = a.hermitian_residual();
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian {
            what: "tensor",
            residual,
        });
    }
    let fa = a.fourier();
    let half: Vec<(f64, f64)> = (0..independent_slices(a))
        .map(|k| {
            let v = hermitian_eigenvalues(fa.slice(k));
            (v[0], v[v.len() - 1])
        })
        .collect();
    Ok(mirror(half, a.p(), |x| *x))
}

/// `[λ_m(A)]` and `[λ_M(A)]` of a Hermitian tensor.
pub fn extreme_tubular_eigenvalues(a: &Tensor3) -> Result<(Tubular, Tubular)> {
    let ext = hermitian_extremes(a)?;
    let lo = Tubular::from_real_components(&ext.iter().map(|e| e.0).collect::<Vec<_>>());
    let hi = Tubular::from_real_components(&ext.iter().map(|e| e.1).collect::<Vec<_>>());
    Ok(if a.is_real() { (lo.into_real(), hi.into_real()) } else { (lo, hi) })
}

/// Tubular spectral radius: component `k` is the spectral radius of `Ã_k`.
pub fn tubular_spectral_radius(a: &Tensor3) -> Result<Tubular> {
    let comps = spectral_radius_components(a)?;
    let t = Tubular::from_real_components(&comps);
    Ok(if a.is_real() { t.into_real() } else { t })
}

/// Fourier components of [`tubular_spectral_radius`].
pub fn spectral_radius_components(a: &Tensor3) -> Result<Vec<f64>> {
    require_square("tubular_spectral_radius", a)?;
    if a.hermitian_residual() <= HERMITIAN_TOL {
        let fa = a.fourier();
        let half: Vec<f64> = (0..independent_slices(a))
            .map(|k| hermitian_eigenvalues(fa.slice(k)).iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .collect();
        return Ok(mirror(half, a.p(), |x| *x));
    }
    let fa = a.fourier();
    let mut half = Vec::new();
    for k in 0..independent_slices(a) {
        let t = Schur::try_new(fa.slice(k).clone(), f64::EPSILON, 10_000)
            .ok_or(Error::Eigensolver { slice: k })?
            .unpack()
            .1;
        half.push((0..t.nrows()).fold(0.0f64, |m, i| m.max(t[(i, i)].norm())));
    }
    Ok(mirror(half, a.p(), |x| *x))
}

/// Scalar T-spectral radius: the spectral radius of `bcirc(A)`.
pub fn t_spectral_radius(a: &Tensor3) -> Result<f64> {
    Ok(spectral_radius_components(a)?.into_iter().fold(0.0, f64::max))
}

/// Tubular eigenvalue to eigentuple: `d_1 = λ_1`, `d_i = λ_{p-i+2}`.
pub fn tubular_to_eigentuple(lambda: &Tubular) -> Vec<C64> {
    let e = lambda.entries();
    let p = e.len();
    (0..p).map(|i| e[(p - i) % p]).collect()
}

/// Eigentuple to tubular eigenvalue (the same index reversal).
pub fn eigentuple_to_tubular(d: &[C64]) -> Tubular {
    let p = d.len();
    Tubular::new((0..p).map(|i| d[(p - i) % p]).collect())
}

/// Outcome of a T-linear independence test.
#[derive(Clone, Debug, PartialEq)]
pub struct IndependenceReport {
    pub independent: bool,
    /// First Fourier slice where the vectors are dependent.
    pub failing_slice: Option<usize>,
    /// Smallest `σ_min / σ_max` over slices.
    pub min_ratio: f64,
}

/// T-linear independence with the default threshold
/// `max(n, k)·p·ε·σ_max` per slice.
pub fn t_linear_independent(xs: &[Tensor3]) -> Result<IndependenceReport> {
    let first = xs.first().ok_or_else(|| shape_error("t_linear_independent", "no tensors"))?;
    let factor = first.n().max(xs.len()) as f64 * first.p() as f64 * f64::EPSILON;
    t_linear_independent_with_tol(xs, factor)
}

/// T-linear independence: per Fourier slice, the `n × k` matrix of slice
/// vectors must have rank `k` (singular values above `rel_tol·σ_max`).
pub fn t_linear_independent_with_tol(xs: &[Tensor3], rel_tol: f64) -> Result<IndependenceReport> {
    let first = xs.first().ok_or_else(|| shape_error("t_linear_independent", "no tensors"))?;
    let (n, _, p) = first.shape();
    if xs.iter().any(|x| x.shape() != (n, 1, p)) {
        return Err(shape_error("t_linear_independent", format!("all tensors must be {n}x1x{p}")));
    }
    let k = xs.len();
    if k > n {
        return Ok(IndependenceReport {
            independent: false,
            failing_slice: Some(0),
            min_ratio: 0.0,
        });
    }
    let fs: Vec<&FourierSlices> = xs.iter().map(|x| x.fourier()).collect();
    let mut min_ratio = f64::INFINITY;
    let mut failing = None;
    for s in 0..p {
        let m = DMatrix::from_fn(n, k, |i, j| fs[j].slice(s)[(i, 0)]);
        let sv = m.singular_values();
        let smax = sv.max();
        let smin = sv.min();
        let ratio = if smax == 0.0 { 0.0 } else { smin / smax };
        min_ratio = min_ratio.min(ratio);
        if failing.is_none() && (smax == 0.0 || smin <= rel_tol * smax) {
            failing = Some(s);
        }
    }
    Ok(IndependenceReport {
        independent: failing.is_none(),
        failing_slice: failing,
        min_ratio,
    })
}

/// Fourier slices of `X` (`n × 1 × p`) whose vector norm is at most
/// `rel_tol` times the largest.
pub fn zero_fourier_slices(x: &Tensor3, rel_tol: f64) -> Result<Vec<usize>> {
    if x.m() != 1 {
        return Err(shape_error("zero_fourier_slices", "expected an n x 1 x p tensor"));
    }
    let norms: Vec<f64> = x.fourier().slices().iter().map(|s| s.norm()).collect();
    let scale = norms.iter().fold(0.0f64, |a, &b| a.max(b));
    Ok(norms
        .iter()
        .enumerate()
        .filter(|(_, &v)| v <= rel_tol * scale || v == 0.0)
        .map(|(i, _)| i)
        .collect())
}

/// Whether `Xᴴ ∗ X` is singular as a tube (default inverse tolerance).
pub fn gram_is_singular(x: &Tensor3) -> Result<bool> {
    match x.bilinear(x)?.inverse() {
        Ok(_) => Ok(false),
        Err(Error::Singular { .. }) => Ok(true),
        Err(e) => Err(e),
    }
}

/// A nonzero tube `[a]` with `X ∗ [a] = 0`, if one exists: its Fourier
/// components are 1 on the (numerically) zero slices of `X` and 0 elsewhere.
pub fn annihilating_tube(x: &Tensor3, rel_tol: f64) -> Result<Option<Tubular>> {
    let zero = zero_fourier_slices(x, rel_tol)?;
    if zero.is_empty() {
        return Ok(None);
    }
    let mut comps = vec![C64::default(); x.p()];
    for &k in &zero {
        comps[k] = C64::new(1.0, 0.0);
    }
    Ok(Some(Tubular::from_fourier_components(comps)))
}

/// Positive definiteness straight from the definition: the quadratic form
/// `(Xᴴ∗A∗X)_1 = Ufold(X)ᴴ bcirc(A) Ufold(X)`, so `A` is positive definite
/// exactly when the Hermitian matrix `bcirc(A)` has positive spectrum.
/// Limited to sizes [`Tensor3::bcirc_explicit`] accepts.
pub fn positive_definite_by_definition(a: &Tensor3) -> Result<bool> {
    Ok(hermitian_eigenvalues(&a.bcirc_explicit()?)[0] > 0.0)
}

/// Positive definiteness via the tubular eigenvalues: every aligned tube is
/// Hermitian positive definite.
pub fn positive_definite_by_tubes(a: &Tensor3) -> Result<bool> {
    let spec = hermitian_slice_spectra(a)?;
    for j in 0..spec.n() {
        if !spec.tubular_eigenvalue(&spec.aligned_selection(j))?.is_hpd() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Positive definiteness via slice eigenvalues: all strictly positive.
pub fn positive_definite_by_slices(a: &Tensor3) -> Result<bool> {
    Ok(hermitian_extremes(a)?.iter().all(|&(lo, _)| lo > 0.0))
}

fn normalized(diff: f64, bound: f64) -> f64 {
    diff / bound.abs().max(1.0)
}

fn real_components(t: &Tubular) -> Vec<f64> {
    t.fourier_components().iter().map(|d| d.re).collect()
}

fn check_pair(op: &'static str, a: &Tensor3, b: &Tensor3) -> Result<()> {
    if a.shape() != b.shape() || a.n() != a.m() {
        return Err(shape_error(op, format!("{:?} and {:?}", a.shape(), b.shape())));
    }
    Ok(())
}

fn require_hermitian(check: &'static str, what: &str, a: &Tensor3) -> Result<()> {
    let r = a.hermitian_residual();
    if r > HERMITIAN_TOL {
        return Err(Error::Precondition {
            check,
            detail: format!("{what} is not Hermitian (residual {r:.3e})"),
        });
    }
    Ok(())
}

/// Weyl bounds `λ_m(A)+λ_m(B) ⪯ [λ] ⪯ λ_M(A)+λ_M(B)` for every aligned
/// tubular eigenvalue `[λ]` of `A + B`. Returns the worst normalized slack.
pub fn weyl_slack(a: &Tensor3, b: &Tensor3) -> Result<f64> {
    check_pair("weyl", a, b)?;
    require_hermitian("weyl", "A", a)?;
    require_hermitian("weyl", "B", b)?;
    let (am, a_max) = extreme_tubular_eigenvalues(a)?;
    let (bm, b_max) = extreme_tubular_eigenvalues(b)?;
    let lower = real_components(&(&am + &bm));
    let upper = real_components(&(&a_max + &b_max));
    let spec = hermitian_slice_spectra(&(a + b))?;
    let mut worst = f64::INFINITY;
    for j in 0..spec.n() {
        let lam = real_components(&spec.tubular_eigenvalue(&spec.aligned_selection(j))?);
        for k in 0..lam.len() {
            worst = worst
                .min(normalized(lam[k] - lower[k], lower[k]))
                .min(normalized(upper[k] - lam[k], upper[k]));
        }
    }
    Ok(worst)
}

/// Slacks of the product-bound proposition for `A` Hermitian negative definite
/// and `B` Hermitian positive semidefinite.
#[derive(Clone, Debug)]
pub struct ProductBoundSlacks {
    /// Every tubular eigenvalue of `A∗B` is Hermitian negative semidefinite.
    pub nonpositive: f64,
    /// `λ_m(A∗B) ⪯ [λ] ⪯ λ_M(A∗B)` over aligned eigenvalues.
    pub sandwich: f64,
    /// `λ_m(A)∗λ_m(B) ⪯ λ_M(A∗B) ⪯ λ_M(A)∗λ_m(B)`.
    pub max_bounds: f64,
    /// `λ_m(A)∗λ_M(B) ⪯ λ_m(A∗B) ⪯ λ_M(A)∗λ_M(B)`.
    pub min_bounds: f64,
    /// Largest imaginary part among the product's slice eigenvalues.
    pub imaginary_residue: f64,
}

impl ProductBoundSlacks {
    pub fn worst(&self) -> f64 {
        self.nonpositive.min(self.sandwich).min(self.max_bounds).min(self.min_bounds)
    }
}

pub fn product_bound_slacks(a: &Tensor3, b: &Tensor3) -> Result<ProductBoundSlacks> {
    check_pair("product bounds", a, b)?;
    require_hermitian("product bounds", "A", a)?;
    require_hermitian("product bounds", "B", b)?;
    let ea = hermitian_extremes(a)?;
    let eb = hermitian_extremes(b)?;
    if let Some((k, v)) = ea.iter().enumerate().find(|(_, e)| e.1 >= 0.0) {
        return Err(Error::Precondition {
            check: "product bounds",
            detail: format!("A is not negative definite (slice {k} has eigenvalue {:.3e})", v.1),
        });
    }
    let scale_b = eb.iter().fold(0.0f64, |m, e| m.max(e.1.abs()));
    if let Some((k, v)) = eb.iter().enumerate().find(|(_, e)| e.0 < -1e-12 * scale_b.max(1.0)) {
        return Err(Error::Precondition {
            check: "product bounds",
            detail: format!("B is not positive semidefinite (slice {k} has eigenvalue {:.3e})", v.0),
        });
    }
    let (am, a_max) = extreme_tubular_eigenvalues(a)?;
    let (bm, b_max) = extreme_tubular_eigenvalues(b)?;
    let ab = a.tprod(b)?;
    let spec = general_slice_spectra(&ab)?;
    let n = spec.n();
    let p = spec.p();
    let mut imaginary_residue = 0.0f64;
    // The eigenvalues are real, so the lexicographic sort is ascending.
    let lams: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            (0..p)
                .map(|k| {
                    let v = spec.values(k)[j];
                    imaginary_residue = imaginary_residue.max(v.im.abs());
                    v.re
                })
                .collect()
        })
        .collect();
    let ab_min = &lams[0];
    let ab_max = &lams[n - 1];
    let mut nonpositive = f64::INFINITY;
    let mut sandwich = f64::INFINITY;
    for lam in &lams {
        let t = Tubular::from_real_components(lam);
        let comps = real_components(&t);
        for k in 0..p {
            nonpositive = nonpositive.min(normalized(-comps[k], 0.0));
            sandwich = sandwich
                .min(normalized(comps[k] - ab_min[k], ab_min[k]))
                .min(normalized(ab_max[k] - comps[k], ab_max[k]));
        }
    }
    let lo_max = real_components(&(&am * &bm));
    let hi_max = real_components(&(&a_max * &bm));
    let lo_min = real_components(&(&am * &b_max));
    let hi_min = real_components(&(&a_max * &b_max));
    let mut max_bounds = f64::INFINITY;
    let mut min_bounds = f64::INFINITY;
    for k in 0..p {
        max_bounds = max_bounds
            .min(normalized(ab_max[k] - lo_max[k], lo_max[k]))
            .min(normalized(hi_max[k] - ab_max[k], hi_max[k]));
        min_bounds = min_bounds
            .min(normalized(ab_min[k] - lo_min[k], lo_min[k]))
            .min(normalized(hi_min[k] - ab_min[k], hi_min[k]));
    }
    Ok(ProductBoundSlacks {
        nonpositive,
        sandwich,
        max_bounds,
        min_bounds,
        imaginary_residue,
    })
}

/// Rayleigh-quotient sandwich `[λ_m] ⪯ (Xᴴ∗A∗X)∗(Xᴴ∗X)⁻¹ ⪯ [λ_M]`.
pub fn rayleigh_slack(a: &Tensor3, x: &Tensor3) -> Result<f64> {
    require_hermitian("rayleigh quotient", "A", a)?;
    let gram_inv = gram_inverse("rayleigh quotient", x)?;
    let q = &x.bilinear(&a.tprod(x)?)? * &gram_inv;
    let (lm, lmax) = extreme_tubular_eigenvalues(a)?;
    let (lo, hi, qc) = (real_components(&lm), real_components(&lmax), real_components(&q));
    Ok((0..qc.len()).fold(f64::INFINITY, |w, k| {
        w.min(normalized(qc[k] - lo[k], lo[k])).min(normalized(hi[k] - qc[k], hi[k]))
    }))
}

fn gram_inverse(check: &'static str, x: &Tensor3) -> Result<Tubular> {
    x.bilinear(x)?.inverse().map_err(|e| Error::Precondition {
        check,
        detail: format!("Xᴴ∗X is singular: {e}"),
    })
}

/// Generalized Kantorovich inequality for Hermitian positive definite `A`:
/// `(XᴴX)⁻¹(XᴴAX)(XᴴA⁻¹X)(XᴴX)⁻¹ ⪯ ¼([λ_m]+[λ_M])²[λ_m]⁻¹[λ_M]⁻¹`.
pub fn kantorovich_slack(a: &Tensor3, x: &Tensor3) -> Result<f64> {
    require_hermitian("kantorovich", "A", a)?;
    if !positive_definite_by_slices(a)? {
        return Err(Error::Precondition {
            check: "kantorovich",
            detail: "A is not positive definite".into(),
        });
    }
    let gi = gram_inverse("kantorovich", x)?;
    let a_inv = a.t_inverse()?;
    let xax = x.bilinear(&a.tprod(x)?)?;
    let xaix = x.bilinear(&a_inv.tprod(x)?)?;
    let lhs = &(&(&gi * &xax) * &xaix) * &gi;
    let (lm, lmax) = extreme_tubular_eigenvalues(a)?;
    let sum = &lm + &lmax;
    let rhs = &(&(&sum * &sum) * &lm.inverse()?) * &lmax.inverse()?;
    let rhs = rhs.scale(C64::new(0.25, 0.0));
    let (l, r) = (real_components(&lhs), real_components(&rhs));
    Ok((0..l.len()).fold(f64::INFINITY, |w, k| w.min(normalized(r[k] - l[k], r[k]))))
}

/// Componentwise comparison of two Hermitian tubes' Fourier components.
pub fn tubes_ordered(a: &Tubular, b: &Tubular, tol: f64) -> bool {
    matches!(
        compare_components(&real_components(a), &real_components(b), tol),
        TubularOrder::Precedes | TubularOrder::Equal
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn lcg(seed: u64) -> impl FnMut() -> f64 {
        let mut s = seed.wrapping_add(0x9E3779B97F4A7C15);
        move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        }
    }

    fn random(n: usize, m: usize, p: usize, seed: u64) -> Tensor3 {
        let mut r = lcg(seed);
        Tensor3::from_fn(n, m, p, |_, _, _| C64::new(r(), r()))
    }

    fn hermitian(n: usize, p: usize, seed: u64) -> Tensor3 {
        let a = random(n, n, p, seed);
        &a + &a.ttranspose()
    }

    #[test]
    fn identity_spectra() {
        let id = Tensor3::identity(3, 4);
        let spec = slice_spectra(&id).unwrap();
        assert!(spec.is_hermitian());
        for k in 0..4 {
            assert!(spec.values(k).iter().all(|v| (v - re(1.0)).norm() < 1e-14));
        }
        let all = t_eigenvalues(&id).unwrap();
        assert_eq!(all.len(), 12);
        let pair = tubular_eig_from_selection(&id, &[2, 0, 1, 1]).unwrap();
        assert!((&pair.lambda - &Tubular::e1(4)).norm() < 1e-14);
        assert!(pair.residual < 1e-14);
        let ordered = hermitian_ordered_spectrum(&id).unwrap();
        assert_eq!(ordered.len(), 3);
        let rho = tubular_spectral_radius(&id).unwrap();
        assert!((&rho - &Tubular::e1(4)).norm() < 1e-14);
    }

    #[test]
    fn dtensor_spectra_are_tube_components() {
        let v = Tubular::new(vec![re(1.0), C64::new(0.5, 0.5), re(-2.0)]);
        let a = v.dtensor(2);
        let d = v.fourier_components();
        let spec = slice_spectra(&a).unwrap();
        for k in 0..3 {
            for val in spec.values(k) {
                assert!((val - d[k]).norm() < 1e-12);
            }
        }
        let rho = spectral_radius_components(&a).unwrap();
        for k in 0..3 {
            assert!((rho[k] - d[k].norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn scalar_tube_eigenvalues_are_components() {
        let v = Tubular::new(vec![re(2.0), C64::new(0.1, -0.3), re(0.5), re(1.0)]);
        let a = v.dtensor(1);
        let mut got = t_eigenvalues(&a).unwrap();
        let mut want = v.fourier_components();
        got.sort_by(lex_cmp);
        want.sort_by(lex_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() < 1e-12);
        }
    }

    #[test]
    fn selection_errors() {
        let a = random(2, 2, 3, 1);
        let spec = slice_spectra(&a).unwrap();
        assert!(matches!(
            spec.tubular_eigenvalue(&[0, 2, 0]),
            Err(Error::SelectionOutOfRange { slice: 1, index: 2, n: 2 })
        ));
        assert!(spec.tubular_eigenvalue(&[0, 1]).is_err());
    }

    #[test]
    fn general_eigenpairs_have_small_residual() {
        for seed in 0..5 {
            let a = random(4, 4, 4, seed);
            for pair in aligned_eigenpairs(&a).unwrap() {
                assert!(pair.residual < 1e-10, "{}", pair.residual);
            }
            let spec = slice_spectra(&a).unwrap();
            let pair = spec.eigenpair(&a, &[3, 0, 2, 1]).unwrap();
            assert!(pair.residual < 1e-10);
        }
    }

    #[test]
    fn real_tensor_spectra_mirror() {
        let mut r = lcg(9);
        let a = Tensor3::from_fn(3, 3, 5, |_, _, _| re(r()));
        let spec = general_slice_spectra(&a).unwrap();
        let fa = a.fourier();
        for k in 0..5 {
            let s = fa.slice(k);
            for (j, v) in spec.values(k).iter().enumerate() {
                let z = spec.vectors(k).column(j).into_owned();
                assert!((s * &z - z.clone() * *v).norm() < 1e-10);
            }
        }
        for pair in aligned_eigenpairs(&a).unwrap() {
            assert!(pair.residual < 1e-10);
        }
    }

    #[test]
    fn hermitian_decomposition_reconstructs() {
        let a = hermitian(4, 3, 5);
        let dec = hermitian_decomposition(&a).unwrap();
        assert!(dec.reconstruction_error(&a).unwrap() < 1e-12);
        assert!(dec.unitarity_error().unwrap() < 1e-12);
        for w in dec.eigenvalues.windows(2) {
            assert!(w[0].order_cmp(&w[1]).unwrap() != TubularOrder::Succeeds);
        }
        let mut r = lcg(3);
        let b = Tensor3::from_fn(3, 3, 4, |_, _, _| re(r()));
        let b = &b + &b.ttranspose();
        let dec = hermitian_decomposition(&b).unwrap();
        assert!(dec.q.is_real());
        assert!(dec.reconstruction_error(&b).unwrap() < 1e-12);
    }

    #[test]
    fn not_hermitian_is_rejected() {
        let a = random(3, 3, 3, 2);
        assert!(matches!(hermitian_ordered_spectrum(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eigentuple_examples() {
        let e = Tubular::e1(3);
        assert_eq!(tubular_to_eigentuple(&e), e.entries());
        let t = Tubular::from_real(&[1.0, 2.0, 3.0]);
        assert_eq!(tubular_to_eigentuple(&t), vec![re(1.0), re(3.0), re(2.0)]);
        let back = eigentuple_to_tubular(&tubular_to_eigentuple(&t));
        assert_eq!(back, t);
    }

    #[test]
    fn eigentuple_satisfies_matrix_relation() {
        // Matrix form of A∗X equals M·circ(d) with M = [x_1 … x_p].
        let a = random(3, 3, 4, 11);
        let pair = tubular_eig_from_selection(&a, &[0, 1, 2, 0]).unwrap();
        let d = eigentuple_to_tubular(&tubular_to_eigentuple(&pair.lambda));
        assert_eq!(d, pair.lambda);
        let d = Tubular::new(tubular_to_eigentuple(&pair.lambda));
        let ax = a.tprod(&pair.x).unwrap();
        let as_matrix = |t: &Tensor3| DMatrix::from_fn(t.n(), t.p(), |i, k| t.get(i, 0, k));
        let lhs = as_matrix(&ax);
        let rhs = as_matrix(&pair.x) * d.circ_matrix();
        assert!((lhs - rhs).norm() < 1e-10 * a.frob_norm());
    }

    #[test]
    fn linear_independence_examples() {
        let x = random(4, 1, 3, 1);
        assert!(t_linear_independent(std::slice::from_ref(&x)).unwrap().independent);
        let a = Tubular::new(vec![re(2.0), re(0.3), C64::new(0.0, 0.4)]);
        let xa = x.mul_tube(&a).unwrap();
        let rep = t_linear_independent(&[x.clone(), xa]).unwrap();
        assert!(!rep.independent);
        let y = random(4, 1, 3, 2);
        assert!(t_linear_independent(&[x, y]).unwrap().independent);
    }

    #[test]
    fn gram_detectors_agree_on_planted_zero_slice() {
        let x = random(3, 1, 4, 4);
        let mut slices = x.fourier().slices().to_vec();
        slices[2].fill(C64::default());
        let xz = FourierSlices::from_slices(slices).unwrap().to_tensor();
        assert!(gram_is_singular(&xz).unwrap());
        assert_eq!(zero_fourier_slices(&xz, 1e-12).unwrap(), vec![2]);
        let t = annihilating_tube(&xz, 1e-12).unwrap().unwrap();
        assert!(xz.mul_tube(&t).unwrap().frob_norm() < 1e-12);
        assert!(!gram_is_singular(&x).unwrap());
        assert!(annihilating_tube(&x, 1e-12).unwrap().is_none());
    }

    #[test]
    fn positive_definiteness_detectors() {
        let id = Tensor3::identity(3, 3);
        assert!(positive_definite_by_definition(&id).unwrap());
        assert!(positive_definite_by_tubes(&id).unwrap());
        assert!(positive_definite_by_slices(&id).unwrap());
        let neg = id.scale_real(-1.0);
        assert!(!positive_definite_by_definition(&neg).unwrap());
        assert!(!positive_definite_by_tubes(&neg).unwrap());
    }

    #[test]
    fn weyl_identity_case() {
        let id = Tensor3::identity(3, 4);
        assert!(weyl_slack(&id, &id).unwrap().abs() < 1e-12);
        let spec = hermitian_slice_spectra(&(&id + &id)).unwrap();
        let lam = spec.tubular_eigenvalue(&spec.aligned_selection(1)).unwrap();
        assert!((&lam - &Tubular::e1(4).scale(re(2.0))).norm() < 1e-13);
    }

    #[test]
    fn kantorovich_scalar_case_is_tight() {
        let v = Tubular::from_real_components(&[2.0, 3.0, 3.0]);
        let a = v.dtensor(1);
        let x = random(1, 1, 3, 7);
        let slack = kantorovich_slack(&a, &x).unwrap();
        assert!(slack.abs() < 1e-12, "{slack}");
    }

    #[test]
    fn enumeration_limits() {
        let a = hermitian(2, 3, 1);
        let spec = slice_spectra(&a).unwrap();
        let all = spec.enumerate().unwrap();
        assert_eq!(all.len(), 8);
        let big = slice_spectra(&hermitian(4, 7, 1)).unwrap();
        assert!(matches!(big.enumerate(), Err(Error::EnumerationTooLarge { .. })));
    }
}
