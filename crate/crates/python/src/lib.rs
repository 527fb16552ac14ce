//! Python bindings: tensors, tubes, spectra, solvers, test problems and
//! the self-check suites.
//!
//! Tensors cross the boundary as flat lists in slice-major, column-major
//! order (`index = k·n·m + j·n + i`), matching `Tensor.to_list`.

use num_complex::Complex64 as C64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use tubal::experiment::{parse_methods, run_method, StepParameters};
use tubal::problems::{self, ProblemInstance, SolutionKind};
use tubal::solvers::{self, ConvergenceHistory, IterOptions, RelaxDirection};
use tubal::{random, spectra, verify};

fn err(e: tubal::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Tensor", module = "pytubal", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyTensor {
    inner: tubal::Tensor3,
}

impl From<tubal::Tensor3> for PyTensor {
    fn from(inner: tubal::Tensor3) -> Self {
        PyTensor { inner }
    }
}

#[pymethods]
impl PyTensor {
    /// Tensor of shape `(n, m, p)` from a flat list of complex entries.
    #[new]
    fn new(n: usize, m: usize, p: usize, data: Vec<C64>) -> PyResult<Self> {
        Ok(tubal::Tensor3::from_vec(n, m, p, data).map_err(err)?.into())
    }

    #[staticmethod]
    fn zeros(n: usize, m: usize, p: usize) -> Self {
        tubal::Tensor3::zeros(n, m, p).into()
    }

    #[staticmethod]
    fn identity(n: usize, p: usize) -> Self {
        tubal::Tensor3::identity(n, p).into()
    }

    /// Real standard-normal entries from a seeded generator.
    #[staticmethod]
    fn random(n: usize, m: usize, p: usize, seed: u64) -> Self {
        random::real_normal(&mut random::rng(seed), n, m, p).into()
    }

    #[getter]
    fn shape(&self) -> (usize, usize, usize) {
        self.inner.shape()
    }

    fn get(&self, i: usize, j: usize, k: usize) -> PyResult<C64> {
        let (n, m, p) = self.inner.shape();
        if i >= n || j >= m || k >= p {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(self.inner.get(i, j, k))
    }

    fn to_list(&self) -> Vec<C64> {
        self.inner.as_slice().to_vec()
    }

    /// `k`-th Fourier slice as a list of rows.
    fn fourier_slice(&self, k: usize) -> PyResult<Vec<Vec<C64>>> {
        if k >= self.inner.p() {
            return Err(PyValueError::new_err("slice index out of range"));
        }
        let s = self.inner.fourier().slice(k);
        Ok((0..s.nrows()).map(|i| s.row(i).iter().copied().collect()).collect())
    }

    fn tprod(&self, other: &PyTensor) -> PyResult<PyTensor> {
        Ok(self.inner.tprod(&other.inner).map_err(err)?.into())
    }

    fn __matmul__(&self, other: &PyTensor) -> PyResult<PyTensor> {
        self.tprod(other)
    }

    fn __add__(&self, other: &PyTensor) -> PyResult<PyTensor> {
        Ok(self.inner.try_add(&other.inner).map_err(err)?.into())
    }

    fn __sub__(&self, other: &PyTensor) -> PyResult<PyTensor> {
        Ok(self.inner.try_sub(&other.inner).map_err(err)?.into())
    }

    fn scale(&self, s: C64) -> PyTensor {
        self.inner.scale(s).into()
    }

    /// Conjugate transpose `𝒜ᴴ`.
    fn transpose(&self) -> PyTensor {
        self.inner.ttranspose().into()
    }

    fn inverse(&self) -> PyResult<PyTensor> {
        Ok(self.inner.t_inverse().map_err(err)?.into())
    }

    fn mul_tube(&self, t: &PyTube) -> PyResult<PyTensor> {
        Ok(self.inner.mul_tube(&t.inner).map_err(err)?.into())
    }

    fn frob_norm(&self) -> f64 {
        self.inner.frob_norm()
    }

    /// Explicit block-circulant matrix as a list of rows.
    fn bcirc(&self) -> PyResult<Vec<Vec<C64>>> {
        let b = self.inner.bcirc_explicit().map_err(err)?;
        Ok((0..b.nrows()).map(|i| b.row(i).iter().copied().collect()).collect())
    }

    fn __repr__(&self) -> String {
        let (n, m, p) = self.inner.shape();
        format!("Tensor(shape=({n}, {m}, {p}))")
    }
}

/// A `1×1×p` tubular scalar.
#[pyclass(name = "Tube", module = "pytubal", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyTube {
    inner: tubal::Tubular,
}

impl From<tubal::Tubular> for PyTube {
    fn from(inner: tubal::Tubular) -> Self {
        PyTube { inner }
    }
}

#[pymethods]
impl PyTube {
    #[new]
    fn new(entries: Vec<C64>) -> PyResult<Self> {
        if entries.is_empty() {
            return Err(PyValueError::new_err("a tube needs at least one entry"));
        }
        Ok(tubal::Tubular::new(entries).into())
    }

    /// Tube with the given real Fourier components.
    #[staticmethod]
    fn from_fourier(components: Vec<f64>) -> PyResult<Self> {
        if components.is_empty() {
            return Err(PyValueError::new_err("a tube needs at least one component"));
        }
        Ok(tubal::Tubular::from_real_components(&components).into())
    }

    fn entries(&self) -> Vec<C64> {
        self.inner.entries().to_vec()
    }

    fn fourier_components(&self) -> Vec<C64> {
        self.inner.fourier_components()
    }

    fn __mul__(&self, other: &PyTube) -> PyResult<PyTube> {
        Ok(self.inner.tprod(&other.inner).map_err(err)?.into())
    }

    fn sqrt(&self) -> PyResult<PyTube> {
        Ok(self.inner.sqrt().map_err(err)?.into())
    }

    fn is_hpd(&self) -> bool {
        self.inner.is_hpd()
    }

    fn __repr__(&self) -> String {
        format!("Tube({:?})", self.inner.entries())
    }
}

/// All T-eigenvalues (eigenvalues of every Fourier slice).
#[pyfunction]
fn t_eigenvalues(a: &PyTensor) -> PyResult<Vec<C64>> {
    spectra::t_eigenvalues(&a.inner).map_err(err)
}

#[pyfunction]
fn t_spectral_radius(a: &PyTensor) -> PyResult<f64> {
    spectra::t_spectral_radius(&a.inner).map_err(err)
}

#[pyfunction]
fn tubular_spectral_radius(a: &PyTensor) -> PyResult<PyTube> {
    Ok(spectra::tubular_spectral_radius(&a.inner).map_err(err)?.into())
}

/// Aligned tubular eigenpairs as `(tube, eigentensor, residual)` triples.
#[pyfunction]
fn aligned_eigenpairs(a: &PyTensor) -> PyResult<Vec<(PyTube, PyTensor, f64)>> {
    Ok(spectra::aligned_eigenpairs(&a.inner)
        .map_err(err)?
        .into_iter()
        .map(|e| (e.lambda.into(), e.x.into(), e.residual))
        .collect())
}

/// `A = Qᴴ∗D∗Q` for Hermitian `A`; returns `(Q, D, ordered eigenvalue tubes)`.
#[pyfunction]
fn hermitian_decomposition(a: &PyTensor) -> PyResult<(PyTensor, PyTensor, Vec<PyTube>)> {
    let d = spectra::hermitian_decomposition(&a.inner).map_err(err)?;
    Ok((d.q.into(), d.d.into(), d.eigenvalues.into_iter().map(Into::into).collect()))
}

/// Step parameters `alpha_star`, `alpha_one` (tubes), `mu_star`, `mu_one`.
#[pyfunction]
fn step_parameters<'py>(py: Python<'py>, a: &PyTensor) -> PyResult<Bound<'py, PyDict>> {
    let s = solvers::normal_spectrum(&a.inner).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("alpha_star", PyTube::from(s.alpha_star().map_err(err)?))?;
    d.set_item("alpha_one", PyTube::from(s.alpha_one().map_err(err)?))?;
    d.set_item("mu_star", s.mu_star().map_err(err)?)?;
    d.set_item("mu_one", s.mu_one().map_err(err)?)?;
    Ok(d)
}

fn options(maxit: usize, tol: f64, x_star: Option<&PyTensor>) -> IterOptions {
    IterOptions {
        max_iterations: maxit,
        rel_residual_tol: tol,
        track_error_against: x_star.map(|x| x.inner.clone()),
        ..IterOptions::default()
    }
}

fn history_dict<'py>(py: Python<'py>, h: &ConvergenceHistory) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("delta", h.delta.clone())?;
    d.set_item("rel_error", h.rel_error.clone())?;
    d.set_item("seconds", h.seconds.clone())?;
    d.set_item("iterations", h.iterations())?;
    d.set_item("stop_reason", h.stop_reason.as_str())?;
    Ok(d)
}

/// Solves `A∗X = B` from `X₀ = 0`. `method` is `tr` (needs `alpha`),
/// `richardson` (needs `mu`), `tsd` or `sd`. Returns `(X, history)`.
#[pyfunction]
#[pyo3(signature = (method, a, b, alpha=None, mu=None, maxit=1000, tol=1e-8, x_star=None))]
#[allow(clippy::too_many_arguments)]
fn solve<'py>(
    py: Python<'py>,
    method: &str,
    a: &PyTensor,
    b: &PyTensor,
    alpha: Option<&PyTube>,
    mu: Option<f64>,
    maxit: usize,
    tol: f64,
    x_star: Option<&PyTensor>,
) -> PyResult<(PyTensor, Bound<'py, PyDict>)> {
    let (a, b) = (&a.inner, &b.inner);
    let x0 = tubal::Tensor3::zeros(a.m(), b.m(), a.p());
    let opts = options(maxit, tol, x_star);
    let out = match method.to_ascii_lowercase().as_str() {
        "tr" => {
            let alpha = alpha.ok_or_else(|| PyValueError::new_err("tr needs alpha"))?;
            solvers::richardson_tubular(a, b, &alpha.inner, &x0, &opts)
        }
        "richardson" => {
            let mu = mu.ok_or_else(|| PyValueError::new_err("richardson needs mu"))?;
            solvers::richardson_global(a, b, mu, &x0, &opts)
        }
        "tsd" => solvers::sd_tubular(a, b, &x0, &opts),
        "sd" => solvers::sd_global(a, b, &x0, &opts),
        other => return Err(PyValueError::new_err(format!("unknown method '{other}'"))),
    }
    .map_err(err)?;
    Ok((out.x.into(), history_dict(py, &out.history)?))
}

fn problem_tuple(p: ProblemInstance) -> (PyTensor, PyTensor, PyTensor) {
    (p.a.into(), p.x_star.into(), p.b.into())
}

/// Blur test problem; returns `(A, X_star, B)`.
#[pyfunction]
#[pyo3(signature = (n, band=7, sigma=4.0, seed=0))]
fn blur_problem(n: usize, band: usize, sigma: f64, seed: u64) -> PyResult<(PyTensor, PyTensor, PyTensor)> {
    Ok(problem_tuple(problems::blur_problem(n, band, sigma, seed).map_err(err)?))
}

/// Baart–prolate test problem; `solution` is `"random"` or `"ones"`.
#[pyfunction]
#[pyo3(signature = (n, w=0.46, seed=0, solution="random"))]
fn baart_prolate_problem(
    n: usize,
    w: f64,
    seed: u64,
    solution: &str,
) -> PyResult<(PyTensor, PyTensor, PyTensor)> {
    let kind: SolutionKind = solution.parse().map_err(err)?;
    Ok(problem_tuple(problems::baart_prolate_problem(n, w, seed, kind).map_err(err)?))
}

/// Runs a comma-separated method list (e.g. `"TR:alpha_star,SD"`) on a
/// problem and returns one summary dict per method.
#[pyfunction]
#[pyo3(signature = (a, b, x_star, methods, maxit=3000, tol=1e-8))]
fn sweep<'py>(
    py: Python<'py>,
    a: &PyTensor,
    b: &PyTensor,
    x_star: &PyTensor,
    methods: &str,
    maxit: usize,
    tol: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let methods = parse_methods(methods).map_err(err)?;
    let problem = ProblemInstance {
        a: a.inner.clone(),
        x_star: x_star.inner.clone(),
        b: b.inner.clone(),
        descriptor: problems::ProblemDescriptor {
            family: problems::Family::blur_default(),
            n: a.inner.n(),
            seed: 0,
            solution: SolutionKind::Random,
        },
    };
    let params = StepParameters::new(&problem.a).map_err(err)?;
    let opts = options(maxit, tol, None);
    methods
        .iter()
        .map(|m| {
            let run = run_method(m, &problem, &params, &opts, RelaxDirection::default()).map_err(err)?;
            let d = history_dict(py, &run.history)?;
            d.set_item("method", m.to_string())?;
            Ok(d)
        })
        .collect()
}

/// Runs a self-check suite; returns `(passed, [check lines])`.
#[pyfunction]
#[pyo3(signature = (suite, seed=7))]
fn run_suite(suite: &str, seed: u64) -> PyResult<(bool, Vec<String>)> {
    let suite: verify::Suite = suite.parse().map_err(err)?;
    let r = verify::run_suite(suite, seed).map_err(err)?;
    Ok((r.passed(), r.checks.iter().map(ToString::to_string).collect()))
}

#[pymodule]
fn pytubal(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}

/// Adds every class and function of the module to `m`.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTensor>()?;
    m.add_class::<PyTube>()?;
    m.add_function(wrap_pyfunction!(t_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(t_spectral_radius, m)?)?;
    m.add_function(wrap_pyfunction!(tubular_spectral_radius, m)?)?;
    m.add_function(wrap_pyfunction!(aligned_eigenpairs, m)?)?;
    m.add_function(wrap_pyfunction!(hermitian_decomposition, m)?)?;
    m.add_function(wrap_pyfunction!(step_parameters, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(blur_problem, m)?)?;
    m.add_function(wrap_pyfunction!(baart_prolate_problem, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
