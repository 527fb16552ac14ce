use num_complex::Complex64;
use thiserror::Error;

use crate::solvers::SolveOutcome;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {detail}")]
    Shape { op: &'static str, detail: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular tubular tensor: Fourier components {}", format_components(.components))]
    Singular { components: Vec<(usize, f64)> },

    #[error("function undefined at Fourier component {index} (value {value})")]
    Domain { index: usize, value: Complex64 },

    #[error("tubular tensor is not Hermitian positive definite (failing components {failing:?})")]
    NotHpd { failing: Vec<usize> },

    #[error("{what} is not Hermitian (residual {residual:.3e})")]
    NotHermitian { what: &'static str, residual: f64 },

    #[error("eigensolver failed on Fourier slice {slice}")]
    Eigensolver { slice: usize },

    #[error("selection index {index} out of range on Fourier slice {slice} (n = {n})")]
    SelectionOutOfRange { slice: usize, index: usize, n: usize },

    #[error("enumerating {count} tubular eigenvalues exceeds the limit of {limit}")]
    EnumerationTooLarge { count: f64, limit: usize },

    #[error("explicit block-circulant matrix would hold {entries} entries (limit {limit})")]
    OracleTooLarge { entries: usize, limit: usize },

    #[error("tubular spectral radius component {component} is {value:.6} (must be < 1)")]
    SpectralRadiusNotLessThanOne { component: usize, value: f64 },

    #[error("singular Galerkin system{}", .slice.map(|s| format!(" on Fourier slice {s}")).unwrap_or_default())]
    SingularGalerkin { slice: Option<usize> },

    #[error(
        "singular step at iteration {iteration}: Fourier component {component} of the step denominator is {magnitude:.3e}"
    )]
    SingularStep {
        iteration: usize,
        component: usize,
        magnitude: f64,
        partial: Box<SolveOutcome>,
    },

    #[error("precondition of {check} violated: {detail}")]
    Precondition { check: &'static str, detail: String },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_components(components: &[(usize, f64)]) -> String {
    components
        .iter()
        .map(|(i, m)| format!("#{i} (|d| = {m:.3e})"))
        .collect::<Vec<_>>()
        .join(", ")
}

pub(crate) fn shape_error(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Shape {
        op,
        detail: detail.into(),
    }
}
