//! Third-order tensor algebra under the T-product.
//!
//! Tensors are multiplied through their frontal slices in the Fourier domain
//! along the third mode. On top of the product sit tubular scalars
//! ([`Tubular`]), spectral decompositions built slice by slice
//! ([`spectra`]), and iterative solvers for `𝒜 ∗ 𝒳 = ℬ` in tubular and
//! global form ([`solvers`]).

pub mod error;
pub mod experiment;
pub mod fourier;
pub mod io;
pub mod problems;
pub mod random;
pub mod solvers;
pub mod spectra;
pub mod tensor;
pub mod tubal;
pub mod verify;

pub use error::{Error, Result};
pub use fourier::FourierSlices;
pub use tensor::{Tensor3, C64};
pub use tubal::{Tubular, TubularOrder};
