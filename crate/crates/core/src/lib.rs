//! Numerical toolkit for the modified Hilbert transformation `H_T` on
//! `(0, T)` and its Galerkin discretisation by piecewise polynomials.

pub mod analysis;
pub mod assembly;
pub mod error;
pub mod fem;
pub mod fourier;
pub mod func;
pub mod linalg;
pub mod quad;
pub mod reference;
pub mod specfun;
pub mod study;

pub use error::{Error, Result};
