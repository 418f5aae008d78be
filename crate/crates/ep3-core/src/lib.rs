//! Spectral analysis around exceptional points of complex symmetric matrices.
//!
//! The crate provides dense complex linear algebra for small matrices,
//! Jordan-chain construction and normalization at defective eigenvalues,
//! classification of the leading Puiseux behaviour of linearly perturbed
//! spectra, eigenvalue/eigenvector continuation around closed parameter
//! loops with monodromy and geometric-phase extraction, and a Newton-based
//! locator for exceptional points of matrix families.
//!
//! The core is `no_std`-compatible (with `alloc`); file formats and the
//! command line live in the companion `ep3-atlas` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod epfind;
pub mod error;
pub mod jordan;
pub mod linalg;
pub mod models;
pub mod puiseux;
pub mod tracking;

pub use num_complex::Complex64;

pub use error::CoreError;
pub use linalg::{ComplexMatrix, ComplexVector, Polynomial, Spectrum};
