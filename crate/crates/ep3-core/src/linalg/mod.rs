//! Dense complex linear algebra for small matrices (dimension <= 16).
//!
//! Everything here is sized for the matrices that arise in exceptional-point
//! analysis: characteristic polynomials via a Faddeev-LeVerrier recurrence,
//! simultaneous root iteration, rank-revealing kernels, pivoted solves, and
//! an eigensolver with degeneracy clustering built on top of those pieces.

mod eigen;
mod factor;
mod matrix;
mod poly;

pub use eigen::{eig, Cluster, EigVector, Spectrum, CLUSTER_TOL_DEFAULT, RANK_TOL_DEFAULT, SELF_ORTH_GUARD};
pub use factor::{null_space, solve_linear, LinearSolution};

pub(crate) use eigen::sign_gauge;
pub(crate) use factor::Qrcp;
pub use matrix::{c_dot, ComplexMatrix, ComplexVector};
pub use poly::{char_poly, poly_roots, Polynomial};

/// Hard cap on matrix dimension accepted by the spectral routines.
pub const MAX_DIM: usize = 16;
