//! Dense complex linear algebra kernel: matrices, LU, one-sided Jacobi SVD,
//! a Schur-based eigensolver and the generalized eigenvalue reduction.
//!
//! Desk scale only. Everything is column-pivot-free row-major storage with
//! `Complex<f64>` entries.

pub mod eig;
pub mod gep;
pub mod lu;
pub mod mat;
pub mod svd;
