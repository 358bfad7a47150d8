//! Strong linearizations for matrix polynomials expressed in the Newton,
//! Lagrange and Chebyshev bases.
//!
//! The crate builds block minimal basis pencils for a matrix polynomial given
//! by its coefficients in one of the supported bases, solves the resulting
//! generalized eigenvalue problem with a dense desk-scale backend, and maps
//! eigenvectors, minimal bases and minimal indices of the pencil back to the
//! original polynomial.
//!
//! Module map:
//! - [`poly`]: matrix polynomial representations, evaluation, reversal and
//!   conversion to the monomial basis.
//! - [`polymat`]: arithmetic on monomial matrix polynomials (products,
//!   stacking, deflation, sampling).
//! - [`pencils`]: generic block minimal basis machinery (duality checks,
//!   minimality certificates, pencil assembly, body products).
//! - [`newton`], [`lagrange`], [`chebyshev`]: the three pencil families with
//!   colleague bodies, one-sided factorizations and recovery rules.
//! - [`spectral`]: dense generalized eigensolver, end-to-end solves,
//!   residuals, strong-linearization verification and nullspace extraction.
//! - [`interp`]: interpolation front ends turning sampled matrix functions
//!   into polynomials in each basis.
//! - [`config`]: every numerical tolerance used by the crate, in one record.

pub mod chebyshev;
pub mod config;
pub mod error;
pub mod interp;
pub mod la;
pub mod lagrange;
pub mod newton;
pub mod pencils;
pub mod poly;
pub mod polymat;
pub mod spectral;

pub use error::Error;
pub use la::mat::{CMat, C64};

/// Convenience result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
