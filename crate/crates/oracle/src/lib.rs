//! Reference computations that share no code with the closed forms in
//! `nief-core`: direct solves of the density-matrix equations, adaptive
//! quadrature, 6j symbols by summing products of 3j symbols, and an
//! independent evaluation of the continuum-structure ratios.
//!
//! Only the parameter types of `nief-core` are used here.

pub mod angular;
pub mod density;
pub mod lics;
pub mod linear;
pub mod quadrature;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("matrix is ill conditioned (1-norm condition estimate {cond:e})")]
    IllConditioned { cond: f64 },
    #[error("solve residual {residual:e} exceeds the bound")]
    ResidualTooLarge { residual: f64 },
    #[error("quadrature error estimate {error:e} above tolerance {tol:e} (value {value})")]
    ToleranceNotMet { value: f64, error: f64, tol: f64 },
    #[error("{value} is not a nonnegative half-integer")]
    NonHalfInteger { value: f64 },
    #[error("bad input: {0}")]
    Input(&'static str),
}

pub type Result<T, E = OracleError> = std::result::Result<T, E>;
