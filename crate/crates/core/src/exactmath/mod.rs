//! Exact arithmetic: rationals, sparse multivariate polynomials and
//! polynomial matrices. Nothing in the crate uses floating point.

mod matrix;
mod poly;
mod rational;

pub use matrix::PolyMatrix;
pub use poly::{Monomial, Poly, PolyDisplay, MAX_EXPONENT, MAX_VARS};
pub use rational::{ParseRationalError, Rational};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MathError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("variable index {index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
}
