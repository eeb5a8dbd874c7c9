//! Exact and multiprecision scalar and polynomial arithmetic.
//!
//! Everything algebraic is done over Gaussian rationals; floating point only
//! appears when a polynomial is evaluated or handed to the root finder.

mod bigcomplex;
mod gaussian;
mod polynomial;

use rug::Integer;
use thiserror::Error;

pub(crate) use bigcomplex::Scratch;
pub use bigcomplex::{BigComplex, MIN_PRECISION};
pub use gaussian::{parse_rational, rational_to_string, GaussianRational};
pub use polynomial::{NumericPolynomial, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("argument scale must be nonzero")]
    InvalidScale,
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse exact rational from {0:?}")]
    Parse(String),
}

/// `m(m−1)…(m−j+1)`, the coefficient `D^j` produces from `z^m`.
pub fn falling_factorial(m: u64, j: u64) -> Integer {
    polynomial::falling_factorial_impl(m, j)
}
