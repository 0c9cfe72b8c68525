//! Exact arithmetic kernel.
//!
//! [`Rational`] carries every exact quantity in the crate (Bernoulli numbers,
//! partition sums, moments, stability polynomial coefficients). [`BigFloat`]
//! is the multiple-precision float used where transcendental functions or
//! very long sums appear.

mod bernoulli;
mod bigfloat;
mod combinatorics;
mod rational;

pub use bernoulli::bernoulli;
pub use bigfloat::{BigFloat, DEFAULT_PRECISION, MIN_PRECISION};
pub use combinatorics::{binomial, factorial, odd_double_factorial};
pub use rational::Rational;

pub use rug::Integer;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse {0:?} as a number")]
    Parse(String),
}
