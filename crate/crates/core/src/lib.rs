//! Exact mixed moments of Wiener increments and the Lévy stochastic area,
//! mean-square stability analysis of Magnus-type SDE integrators built on
//! them, and a Monte Carlo harness that checks both.
//!
//! * [`numkernel`]: exact rationals, multiple-precision floats, Bernoulli numbers.
//! * [`moments`]: `γ(n,k,l) = E[ΔW₁^{2n} A₁₂^{2k} ΔW₂^{2l}]` via three independent
//!   formula backends, bounds, and mixed moments of iterated Itô integrals.
//! * [`stability`]: mean-square amplification factors of the Magnus-type
//!   Euler and Milstein methods on the noncommutative linear test equation.
//! * [`sde`]: Magnus-type steppers, Lévy-area samplers, matrix exponentials.
//! * [`mc`]: strong-error and second-moment tables, moment estimation.

pub mod numkernel;
pub mod moments;
pub mod stability;
pub mod sde;
pub mod mc;

pub use numkernel::{BigFloat, Rational};
