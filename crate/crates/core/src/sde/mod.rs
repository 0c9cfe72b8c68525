//! Magnus-type integrators for semilinear SDEs
//! `dy = (F₀y + g₀(y)) dt + Σ_j (F_j y + g_j(y)) dW_j` (Itô), their noise
//! inputs, and the noncommutative two-noise test system.

mod expm;
mod noise;
mod step;
mod system;

use thiserror::Error;

pub use expm::expm;
pub(crate) use expm::expm2_raw;
pub use noise::{sample_increments, sample_levy_kp, sample_levy_subdiv, LevySampler, NoiseDraw, StreamRng};
pub use step::{classical_milstein_step, magnus_euler_step, magnus_milstein_step, omega, MagnusOrder};
pub use system::{ms_stable_true, JacobianFn, SemilinearSystem, TestSdeParams, VectorFn};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SdeError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    Dimension { what: &'static str, expected: usize, found: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
}

pub(crate) fn check_dim(what: &'static str, expected: usize, found: usize) -> Result<(), SdeError> {
    if expected == found {
        Ok(())
    } else {
        Err(SdeError::Dimension { what, expected, found })
    }
}
