//! Monte Carlo harness: second-moment tables, strong-error tables, moment
//! estimates with batch standard errors, and order fitting.
//!
//! Every path owns a [`StreamRng`] keyed by `(batch, path)`, and reductions
//! are pairwise sums in path order, so results do not depend on the number
//! of worker threads.

mod estimate;
mod gamma_mc;
mod output;
mod plan;
mod tables;

use thiserror::Error;

use crate::sde::SdeError;
use crate::stability::StabilityError;

pub use estimate::{fit_order, pairwise_sum, MomentEstimate};
pub use gamma_mc::{estimate_gamma_mc, estimate_gamma_mc_many};
pub use output::{estimates_to_csv, estimates_to_json, format_real};
pub use plan::{PlanSystem, Scheme, SimulationPlan};
pub use tables::{
    rare_event_warning, second_moment, second_moment_table, strong_error_table, ErrorMetric, StrongErrorRow,
    StrongErrorTable,
};

/// Environment variable that caps the worker count.
pub const THREADS_ENV: &str = "STOCHMOMENTS_THREADS";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum McError {
    #[error("invalid simulation plan: {0}")]
    InvalidPlan(String),
    #[error("step {h} is not an integer multiple of the reference step {reference_h}")]
    IndivisibleStep { h: f64, reference_h: f64 },
    #[error("order fit needs at least two positive points: {0}")]
    Fit(String),
    #[error(transparent)]
    Sde(#[from] SdeError),
    #[error(transparent)]
    Stability(#[from] StabilityError),
}

/// Size the global rayon pool from `STOCHMOMENTS_THREADS` if it is set.
/// Returns the configured count; later calls are no-ops.
pub fn configure_threads_from_env() -> Option<usize> {
    let n = std::env::var(THREADS_ENV).ok()?.trim().parse::<usize>().ok().filter(|n| *n > 0)?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok()?;
    Some(n)
}

/// `round(a / b)` if `a / b` is within `1e-9` of a positive integer.
pub(crate) fn whole_ratio(a: f64, b: f64) -> Option<u64> {
    let r = a / b;
    let n = r.round();
    (n >= 1.0 && (r - n).abs() <= 1e-9 * n).then_some(n as u64)
}
