//! Mean-square stability of the Magnus-type Euler and Milstein methods on the
//! noncommutative linear test equation
//! `dy = λ y dt + σ₁ diag(1,-1) y dW₁ + σ₂ [[0,1],[1,0]] y dW₂`.
//!
//! With `p = λh`, `qᵢ = σᵢ²h` and `x = q₂/q₁ ∈ [0, 1]` one step multiplies
//! `E‖y‖²` by
//!
//! * Euler: `e^{2p−q₁(1+x)} Σ_{n≥0} φ_E(n)`,
//! * Milstein: `e^{2p−q₁(1+x)} (1 + Σ_{n≥1} (2q₁)ⁿ U_n(x))`.
//!
//! Both series are evaluated truncated, in [`BigFloat`], from cached
//! coefficient tables.

mod euler;
mod milstein;
mod region;
mod series;
mod un;

use thiserror::Error;

use crate::moments::MomentError;
use crate::numkernel::{BigFloat, NumError, DEFAULT_PRECISION};

pub use euler::{euler_factor, euler_poly_coeffs, phi_e};
pub use milstein::{milstein_factor, milstein_majorant_tail};
pub use region::{region_scan, Method, RegionGrid, RegionPoint, REGION_CSV_HEADER};
pub use un::{lyapunov_un, phi_m_direct, un_coeffs, un_coeffs_float, un_eval, Lyapunov, UnPolynomial};

/// Default series truncation `N`.
pub const DEFAULT_TERMS: u32 = 256;

/// `U_n` coefficients are exact rationals up to this degree; above it they are
/// built in floating point.
pub const EXACT_UN_MAX_DEGREE: u32 = 64;

/// Relative size below which the last term (and tail bound) counts as converged.
pub const CONVERGENCE_RTOL: f64 = 1e-12;

/// Consecutive growing terms that flag a divergent series.
pub const DIVERGENCE_WINDOW: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    #[error("invalid stability parameters: {0}")]
    InvalidParams(String),
    #[error("U_n(1) = 0 for n = {0}; the logarithm is undefined")]
    ZeroAtOne(u32),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error(transparent)]
    Num(#[from] NumError),
}

/// A point `(p, q₁, x)` of the stability plane with the series truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityParams {
    p: f64,
    q1: f64,
    x: f64,
    n_terms: u32,
    precision: u32,
}

impl StabilityParams {
    /// `p = λh`, `q₁ = σ₁²h > 0`, `x = q₂/q₁ ∈ [0,1]`, `n_terms >= 1`.
    pub fn new(p: f64, q1: f64, x: f64, n_terms: u32) -> Result<Self, StabilityError> {
        if !p.is_finite() {
            return Err(StabilityError::InvalidParams(format!("p must be finite, got {p}")));
        }
        if !(q1 > 0.0) || !q1.is_finite() {
            return Err(StabilityError::InvalidParams(format!("q1 must be positive, got {q1}")));
        }
        if !(0.0..=1.0).contains(&x) {
            return Err(StabilityError::InvalidParams(format!("x must lie in [0, 1], got {x}")));
        }
        if n_terms == 0 {
            return Err(StabilityError::InvalidParams("n_terms must be positive".into()));
        }
        Ok(StabilityParams { p, q1, x, n_terms, precision: DEFAULT_PRECISION })
    }

    /// Parameters of the test equation with step `h`; noises are ordered so
    /// that `q₁ >= q₂`.
    pub fn from_sde(lambda: f64, sigma1: f64, sigma2: f64, h: f64, n_terms: u32) -> Result<Self, StabilityError> {
        let (a, b) = (sigma1 * sigma1 * h, sigma2 * sigma2 * h);
        let (q1, q2) = if a >= b { (a, b) } else { (b, a) };
        Self::new(lambda * h, q1, q2 / q1, n_terms)
    }

    pub fn with_precision(mut self, bits: u32) -> Result<Self, StabilityError> {
        if bits < crate::numkernel::MIN_PRECISION {
            return Err(StabilityError::InvalidParams(format!("precision {bits} is too small")));
        }
        self.precision = bits;
        Ok(self)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q1(&self) -> f64 {
        self.q1
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn n_terms(&self) -> u32 {
        self.n_terms
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Mean-square stability of the exact solution: `2p + q₁(1+x) < 0`.
    pub fn true_stable(&self) -> bool {
        2.0 * self.p + self.q1 * (1.0 + self.x) < 0.0
    }
}

/// One evaluated amplification factor.
#[derive(Debug, Clone)]
pub struct AmplificationResult {
    pub factor: BigFloat,
    pub terms_used: u32,
    pub converged: bool,
    pub diverging: bool,
    pub true_stable: bool,
}

impl AmplificationResult {
    /// `0 <= factor < 1` on a series that was not flagged divergent.
    pub fn method_stable(&self) -> bool {
        !self.diverging && !self.factor.is_sign_negative() && self.factor < 1.0
    }
}
