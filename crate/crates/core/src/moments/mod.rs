//! Exact moments `γ(n,k,l) = E[ΔW₁^{2n} A₁₂^{2k} ΔW₂^{2l}]` over the unit
//! interval, where `A₁₂` is the Lévy area of two independent Wiener processes.
//!
//! Only even exponents are representable: any monomial with an odd exponent
//! on `ΔW₁`, `ΔW₂` or `A₁₂` has expectation zero, so [`GammaIndex`] stores the
//! half-exponents.
//!
//! `γ(n,k,0)` is available through three independent routes ([`Backend`]):
//! the derivative recursion for `r_n(x) = (tanh x / x)^n / cosh x` at zero,
//! the partition sums `s(n,k)`, and the Taylor coefficients of the generating
//! function `M_{n,L}(θ)`. Everything else reduces to `γ(n,k,0)`.

mod bounds;
mod coefficients;
mod functions;
mod gamma;

use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use thiserror::Error;

use crate::numkernel::{BigFloat, NumError, Rational};

pub use bounds::{gamma_bound, mgf_eval, s_bound};
pub use functions::{r_eval, v_eval};
pub use gamma::{gamma, gamma_nk0, gamma_with, mixed_moment_i, scale_to_step};

/// Default cap on `n + 2k` (after folding `l` into `n`) for exact computation.
pub const DEFAULT_MAX_ORDER: u32 = 600;

/// Partition enumeration is only used up to this `k`; larger `k` falls back
/// to the dynamic program.
pub const EXPLICIT_ENUMERATION_MAX_K: u32 = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MomentError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("order n + 2k = {order} exceeds the configured limit {limit}")]
    ResourceLimit { order: u64, limit: u32 },
    #[error(transparent)]
    Num(#[from] NumError),
}

/// Half-exponents `(n, k, l)` of the monomial `ΔW₁^{2n} A₁₂^{2k} ΔW₂^{2l}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GammaIndex {
    pub n: u32,
    pub k: u32,
    pub l: u32,
}

impl GammaIndex {
    pub const fn new(n: u32, k: u32, l: u32) -> Self {
        GammaIndex { n, k, l }
    }

    /// Total degree in `h` when the step is `[t, t+h]`: `n + 2k + l`.
    pub fn h_degree(&self) -> u32 {
        self.n + 2 * self.k + self.l
    }

    pub fn swapped(&self) -> Self {
        GammaIndex::new(self.l, self.k, self.n)
    }
}

impl fmt::Display for GammaIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n, self.k, self.l)
    }
}

/// Which formula produces `γ(n,k,0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    /// Recursion for the even derivatives of `r_n` at zero.
    Recursive,
    /// Explicit partition sum `s(n,k)` (enumerated for small `k`).
    Explicit,
    /// `k`-th Taylor coefficient of `M_{n,k}(θ)` via the Leibniz recursion.
    #[default]
    Mgf,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Recursive, Backend::Explicit, Backend::Mgf];
}

type Table = RwLock<HashMap<u32, Vec<Rational>>>;

/// Memo tables for every exact quantity in this module.
///
/// Safe for concurrent use: lookups take a read lock; growing a table takes
/// the write lock for that table only.
pub struct MomentEngine {
    max_order: u32,
    beta: Table,
    s: Table,
    r_deriv: Table,
    mgf: RwLock<HashMap<(u32, u32), Vec<Rational>>>,
    gamma_nk0: RwLock<HashMap<(u32, u32), Rational>>,
}

impl MomentEngine {
    pub fn new(max_order: u32) -> Self {
        MomentEngine {
            max_order,
            beta: Table::default(),
            s: Table::default(),
            r_deriv: Table::default(),
            mgf: RwLock::default(),
            gamma_nk0: RwLock::default(),
        }
    }

    /// Process-wide engine with [`DEFAULT_MAX_ORDER`].
    pub fn global() -> &'static MomentEngine {
        static GLOBAL: OnceLock<MomentEngine> = OnceLock::new();
        GLOBAL.get_or_init(|| MomentEngine::new(DEFAULT_MAX_ORDER))
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    fn check_order(&self, n: u32, k: u32) -> Result<(), MomentError> {
        let order = n as u64 + 2 * k as u64;
        if order > self.max_order as u64 {
            return Err(MomentError::ResourceLimit { order, limit: self.max_order });
        }
        Ok(())
    }
}

impl Default for MomentEngine {
    fn default() -> Self {
        MomentEngine::new(DEFAULT_MAX_ORDER)
    }
}

/// Reads `table[key][index]`, first growing the row with `next` until it is
/// long enough. `next` receives the row built so far.
fn cached_row_entry<K, F>(
    table: &RwLock<HashMap<K, Vec<Rational>>>,
    key: K,
    index: usize,
    mut next: F,
) -> Result<Rational, MomentError>
where
    K: std::hash::Hash + Eq + Copy,
    F: FnMut(&[Rational]) -> Result<Rational, MomentError>,
{
    {
        let guard = table.read().unwrap_or_else(|e| e.into_inner());
        if let Some(v) = guard.get(&key).and_then(|row| row.get(index)) {
            return Ok(v.clone());
        }
    }
    let mut guard = table.write().unwrap_or_else(|e| e.into_inner());
    let row = guard.entry(key).or_default();
    while row.len() <= index {
        let v = next(row)?;
        row.push(v);
    }
    Ok(row[index].clone())
}

// Convenience wrappers over the global engine.

/// `β(n,j) = 2^{2j-1} |B_{2j}| {(2^{2j}-1)(n+1) - n} / (2j)!` for `j >= 1`.
pub fn beta(n: u32, j: u32) -> Result<Rational, MomentError> {
    MomentEngine::global().beta(n, j)
}

/// `d^order r_n / dx^order` at `x = 0`.
pub fn r_deriv_at_zero(n: u32, order: u32) -> Result<Rational, MomentError> {
    MomentEngine::global().r_deriv_at_zero(n, order)
}

/// Truncated partition sum `ŝ_{n,L}(k)` (parts no larger than `L`).
pub fn s_hat(n: u32, big_l: u32, k: u32) -> Result<Rational, MomentError> {
    MomentEngine::global().s_hat(n, big_l, k)
}

/// Full partition sum `s(n,k) = ŝ_{n,k}(k)`.
pub fn s(n: u32, k: u32) -> Result<Rational, MomentError> {
    MomentEngine::global().s(n, k)
}

/// `s(n,k)` by enumerating every partition of `k`; exponential in `k`.
pub fn s_by_partitions(n: u32, k: u32) -> Result<Rational, MomentError> {
    MomentEngine::global().s_by_partitions(n, k)
}

/// `d^k M_{n,L} / dθ^k` at `θ = 0`.
pub fn mgf_deriv(n: u32, big_l: u32, k: u32) -> Result<Rational, MomentError> {
    MomentEngine::global().mgf_deriv(n, big_l, k)
}

pub(crate) fn bigfloat_of(r: &Rational, prec: u32) -> BigFloat {
    BigFloat::from_rational(r, prec)
}
