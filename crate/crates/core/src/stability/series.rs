//! Cached floating-point coefficient tables for the two stability series.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::Integer;

use super::un::{binomial_ratio, delta_prefactor, k_max, un_coeffs};
use super::{StabilityError, EXACT_UN_MAX_DEGREE};
use crate::numkernel::{bernoulli, factorial, BigFloat, Rational};

/// Extra bits carried while building and evaluating `U_n`. The alternating
/// `k`-sum loses only a handful of bits up to `n = 256` (measured against the
/// exact coefficients and a 768-bit rebuild), so this is generous.
pub(crate) const UN_GUARD_BITS: u32 = 32;

pub(crate) fn working_precision(prec: u32) -> u32 {
    prec + UN_GUARD_BITS
}

/// Row `n` holds the polynomial coefficients in `x`, lowest degree first.
pub(crate) type CoeffTable = Arc<Vec<Vec<BigFloat>>>;

type Cache = Mutex<HashMap<u32, CoeffTable>>;

fn euler_cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(Cache::default)
}

fn un_cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(Cache::default)
}

/// `E_n(x) = Σ_k C(n,k)/C(2n,2k) x^k / ((n−k)! k!)`, so that `φ_E(n) = (2q₁)ⁿ E_n(x)`.
pub(crate) fn euler_table(prec: u32, n_max: u32) -> CoeffTable {
    let mut cache = euler_cache().lock().unwrap_or_else(|e| e.into_inner());
    if let Some(t) = cache.get(&prec) {
        if t.len() > n_max as usize {
            return Arc::clone(t);
        }
    }
    let mut rows: Vec<Vec<BigFloat>> = cache.get(&prec).map(|t| t.as_ref().clone()).unwrap_or_default();
    for n in rows.len() as u32..=n_max {
        let row = (0..=n)
            .map(|k| {
                let c = super::euler::euler_coeff(n, k);
                BigFloat::from_rational(&c, prec)
            })
            .collect();
        rows.push(row);
    }
    let table = Arc::new(rows);
    cache.insert(prec, Arc::clone(&table));
    table
}

/// Row 0 is the constant `1` of the Milstein series; row `n >= 1` is `U_n`,
/// stored at [`working_precision`].
pub(crate) fn un_table(prec: u32, n_max: u32) -> Result<CoeffTable, StabilityError> {
    let mut cache = un_cache().lock().unwrap_or_else(|e| e.into_inner());
    if let Some(t) = cache.get(&prec) {
        if t.len() > n_max as usize {
            return Ok(Arc::clone(t));
        }
    }
    let wp = working_precision(prec);
    let mut rows: Vec<Vec<BigFloat>> = cache.get(&prec).map(|t| t.as_ref().clone()).unwrap_or_default();
    if rows.is_empty() {
        rows.push(vec![BigFloat::one(wp)]);
    }
    let start = rows.len() as u32;
    let exact_end = n_max.min(EXACT_UN_MAX_DEGREE);
    for n in start..=exact_end {
        let poly = un_coeffs(n)?;
        rows.push(poly.coeffs.iter().map(|c| BigFloat::from_rational(c, wp)).collect());
    }
    if n_max > EXACT_UN_MAX_DEGREE {
        let first = start.max(EXACT_UN_MAX_DEGREE + 1);
        rows.extend(float_un_rows(first, n_max, wp));
    }
    let table = Arc::new(rows);
    cache.insert(prec, Arc::clone(&table));
    Ok(table)
}

/// `U_first ..= U_last` computed entirely in floating point at `wp` bits.
///
/// `β(m,j)` is affine in `m`, the partition sums `s(m,k)` come from the
/// positive recursion `s(m,k) = (1/k) Σ_j β(m,j) s(m,k−j)`, and only the final
/// alternating sum over `k` loses precision.
pub(crate) fn float_un_rows(first: u32, last: u32, wp: u32) -> Vec<Vec<BigFloat>> {
    if first > last {
        return Vec::new();
    }
    let j_max = (last / 2).max(1);
    // β(m,j) = base_j + m · slope_j
    let mut base = Vec::with_capacity(j_max as usize);
    let mut slope = Vec::with_capacity(j_max as usize);
    for j in 1..=j_max {
        let b = bernoulli(2 * j as i64).expect("even index").abs();
        let p4 = Integer::from(1) << (2 * j);
        let scale = Rational::new(Integer::from(1) << (2 * j - 1), factorial(2 * j)).expect("nonzero") * b;
        base.push(BigFloat::from_rational(&(&scale * Rational::from(p4.clone() - 1u32)), wp));
        slope.push(BigFloat::from_rational(&(&scale * Rational::from(p4 - 2u32)), wp));
    }

    // s_table[m][k] for m + 2k <= last
    let mut s_table: Vec<Vec<BigFloat>> = Vec::with_capacity(last as usize + 1);
    for m in 0..=last {
        let k_top = (last - m) / 2;
        let m_f = BigFloat::from_i64(m as i64, wp);
        let betas: Vec<BigFloat> = (0..k_top as usize).map(|j| &base[j] + &(&slope[j] * &m_f)).collect();
        let mut row = vec![BigFloat::one(wp)];
        for k in 1..=k_top as usize {
            let mut acc = BigFloat::zero(wp);
            for j in 1..=k {
                acc += &betas[j - 1] * &row[k - j];
            }
            row.push(acc / BigFloat::from_i64(k as i64, wp));
        }
        s_table.push(row);
    }

    let ratio_rows: Vec<Vec<BigFloat>> = (0..=last)
        .map(|m| (0..=m).map(|i| BigFloat::from_rational(&binomial_ratio(m, i), wp)).collect())
        .collect();

    let mut out = Vec::with_capacity((last - first + 1) as usize);
    for n in first..=last {
        let mut coeffs = vec![BigFloat::zero(wp); n as usize + 1];
        for k in 0..=k_max(n) {
            let m = n - 2 * k;
            let pref = BigFloat::from_rational(&delta_prefactor(n, k), wp) * &s_table[m as usize][k as usize];
            for (i, r) in ratio_rows[m as usize].iter().enumerate() {
                coeffs[k as usize + i] += &pref * r;
            }
        }
        out.push(coeffs);
    }
    out
}

