use super::series::{un_table, working_precision};
use super::un::horner;
use super::{AmplificationResult, StabilityError, StabilityParams, CONVERGENCE_RTOL, DIVERGENCE_WINDOW};
use crate::numkernel::BigFloat;

/// Distance between compared terms in the divergence test.
const DIVERGENCE_STRIDE: usize = 4;

/// `U_n(x)` for `n = 0..=n_terms` (with `U_0 = 1`), at working precision.
pub(crate) fn milstein_values(x: f64, n_terms: u32, prec: u32) -> Result<Vec<BigFloat>, StabilityError> {
    let table = un_table(prec, n_terms)?;
    let x = BigFloat::from_f64(x, working_precision(prec));
    Ok(table[..=n_terms as usize].iter().map(|row| horner(row, &x)).collect())
}

/// Mean-square amplification of one Magnus-type Milstein step.
pub fn milstein_factor(params: &StabilityParams) -> Result<AmplificationResult, StabilityError> {
    let values = milstein_values(params.x(), params.n_terms(), params.precision())?;
    Ok(milstein_factor_from_values(params, &values))
}

pub(crate) fn milstein_factor_from_values(params: &StabilityParams, values: &[BigFloat]) -> AmplificationResult {
    let prec = params.precision();
    let wp = values[0].precision();
    let n_terms = params.n_terms();
    let t = BigFloat::from_f64(2.0 * params.q1(), wp);

    let mut partial = BigFloat::zero(wp);
    let mut t_pow = BigFloat::one(wp);
    let mut last = BigFloat::zero(wp);
    let mut mags: Vec<BigFloat> = Vec::with_capacity(n_terms as usize + 1);
    let mut growth_run = 0u32;
    for (n, v) in values[..=n_terms as usize].iter().enumerate() {
        let term = &t_pow * v;
        let mag = term.abs();
        // U_n(1) splits into four tracks by n mod 4, so neighbours are compared
        // within a track rather than across it.
        if n >= DIVERGENCE_STRIDE && mag > mags[n - DIVERGENCE_STRIDE] {
            growth_run += 1;
        } else {
            growth_run = 0;
        }
        partial += &term;
        mags.push(mag);
        last = term;
        t_pow *= &t;
    }
    // Only growth that persists up to the truncation counts; early transients
    // such as the rise of (2q₁)ⁿ/n! for n < 2q₁ are not divergence.
    let diverging = growth_run >= DIVERGENCE_WINDOW;

    let threshold = CONVERGENCE_RTOL * partial.to_f64().abs();
    let converged = !diverging
        && last.abs().to_f64() < threshold
        && milstein_majorant_tail(params.q1(), params.x(), n_terms).is_some_and(|b| b < threshold);

    let scale = BigFloat::from_f64(2.0 * params.p() - params.q1() * (1.0 + params.x()), wp).exp();
    AmplificationResult {
        factor: (scale * partial).with_prec(prec),
        terms_used: n_terms + 1,
        converged,
        diverging,
        true_stable: params.true_stable(),
    }
}

/// Upper bound on `Σ_{n>N} (2q₁)ⁿ |U_n(x)|`, or `None` when the bound is infinite.
///
/// Each `δ(n,k,l)` is dominated term by term using `s(m,k) <= tanᵐ(1)/cos(1)`
/// and `C(m,i)²/C(2m,2i) <= C(m,i)`, which gives
/// `|U_n(x)| <= (1/cos 1) Σ_k xᵏ cᵐ/m!` with `m = n − 2k`, `c = tan(1)(1+x)`.
/// Summed against `tⁿ = (2q₁)ⁿ` this is finite iff `t²x < 1`.
pub fn milstein_majorant_tail(q1: f64, x: f64, n_terms: u32) -> Option<f64> {
    const BITS: u32 = 64;
    let t = 2.0 * q1;
    let z = t * t * x;
    if z >= 1.0 {
        return None;
    }
    let one = BigFloat::one(BITS);
    let u = BigFloat::from_f64(t * (1.0 + x), BITS) * one.tan();
    let big_z = BigFloat::from_f64(z, BITS);

    // r[j] = Σ_{m>j} uᵐ/m! for j = 0..=N, via suffix sums of the series.
    let n = n_terms as usize;
    let mut terms = Vec::with_capacity(n + 64);
    let mut term = BigFloat::one(BITS);
    let e_u = u.exp();
    let mut m = 0usize;
    loop {
        terms.push(term.clone());
        m += 1;
        term = term * &u / BigFloat::from_i64(m as i64, BITS);
        if m > n && (term.clone() / &e_u) < 1e-40 {
            // remaining mass is below the geometric bound term · 2
            terms.push(term * 2.0);
            break;
        }
    }
    let mut suffix = vec![BigFloat::zero(BITS); terms.len() + 1];
    for i in (0..terms.len()).rev() {
        suffix[i] = &suffix[i + 1] + &terms[i];
    }

    let k_full = n_terms / 2 + 1;
    let mut total = BigFloat::zero(BITS);
    let mut z_pow = BigFloat::one(BITS);
    for k in 0..k_full {
        let j = (n_terms - 2 * k) as usize;
        total += &z_pow * &suffix[j + 1];
        z_pow *= &big_z;
    }
    total += e_u * z_pow / (1.0 - z);
    Some((total / one.cos()).to_f64())
}
