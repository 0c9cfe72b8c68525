use rug::Integer;

use super::series::{euler_table, working_precision};
use super::{AmplificationResult, StabilityParams, CONVERGENCE_RTOL};
use crate::numkernel::{binomial, factorial, BigFloat, Rational};

/// `C(n,k)/C(2n,2k) / ((n−k)! k!)`.
pub(crate) fn euler_coeff(n: u32, k: u32) -> Rational {
    let num = binomial(n, k).expect("k <= n");
    let den = binomial(2 * n, 2 * k).expect("2k <= 2n") * factorial(n - k) * factorial(k);
    Rational::new(num, den).expect("nonzero")
}

/// Coefficients of `E_n(x)` with `φ_E(n) = (2q₁)ⁿ E_n(q₂/q₁)`.
pub fn euler_poly_coeffs(n: u32) -> Vec<Rational> {
    (0..=n).map(|k| euler_coeff(n, k)).collect()
}

/// `φ_E(n) = 2ⁿ Σ_k C(n,k)/C(2n,2k) · q₁^{n−k} q₂^k / ((n−k)! k!)`, exactly.
pub fn phi_e(n: u32, q1: &Rational, q2: &Rational) -> Rational {
    let mut total = Rational::zero();
    for k in 0..=n {
        let q1_pow = q1.pow((n - k) as i32).expect("nonnegative exponent");
        let q2_pow = q2.pow(k as i32).expect("nonnegative exponent");
        total += euler_coeff(n, k) * q1_pow * q2_pow;
    }
    total.mul_int(&(Integer::from(1) << n))
}

/// `E_n(x)` for `n = 0..=n_terms`, at working precision.
pub(crate) fn euler_values(x: f64, n_terms: u32, prec: u32) -> Vec<BigFloat> {
    let wp = working_precision(prec);
    let table = euler_table(wp, n_terms);
    let x = BigFloat::from_f64(x, wp);
    table[..=n_terms as usize].iter().map(|row| super::un::horner(row, &x)).collect()
}

/// Mean-square amplification of one Magnus-type Euler step.
pub fn euler_factor(params: &StabilityParams) -> AmplificationResult {
    let values = euler_values(params.x(), params.n_terms(), params.precision());
    euler_factor_from_values(params, &values)
}

pub(crate) fn euler_factor_from_values(params: &StabilityParams, values: &[BigFloat]) -> AmplificationResult {
    let prec = params.precision();
    let wp = values[0].precision();
    let n_terms = params.n_terms();
    let t = BigFloat::from_f64(2.0 * params.q1(), wp);

    let mut partial = BigFloat::zero(wp);
    let mut t_pow = BigFloat::one(wp);
    for v in &values[..=n_terms as usize] {
        partial += &t_pow * v;
        t_pow *= &t;
    }

    // E_n(x) <= (1+x)ⁿ/n!, so the tail is at most e^u − Σ_{n≤N} uⁿ/n!.
    let u = BigFloat::from_f64(2.0 * params.q1() * (1.0 + params.x()), wp);
    let mut head = BigFloat::zero(wp);
    let mut term = BigFloat::one(wp);
    for n in 0..=n_terms {
        head += &term;
        term = term * &u / BigFloat::from_i64(n as i64 + 1, wp);
    }
    let tail = (u.exp() - head).max(BigFloat::zero(wp));
    let converged = tail.to_f64() <= CONVERGENCE_RTOL * partial.to_f64();

    let scale = BigFloat::from_f64(2.0 * params.p() - params.q1() * (1.0 + params.x()), wp).exp();
    AmplificationResult {
        factor: (scale * partial).with_prec(prec),
        terms_used: n_terms + 1,
        converged,
        diverging: false,
        true_stable: params.true_stable(),
    }
}
