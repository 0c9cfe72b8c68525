use rug::Integer;

use super::series::{un_table, working_precision};
use super::StabilityError;
use crate::moments::{GammaIndex, MomentEngine};
use crate::numkernel::{binomial, factorial, BigFloat, Rational};

/// `U_n(x) = Σ_l a(n,l) x^l` with exact coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct UnPolynomial {
    pub degree: u32,
    pub coeffs: Vec<Rational>,
}

impl UnPolynomial {
    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_float(&self, x: &BigFloat) -> BigFloat {
        let prec = x.precision();
        self.coeffs
            .iter()
            .rev()
            .fold(BigFloat::zero(prec), |acc, c| acc * x + BigFloat::from_rational(c, prec))
    }
}

/// Upper summation limit `ñ` over `k`: `r − 1` for `n = 2r`, `r` for `n = 2r + 1`.
pub(crate) fn k_max(n: u32) -> u32 {
    if n % 2 == 0 {
        (n / 2).saturating_sub(1)
    } else {
        n / 2
    }
}

/// `C(m,i)² / C(2m,2i)`.
pub(crate) fn binomial_ratio(m: u32, i: u32) -> Rational {
    let c = binomial(m, i).expect("i <= m");
    Rational::new(c.clone() * c, binomial(2 * m, 2 * i).expect("2i <= 2m")).expect("nonzero")
}

/// The `k`-dependent part of `δ(n,k,l)`:
/// `(−1)^k (n−2k)/(n−k) · C(n−k,k)/C(2(n−k),2k) / (n−2k)!`, without `s(n−2k,k)`.
pub(crate) fn delta_prefactor(n: u32, k: u32) -> Rational {
    let m = n - 2 * k;
    let num = Integer::from(m) * binomial(n - k, k).expect("k <= n-k");
    let den = Integer::from(n - k) * binomial(2 * (n - k), 2 * k).expect("2k <= 2(n-k)") * factorial(m);
    let r = Rational::new(num, den).expect("nonzero");
    if k % 2 == 1 {
        -r
    } else {
        r
    }
}

/// Exact coefficients `a(n,0..=n)` of `U_n`.
pub fn un_coeffs(n: u32) -> Result<UnPolynomial, StabilityError> {
    if n == 0 {
        return Err(StabilityError::InvalidParams("U_n is defined for n >= 1".into()));
    }
    let engine = MomentEngine::global();
    let mut coeffs = vec![Rational::zero(); n as usize + 1];
    for k in 0..=k_max(n) {
        let m = n - 2 * k;
        let pref = delta_prefactor(n, k) * engine.s(m, k)?;
        for i in 0..=m {
            coeffs[(k + i) as usize] += &pref * binomial_ratio(m, i);
        }
    }
    Ok(UnPolynomial { degree: n, coeffs })
}

/// Coefficients of `U_n` rounded to `prec` bits. Exact up to
/// [`super::EXACT_UN_MAX_DEGREE`], floating point with guard bits above.
pub fn un_coeffs_float(n: u32, prec: u32) -> Result<Vec<BigFloat>, StabilityError> {
    if n == 0 {
        return Err(StabilityError::InvalidParams("U_n is defined for n >= 1".into()));
    }
    let table = un_table(prec, n)?;
    Ok(table[n as usize].iter().map(|c| c.clone().with_prec(prec)).collect())
}

/// `U_n(x)` by Horner's rule at `prec` bits.
pub fn un_eval(n: u32, x: f64, prec: u32) -> Result<BigFloat, StabilityError> {
    if n == 0 {
        return Err(StabilityError::InvalidParams("U_n is defined for n >= 1".into()));
    }
    let table = un_table(prec, n)?;
    let wp = working_precision(prec);
    let x = BigFloat::from_f64(x, wp);
    let v = horner(&table[n as usize], &x);
    Ok(v.with_prec(prec))
}

pub(crate) fn horner(coeffs: &[BigFloat], x: &BigFloat) -> BigFloat {
    let mut acc = BigFloat::zero(x.precision());
    for c in coeffs.iter().rev() {
        acc *= x;
        acc += c;
    }
    acc
}

/// `(1/n) ln|U_n(1)|` together with the sign of `U_n(1)`.
#[derive(Debug, Clone)]
pub struct Lyapunov {
    pub n: u32,
    pub value: BigFloat,
    pub positive: bool,
}

pub fn lyapunov_un(n: u32, prec: u32) -> Result<Lyapunov, StabilityError> {
    let u = un_eval(n, 1.0, prec)?;
    if u.is_zero() {
        return Err(StabilityError::ZeroAtOne(n));
    }
    let positive = !u.is_sign_negative();
    let value = u.abs().ln() / BigFloat::from_i64(n as i64, prec);
    Ok(Lyapunov { n, value, positive })
}

/// `φ_M(n)` assembled directly from the moments `γ`, for exact `q₁, q₂`.
/// Independent of the `U_n` coefficient construction; `φ_M(n) = (2q₁)ⁿ U_n(q₂/q₁)`.
pub fn phi_m_direct(n: u32, q1: &Rational, q2: &Rational) -> Result<Rational, StabilityError> {
    let engine = MomentEngine::global();
    let mut total = Rational::zero();
    for k in 0..=k_max(n) {
        let m = n - 2 * k;
        let outer = Rational::new(
            (Integer::from(1) << (2 * (n - k))) * Integer::from(m) * binomial(n - k, k)?,
            factorial(2 * (n - k)) * Integer::from(n - k),
        )?;
        let mut inner = Rational::zero();
        for l in k..=(n - k) {
            let g = engine.gamma(GammaIndex::new(n - k - l, k, l - k))?;
            let weight = Rational::from(binomial(m, l - k)?);
            inner += weight * q1.pow((n - l) as i32)? * q2.pow(l as i32)? * g;
        }
        let term = outer * inner;
        if k % 2 == 1 {
            total -= term;
        } else {
            total += term;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn first_four_polynomials() {
        assert_eq!(un_coeffs(1).unwrap().coeffs, vec![q(1, 1), q(1, 1)]);
        assert_eq!(un_coeffs(2).unwrap().coeffs, vec![q(1, 2), q(1, 3), q(1, 2)]);
        // The published display of U₃ has −17/180; both the δ sum and the
        // closed-form oracle below give −7/180.
        assert_eq!(
            un_coeffs(3).unwrap().coeffs,
            vec![q(1, 6), q(-7, 180), q(-7, 180), q(1, 6)]
        );
        assert_eq!(
            un_coeffs(4).unwrap().coeffs,
            vec![q(1, 24), q(-17, 315), q(-23, 756), q(-17, 315), q(1, 24)]
        );
        assert!(un_coeffs(0).is_err());
    }

    #[test]
    fn values_at_one() {
        assert_eq!(un_coeffs(1).unwrap().eval(&q(1, 1)), q(2, 1));
        assert_eq!(un_coeffs(2).unwrap().eval(&q(1, 1)), q(4, 3));
        assert_eq!(un_coeffs(3).unwrap().eval(&q(1, 1)), q(23, 90));
        assert!((un_eval(3, 1.0, 256).unwrap().to_f64() - 23.0 / 90.0).abs() < 1e-15);
    }

    #[test]
    fn constant_term_is_inverse_factorial() {
        for n in 1..=20u32 {
            let a = un_coeffs(n).unwrap();
            assert_eq!(a.coeffs[0], Rational::new(1, factorial(n)).unwrap());
        }
    }

    #[test]
    fn agrees_with_direct_moment_sum() {
        let xs = [q(0, 1), q(1, 4), q(1, 2), q(1, 1)];
        let q1 = q(3, 7);
        for n in 1..=10u32 {
            let u = un_coeffs(n).unwrap();
            for x in &xs {
                let q2 = &q1 * x;
                let lhs = (&q1 * q(2, 1)).pow(n as i32).unwrap() * u.eval(x);
                assert_eq!(lhs, phi_m_direct(n, &q1, &q2).unwrap(), "n={n} x={x}");
            }
        }
    }

    /// `φ_M(n)` from the closed form of the step: the noise part of `Ω^[2]`
    /// squares to `D·I` with `D = a² + b² − c²`, so the factor's series is
    /// `1 + Σ_j 4^j/(2j)! E[D^{j−1}(a² + b²)]`; collect total degree `n` in `q`.
    fn phi_m_from_step(n: u32, q1: &Rational, q2: &Rational) -> Rational {
        let engine = MomentEngine::global();
        let mut total = Rational::zero();
        for j in (n / 2 + 1)..=n {
            let u = n - j;
            let rs = 2 * j - 1 - n;
            let lead = Rational::new(Integer::from(1) << (2 * j), factorial(2 * j)).unwrap();
            for r in 0..=rs {
                let s_ = rs - r;
                let multinom = Rational::new(factorial(j - 1), factorial(r) * factorial(s_) * factorial(u)).unwrap();
                let g = |a, b| engine.gamma(GammaIndex::new(a, u, b)).unwrap();
                let inner = q1 * g(r + 1, s_) + q2 * g(r, s_ + 1);
                let mut term = &lead * multinom * q1.pow((r + u) as i32).unwrap() * q2.pow((s_ + u) as i32).unwrap() * inner;
                if u % 2 == 1 {
                    term = -term;
                }
                total += term;
            }
        }
        total
    }

    #[test]
    fn agrees_with_closed_form_step() {
        let q1 = q(3, 7);
        for n in 1..=10u32 {
            let u = un_coeffs(n).unwrap();
            for x in [q(0, 1), q(1, 3), q(1, 1)] {
                let lhs = (&q1 * q(2, 1)).pow(n as i32).unwrap() * u.eval(&x);
                assert_eq!(lhs, phi_m_from_step(n, &q1, &(&q1 * &x)), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn lyapunov_of_first() {
        let l = lyapunov_un(1, 256).unwrap();
        assert!(l.positive);
        assert!((l.value.to_f64() - std::f64::consts::LN_2).abs() < 1e-15);
    }
}
