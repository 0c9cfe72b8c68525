use super::{bigfloat_of, MomentEngine, MomentError};
use crate::numkernel::{odd_double_factorial, factorial, BigFloat};

impl MomentEngine {
    /// `M_{n,L}(θ) = exp(Σ_{j=1}^{L} β(n,j) θ^j / j)`.
    pub fn mgf_eval(&self, n: u32, big_l: u32, theta: &BigFloat) -> Result<BigFloat, MomentError> {
        let prec = theta.precision();
        let mut exponent = BigFloat::zero(prec);
        let mut power = BigFloat::one(prec);
        for j in 1..=big_l {
            power = &power * theta;
            let coeff = bigfloat_of(&self.beta(n, j)?, prec) / BigFloat::from_i64(j as i64, prec);
            exponent += &coeff * &power;
        }
        Ok(exponent.exp())
    }

    /// Upper bound on `s(n,k)`. With `k0 = 0` this is `tanⁿ(1)/cos(1)` and holds
    /// for every `k`; with `k0 >= 1` it is the refined bound
    /// `tanⁿ(1)/cos(1) / M_{n,k0}(1) · max_{j<=k} ŝ_{n,k0}(j)`, valid for `k >= k0 + 1`.
    pub fn s_bound(&self, n: u32, k: u32, k0: u32, prec: u32) -> Result<BigFloat, MomentError> {
        let one = BigFloat::one(prec);
        let simple = one.tan().powi(n as i32) / one.cos();
        if k0 == 0 {
            return Ok(simple);
        }
        if k < k0 + 1 {
            return Err(MomentError::Domain(format!(
                "refined bound with k0 = {k0} needs k >= {}, got k = {k}",
                k0 + 1
            )));
        }
        let mut best = BigFloat::zero(prec);
        for j in 0..=k {
            let v = bigfloat_of(&self.s_hat(n, k0, j)?, prec);
            best = best.max(v);
        }
        let m1 = self.mgf_eval(n, k0, &one)?;
        Ok(simple / m1 * best)
    }

    /// Upper bound on `γ(n,k,0)`: `(2n)! (2k)! / (2^n n!)` times [`MomentEngine::s_bound`].
    pub fn gamma_bound(&self, n: u32, k: u32, k0: u32, prec: u32) -> Result<BigFloat, MomentError> {
        let s = self.s_bound(n, k, k0, prec)?;
        let c = odd_double_factorial(2 * n as i64 - 1)? * factorial(2 * k);
        Ok(s * bigfloat_of(&crate::numkernel::Rational::from(c), prec))
    }
}

pub fn mgf_eval(n: u32, big_l: u32, theta: &BigFloat) -> Result<BigFloat, MomentError> {
    MomentEngine::global().mgf_eval(n, big_l, theta)
}

pub fn s_bound(n: u32, k: u32, k0: u32, prec: u32) -> Result<BigFloat, MomentError> {
    MomentEngine::global().s_bound(n, k, k0, prec)
}

pub fn gamma_bound(n: u32, k: u32, k0: u32, prec: u32) -> Result<BigFloat, MomentError> {
    MomentEngine::global().gamma_bound(n, k, k0, prec)
}
