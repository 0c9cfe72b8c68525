use crate::numkernel::BigFloat;

/// `r_n(x) = (tanh x / x)^n / cosh x`, with `r_n(0) = 1`.
pub fn r_eval(n: u32, x: f64, prec: u32) -> BigFloat {
    if x == 0.0 {
        return BigFloat::one(prec);
    }
    let x = BigFloat::from_f64(x, prec);
    let ratio = x.tanh() / &x;
    ratio.powi(n as i32) / x.cosh()
}

/// `v_n(x) = n (coth x − 1/x) − (n+1) tanh x`, the log-derivative of `r_n`,
/// with `v_n(0) = 0`.
pub fn v_eval(n: u32, x: f64, prec: u32) -> BigFloat {
    if x == 0.0 {
        return BigFloat::zero(prec);
    }
    let x = BigFloat::from_f64(x, prec);
    let n_f = BigFloat::from_i64(n as i64, prec);
    let np1 = BigFloat::from_i64(n as i64 + 1, prec);
    &n_f * &(x.coth() - x.recip()) - &np1 * &x.tanh()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limits_at_zero() {
        assert_eq!(r_eval(3, 0.0, 128).to_f64(), 1.0);
        assert_eq!(v_eval(3, 0.0, 128).to_f64(), 0.0);
    }

    #[test]
    fn pointwise() {
        let r = r_eval(0, 20.0, 256).to_f64();
        assert!((r - 1.0 / 20.0f64.cosh()).abs() < 1e-20);
        assert!((r - 4.122_307e-9).abs() < 1e-14);
    }

    #[test]
    fn v_is_log_derivative_of_r() {
        // central difference of ln r_n
        let prec = 256;
        for n in [0u32, 1, 4] {
            for x in [0.3, 1.1, 2.5] {
                let h = 1e-5;
                let hi = r_eval(n, x + h, prec).ln();
                let lo = r_eval(n, x - h, prec).ln();
                let fd = ((hi - lo) / (2.0 * h)).to_f64();
                assert!((fd - v_eval(n, x, prec).to_f64()).abs() < 1e-8, "n={n} x={x}");
            }
        }
    }
}
