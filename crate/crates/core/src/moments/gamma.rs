use rug::Integer;

use super::{Backend, GammaIndex, MomentEngine, MomentError};
use crate::numkernel::{binomial, factorial, odd_double_factorial, Rational};

impl MomentEngine {
    /// `γ(n,k,0) = (2n)! (2k)! s(n,k) / (2^n n!)` by the chosen route.
    pub fn gamma_nk0(&self, n: u32, k: u32, backend: Backend) -> Result<Rational, MomentError> {
        self.check_order(n, k)?;
        if backend == Backend::default() {
            if let Some(v) = self.gamma_nk0.read().unwrap_or_else(|e| e.into_inner()).get(&(n, k)) {
                return Ok(v.clone());
            }
        }
        // (2n)! / (2^n n!) = (2n-1)!!
        let prefactor = odd_double_factorial(2 * n as i64 - 1)?;
        let value = match backend {
            Backend::Recursive => {
                let d = self.r_deriv_at_zero(n, 2 * k)?.mul_int(&prefactor);
                if k % 2 == 1 {
                    -d
                } else {
                    d
                }
            }
            Backend::Explicit => self.s_explicit(n, k)?.mul_int(&(prefactor * factorial(2 * k))),
            Backend::Mgf => {
                let ratio = Rational::new(factorial(2 * k), factorial(k))?;
                self.mgf_deriv(n, k, k)?.mul_int(&prefactor) * ratio
            }
        };
        if backend == Backend::default() {
            self.gamma_nk0
                .write()
                .unwrap_or_else(|e| e.into_inner())
                .insert((n, k), value.clone());
        }
        Ok(value)
    }

    /// `γ(n,k,l) = C(n+l, l) / C(2(n+l), 2l) · γ(n+l, k, 0)`.
    pub fn gamma(&self, idx: GammaIndex) -> Result<Rational, MomentError> {
        self.gamma_with(idx, Backend::default())
    }

    /// [`MomentEngine::gamma`] with `γ(n+l, k, 0)` taken from `backend`.
    pub fn gamma_with(&self, idx: GammaIndex, backend: Backend) -> Result<Rational, MomentError> {
        let GammaIndex { n, k, l } = idx;
        let total = n.checked_add(l).ok_or_else(|| MomentError::Domain("index overflow".into()))?;
        self.check_order(total, k)?;
        let base = self.gamma_nk0(total, k, backend)?;
        if l == 0 {
            return Ok(base);
        }
        let ratio = Rational::new(binomial(total, l)?, binomial(2 * total, 2 * l)?)?;
        Ok(base * ratio)
    }

    /// `E[ΔW₁^{2a} ΔW₂^{2b} (I₁₂ I₂₁)^c]` on the unit interval for `c ∈ {1, 2}`,
    /// from `A₁₂² = (ΔW₁ΔW₂)² − 4 I₁₂ I₂₁`.
    pub fn mixed_moment_i(&self, a: u32, b: u32, c: u32) -> Result<Rational, MomentError> {
        let g = |n, k, l| self.gamma(GammaIndex::new(n, k, l));
        match c {
            1 => {
                let v = g(a + 1, 0, b + 1)? - g(a, 1, b)?;
                Ok(v.div_int(&Integer::from(4)))
            }
            2 => {
                let v = g(a + 2, 0, b + 2)? - g(a + 1, 1, b + 1)? * Rational::from(2) + g(a, 2, b)?;
                Ok(v.div_int(&Integer::from(16)))
            }
            _ => Err(MomentError::Domain(format!(
                "mixed moments are only available for (I12 I21)^c with c in {{1, 2}}, got c = {c}"
            ))),
        }
    }
}

pub fn gamma_nk0(n: u32, k: u32, backend: Backend) -> Result<Rational, MomentError> {
    MomentEngine::global().gamma_nk0(n, k, backend)
}

pub fn gamma(idx: GammaIndex) -> Result<Rational, MomentError> {
    MomentEngine::global().gamma(idx)
}

pub fn gamma_with(idx: GammaIndex, backend: Backend) -> Result<Rational, MomentError> {
    MomentEngine::global().gamma_with(idx, backend)
}

pub fn mixed_moment_i(a: u32, b: u32, c: u32) -> Result<Rational, MomentError> {
    MomentEngine::global().mixed_moment_i(a, b, c)
}

/// Moment over a step of length `h`: `h^{n+2k+l}` times the unit-interval value.
pub fn scale_to_step(unit_value: &Rational, idx: GammaIndex, h: &Rational) -> Rational {
    unit_value * h.pow(idx.h_degree() as i32).expect("nonnegative exponent")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn gamma_nk0_values() {
        let e = MomentEngine::default();
        for b in Backend::ALL {
            assert_eq!(e.gamma_nk0(1, 1, b).unwrap(), q(5, 3), "{b:?}");
            assert_eq!(e.gamma_nk0(2, 1, b).unwrap(), q(7, 1), "{b:?}");
            assert_eq!(e.gamma_nk0(3, 0, b).unwrap(), q(15, 1), "{b:?}");
            assert_eq!(e.gamma_nk0(1, 2, b).unwrap(), q(61, 5), "{b:?}");
        }
    }

    #[test]
    fn gamma_values() {
        let e = MomentEngine::default();
        assert_eq!(e.gamma(GammaIndex::new(0, 1, 1)).unwrap(), q(5, 3));
        assert_eq!(e.gamma(GammaIndex::new(1, 1, 1)).unwrap(), q(7, 3));
        assert_eq!(e.gamma(GammaIndex::new(2, 0, 1)).unwrap(), q(3, 1));
        assert_eq!(e.gamma(GammaIndex::new(0, 0, 0)).unwrap(), q(1, 1));
        // E[A^2] = 1 on the unit interval
        assert_eq!(e.gamma(GammaIndex::new(0, 1, 0)).unwrap(), q(1, 1));
    }

    #[test]
    fn k_zero_closed_form() {
        let e = MomentEngine::default();
        for n in 0..8u32 {
            for l in 0..8u32 {
                let expected = odd_double_factorial(2 * n as i64 - 1).unwrap()
                    * odd_double_factorial(2 * l as i64 - 1).unwrap();
                assert_eq!(e.gamma(GammaIndex::new(n, 0, l)).unwrap(), Rational::from(expected));
            }
        }
    }

    #[test]
    fn mixed_moments() {
        let e = MomentEngine::default();
        assert_eq!(e.mixed_moment_i(1, 0, 1).unwrap(), q(1, 3));
        assert_eq!(e.mixed_moment_i(2, 0, 1).unwrap(), q(2, 1));
        assert_eq!(e.mixed_moment_i(1, 0, 2).unwrap(), q(49, 20));
        assert_eq!(e.mixed_moment_i(2, 1, 1).unwrap(), q(9, 1));
        assert_eq!(e.mixed_moment_i(1, 1, 1).unwrap(), q(5, 3));
        assert!(e.mixed_moment_i(1, 1, 3).is_err());
        assert!(e.mixed_moment_i(1, 1, 0).is_err());
    }

    #[test]
    fn step_scaling() {
        // E[ΔW₁² I₁₂ I₂₁] over a step of length h is h³/3.
        let unit = MomentEngine::default().mixed_moment_i(1, 0, 1).unwrap();
        let h = q(1, 4);
        let idx = GammaIndex::new(1, 1, 0);
        assert_eq!(scale_to_step(&unit, idx, &h), q(1, 3 * 64));
    }

    #[test]
    fn limit_applies_to_folded_index() {
        let e = MomentEngine::new(20);
        assert!(e.gamma(GammaIndex::new(10, 5, 1)).is_err());
        assert!(e.gamma(GammaIndex::new(10, 5, 0)).is_ok());
    }
}
