use rug::ops::Pow;
use rug::Integer;

use super::{cached_row_entry, MomentEngine, MomentError, EXPLICIT_ENUMERATION_MAX_K};
use crate::numkernel::{bernoulli, binomial, factorial, Rational};

fn pow2(e: u32) -> Integer {
    Integer::from(1) << e
}

impl MomentEngine {
    pub fn beta(&self, n: u32, j: u32) -> Result<Rational, MomentError> {
        if j == 0 {
            return Err(MomentError::Domain("beta(n, j) needs j >= 1".into()));
        }
        self.check_order(n, j)?;
        cached_row_entry(&self.beta, n, (j - 1) as usize, |row| {
            let j = row.len() as u32 + 1;
            let b = bernoulli(2 * j as i64)?.abs();
            let weight = (pow2(2 * j) - 1u32) * (n + 1) - n;
            Ok(b.mul_int(&(pow2(2 * j - 1) * weight)).div_int(&factorial(2 * j)))
        })
    }

    /// `β(n,1..=k)`, index `j - 1`.
    pub(crate) fn betas(&self, n: u32, k: u32) -> Result<Vec<Rational>, MomentError> {
        (1..=k).map(|j| self.beta(n, j)).collect()
    }

    pub fn r_deriv_at_zero(&self, n: u32, order: u32) -> Result<Rational, MomentError> {
        if order % 2 == 1 {
            return Ok(Rational::zero());
        }
        let k = order / 2;
        self.check_order(n, k)?;
        cached_row_entry(&self.r_deriv, n, k as usize, |row| {
            let k = row.len() as u32;
            if k == 0 {
                return Ok(Rational::one());
            }
            // (1/2k) sum_j C(2k,2j) 2^{2j} B_{2j} {(1 - 2^{2j})(n+1) + n} r^{(2(k-j))}(0)
            let mut acc = Rational::zero();
            for j in 1..=k {
                let b = bernoulli(2 * j as i64)?;
                let weight = Integer::from(n) - (pow2(2 * j) - 1u32) * (n + 1);
                let c = binomial(2 * k, 2 * j)? * pow2(2 * j) * weight;
                acc += b.mul_int(&c) * &row[(k - j) as usize];
            }
            Ok(acc.div_int(&Integer::from(2 * k)))
        })
    }

    pub fn s(&self, n: u32, k: u32) -> Result<Rational, MomentError> {
        self.check_order(n, k)?;
        let betas = self.betas(n, k)?;
        cached_row_entry(&self.s, n, k as usize, |row| {
            let k = row.len();
            if k == 0 {
                return Ok(Rational::one());
            }
            let acc: Rational = (1..=k).map(|j| &betas[j - 1] * &row[k - j]).sum();
            Ok(acc.div_int(&Integer::from(k)))
        })
    }

    pub fn s_hat(&self, n: u32, big_l: u32, k: u32) -> Result<Rational, MomentError> {
        if k == 0 {
            return Ok(Rational::one());
        }
        if big_l == 0 {
            return Ok(Rational::zero());
        }
        if big_l >= k {
            return self.s(n, k);
        }
        self.check_order(n, k)?;
        // Parts are at most L: entries up to L coincide with s(n, .), above
        // that only the first L terms of the recursion survive.
        let betas = self.betas(n, big_l)?;
        let mut row: Vec<Rational> = (0..=big_l).map(|i| self.s(n, i)).collect::<Result<_, _>>()?;
        for i in (big_l + 1)..=k {
            let i = i as usize;
            let acc: Rational = (1..=big_l as usize).map(|j| &betas[j - 1] * &row[i - j]).sum();
            row.push(acc.div_int(&Integer::from(i)));
        }
        Ok(row.pop().expect("nonempty"))
    }

    pub fn s_by_partitions(&self, n: u32, k: u32) -> Result<Rational, MomentError> {
        self.check_order(n, k)?;
        if k == 0 {
            return Ok(Rational::one());
        }
        let betas = self.betas(n, k)?;
        // term_j(l) = beta_j^l / (j^l l!)
        let mut total = Rational::zero();
        let mut multiplicities = vec![0u32; k as usize + 1];
        enumerate_partitions(k, k, &mut multiplicities, &mut |mult| {
            let mut term = Rational::one();
            for (j, &l) in mult.iter().enumerate().skip(1) {
                if l == 0 {
                    continue;
                }
                let num = betas[j - 1].pow(l as i32).expect("positive exponent");
                let den = Integer::from(j as u32).pow(l) * factorial(l);
                term *= num.div_int(&den);
            }
            total += term;
        });
        Ok(total)
    }

    /// `s(n,k)` for the explicit backend: enumeration for small `k`, the
    /// dynamic program otherwise.
    pub(crate) fn s_explicit(&self, n: u32, k: u32) -> Result<Rational, MomentError> {
        if k <= EXPLICIT_ENUMERATION_MAX_K {
            self.s_by_partitions(n, k)
        } else {
            self.s(n, k)
        }
    }

    pub fn mgf_deriv(&self, n: u32, big_l: u32, k: u32) -> Result<Rational, MomentError> {
        self.check_order(n, k)?;
        let betas = self.betas(n, big_l.min(k.max(1)))?;
        cached_row_entry(&self.mgf, (n, big_l), k as usize, |row| {
            if row.is_empty() {
                return Ok(Rational::one());
            }
            // M^{(q+1)}(0) = sum_{l=0}^{min(q, L-1)} C(q,l) beta_{l+1} l! M^{(q-l)}(0)
            let q = row.len() as u32 - 1;
            let top = q.min(big_l.saturating_sub(1));
            if big_l == 0 {
                return Ok(Rational::zero());
            }
            let mut acc = Rational::zero();
            for l in 0..=top {
                let c = binomial(q, l)? * factorial(l);
                acc += betas[l as usize].mul_int(&c) * &row[(q - l) as usize];
            }
            Ok(acc)
        })
    }
}

/// Calls `visit` once for every partition of `remaining` into parts no larger
/// than `max_part`, as multiplicities `mult[j]` of part `j`.
fn enumerate_partitions(remaining: u32, max_part: u32, mult: &mut [u32], visit: &mut dyn FnMut(&[u32])) {
    if remaining == 0 {
        visit(mult);
        return;
    }
    if max_part == 0 {
        return;
    }
    let part = max_part as usize;
    let most = remaining / max_part;
    for count in (0..=most).rev() {
        mult[part] = count;
        enumerate_partitions(remaining - count * max_part, max_part - 1, mult, visit);
    }
    mult[part] = 0;
}
