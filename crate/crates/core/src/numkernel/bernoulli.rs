use std::sync::RwLock;

use rug::Integer;

use super::{NumError, Rational};

/// `B_0, B_2, B_4, ...` computed so far.
static EVEN_BERNOULLI: RwLock<Vec<Rational>> = RwLock::new(Vec::new());

/// Bernoulli number `B_index` for even `index`, with `B_0 = 1`.
///
/// Uses the recurrence
/// `B_2n = -1/(2n+1) + 1/2 - sum_{k=1}^{n-1} [2n(2n-1)...(2n-2k+2) / (2k)!] B_2k`
/// and memoizes every value it passes through.
pub fn bernoulli(index: i64) -> Result<Rational, NumError> {
    if index < 0 || index % 2 != 0 {
        return Err(NumError::Domain(format!(
            "Bernoulli numbers are only provided for even nonnegative indices, got {index}"
        )));
    }
    let half = (index / 2) as usize;
    {
        let cache = EVEN_BERNOULLI.read().unwrap_or_else(|e| e.into_inner());
        if let Some(b) = cache.get(half) {
            return Ok(b.clone());
        }
    }
    let mut cache = EVEN_BERNOULLI.write().unwrap_or_else(|e| e.into_inner());
    if cache.is_empty() {
        cache.push(Rational::one());
    }
    while cache.len() <= half {
        let n = cache.len() as u32;
        let next = next_even_bernoulli(n, &cache);
        cache.push(next);
    }
    Ok(cache[half].clone())
}

fn next_even_bernoulli(n: u32, lower: &[Rational]) -> Rational {
    let two_n = 2 * n;
    let mut b = Rational::from((1, 2)) - Rational::new(1, two_n + 1).expect("nonzero");
    // falling = 2n (2n-1) ... (2n-2k+2), (2k)! accumulated alongside.
    let mut falling = Integer::from(1);
    let mut even_fact = Integer::from(1);
    for k in 1..n {
        let top = two_n - 2 * k + 2;
        falling *= top;
        if k > 1 {
            falling *= top + 1;
        }
        even_fact *= (2 * k - 1) * (2 * k);
        let coeff = Rational::new(falling.clone(), even_fact.clone()).expect("nonzero");
        b -= coeff * &lower[k as usize];
    }
    b
}
