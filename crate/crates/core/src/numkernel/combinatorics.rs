use rug::Integer;

use super::NumError;

/// Exact binomial coefficient `C(n, k)`.
pub fn binomial(n: u32, k: u32) -> Result<Integer, NumError> {
    if k > n {
        return Err(NumError::Domain(format!("binomial({n}, {k}) needs k <= n")));
    }
    Ok(Integer::from(n).binomial(k))
}

pub fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

/// `m!! = m (m-2) ... 1` for odd `m >= 1`, with `(-1)!! = 1`.
pub fn odd_double_factorial(m: i64) -> Result<Integer, NumError> {
    if m < -1 || m % 2 == 0 {
        return Err(NumError::Domain(format!(
            "odd double factorial needs an odd argument >= -1, got {m}"
        )));
    }
    if m == -1 {
        return Ok(Integer::from(1));
    }
    let m = u32::try_from(m).map_err(|_| NumError::Domain(format!("{m} is too large")))?;
    Ok(Integer::from(Integer::factorial_2(m)))
}
