use nalgebra::DMatrix;

use super::SdeError;

// Padé (13,13) coefficients and the 1-norm bound below which no scaling is
// needed (Higham, 2005).
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential. `2 × 2` uses the closed form; larger matrices use
/// scaling and squaring with a degree-13 Padé approximant.
pub fn expm(m: &DMatrix<f64>) -> Result<DMatrix<f64>, SdeError> {
    if m.nrows() != m.ncols() {
        return Err(SdeError::Dimension { what: "square matrix", expected: m.nrows(), found: m.ncols() });
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(SdeError::NonFinite);
    }
    match m.nrows() {
        0 => Ok(m.clone()),
        1 => Ok(DMatrix::from_element(1, 1, m[(0, 0)].exp())),
        2 => Ok(expm2(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])),
        _ => Ok(expm_pade(m)),
    }
}

/// `exp([[a,b],[c,d]])`: with `s = (a+d)/2` and `N = M − sI`, `N² = δI`, so
/// `exp(M) = eˢ (C(δ) I + S(δ) N)` with `C = cosh√δ`, `S = sinh√δ/√δ`.
pub(crate) fn expm2(a: f64, b: f64, c: f64, d: f64) -> DMatrix<f64> {
    let [e00, e01, e10, e11] = expm2_raw(a, b, c, d);
    DMatrix::from_row_slice(2, 2, &[e00, e01, e10, e11])
}

pub(crate) fn expm2_raw(a: f64, b: f64, c: f64, d: f64) -> [f64; 4] {
    let s = 0.5 * (a + d);
    let h = 0.5 * (a - d);
    let delta = h * h + b * c;
    let (cf, sf) = if delta.abs() < 1e-3 {
        // Taylor series in δ; eight terms are below 1e-24 relative here.
        let mut cs = 0.0;
        let mut sn = 0.0;
        let mut pow = 1.0;
        let mut fact_even = 1.0;
        for k in 0..8 {
            let fact_odd = fact_even * (2 * k + 1) as f64;
            cs += pow / fact_even;
            sn += pow / fact_odd;
            pow *= delta;
            fact_even = fact_odd * (2 * k + 2) as f64;
        }
        (cs, sn)
    } else if delta > 0.0 {
        let r = delta.sqrt();
        (r.cosh(), r.sinh() / r)
    } else {
        let r = (-delta).sqrt();
        (r.cos(), r.sin() / r)
    };
    let e = s.exp();
    [e * (cf + sf * h), e * sf * b, e * sf * c, e * (cf - sf * h)]
}

fn expm_pade(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let norm1 = (0..n).map(|j| m.column(j).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let squarings = if norm1 > THETA13 { (norm1 / THETA13).log2().ceil() as i32 } else { 0 };
    let a = m * 2f64.powi(-squarings);
    let ident = DMatrix::<f64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;
    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]) + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &ident * b[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]) + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &ident * b[0];
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).expect("Padé denominator is nonsingular for scaled arguments");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::BigFloat;

    /// Taylor series with scaling and squaring in 128-bit floats.
    fn expm_oracle(m: &DMatrix<f64>) -> DMatrix<f64> {
        const P: u32 = 128;
        let n = m.nrows();
        let squarings = 8;
        let scale = 2f64.powi(-squarings);
        let a: Vec<Vec<BigFloat>> =
            (0..n).map(|i| (0..n).map(|j| BigFloat::from_f64(m[(i, j)], P) * scale).collect()).collect();
        let mul = |x: &Vec<Vec<BigFloat>>, y: &Vec<Vec<BigFloat>>| -> Vec<Vec<BigFloat>> {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let mut acc = BigFloat::zero(P);
                            for k in 0..n {
                                acc += &x[i][k] * &y[k][j];
                            }
                            acc
                        })
                        .collect()
                })
                .collect()
        };
        let mut sum: Vec<Vec<BigFloat>> =
            (0..n).map(|i| (0..n).map(|j| BigFloat::from_i64((i == j) as i64, P)).collect()).collect();
        let mut term = sum.clone();
        for k in 1..40 {
            term = mul(&term, &a);
            for row in term.iter_mut() {
                for v in row.iter_mut() {
                    *v = v.clone() / BigFloat::from_i64(k, P);
                }
            }
            for i in 0..n {
                for j in 0..n {
                    sum[i][j] += &term[i][j];
                }
            }
        }
        for _ in 0..squarings {
            sum = mul(&sum, &sum);
        }
        DMatrix::from_fn(n, n, |i, j| sum[i][j].to_f64())
    }

    fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn simple_cases() {
        let z = expm(&DMatrix::zeros(3, 3)).unwrap();
        assert_eq!(z, DMatrix::identity(3, 3));
        let d = expm(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -2.0]))).unwrap();
        assert!((d[(0, 0)] - 1f64.exp()).abs() < 1e-15 && (d[(1, 1)] - (-2f64).exp()).abs() < 1e-16);
        let nil = expm(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0])).unwrap();
        assert_eq!(nil, DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]));
        let d3 = expm(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.5, -3.0]))).unwrap();
        assert!((d3[(2, 2)] - (-3f64).exp()).abs() < 1e-15);
        assert!(expm(&DMatrix::from_element(2, 2, f64::NAN)).is_err());
    }

    #[test]
    fn against_high_precision_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for &n in &[2usize, 2, 2, 4, 4, 4] {
            for _ in 0..5 {
                let mut m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
                let target = rng.random_range(0.1..10.0);
                m *= target / m.norm();
                let got = expm(&m).unwrap();
                let want = expm_oracle(&m);
                assert!(rel_err(&got, &want) < 1e-12, "n={n} err={}", rel_err(&got, &want));
                if n == 2 {
                    let pade = expm_pade(&m);
                    assert!(rel_err(&pade, &want) < 1e-12);
                }
            }
        }
    }
}
