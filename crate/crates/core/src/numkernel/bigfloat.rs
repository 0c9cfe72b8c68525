use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Round;
use rug::ops::Pow;
use rug::Float;

use super::{NumError, Rational};

pub const DEFAULT_PRECISION: u32 = 256;
pub const MIN_PRECISION: u32 = 64;

/// Binary multiple-precision float with a per-value precision in bits.
///
/// Binary operations run at the larger of the two operand precisions and
/// round to nearest.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct BigFloat(Float);

fn check_precision(bits: u32) -> Result<u32, NumError> {
    if bits < MIN_PRECISION {
        return Err(NumError::Domain(format!(
            "precision {bits} bits is below the minimum of {MIN_PRECISION}"
        )));
    }
    Ok(bits)
}

impl BigFloat {
    pub fn with_precision(bits: u32) -> Result<Self, NumError> {
        Ok(BigFloat(Float::new(check_precision(bits)?)))
    }

    pub fn zero(bits: u32) -> Self {
        BigFloat(Float::new(bits.max(MIN_PRECISION)))
    }

    pub fn one(bits: u32) -> Self {
        Self::from_i64(1, bits)
    }

    pub fn from_i64(n: i64, bits: u32) -> Self {
        BigFloat(Float::with_val(bits.max(MIN_PRECISION), n))
    }

    pub fn from_f64(x: f64, bits: u32) -> Self {
        BigFloat(Float::with_val(bits.max(MIN_PRECISION), x))
    }

    /// Correctly rounded (to nearest) conversion of an exact rational.
    pub fn from_rational(r: &Rational, bits: u32) -> Self {
        BigFloat(Float::with_val_round(bits.max(MIN_PRECISION), r.as_gmp(), Round::Nearest).0)
    }

    pub fn precision(&self) -> u32 {
        self.0.prec()
    }

    /// Re-rounds to a new precision.
    pub fn with_prec(mut self, bits: u32) -> Self {
        self.0.set_prec(bits.max(MIN_PRECISION));
        self
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Exact rational value; `None` for NaN or infinities.
    pub fn to_rational(&self) -> Option<Rational> {
        self.0.to_rational().map(Rational::from_parts_unchecked)
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative()
    }

    pub fn abs(&self) -> Self {
        BigFloat(self.0.clone().abs())
    }

    pub fn exp(&self) -> Self {
        BigFloat(self.0.clone().exp())
    }

    /// Natural logarithm (NaN for negative arguments, -inf at zero).
    pub fn ln(&self) -> Self {
        BigFloat(self.0.clone().ln())
    }

    pub fn sqrt(&self) -> Self {
        BigFloat(self.0.clone().sqrt())
    }

    pub fn sin(&self) -> Self {
        BigFloat(self.0.clone().sin())
    }

    pub fn cos(&self) -> Self {
        BigFloat(self.0.clone().cos())
    }

    pub fn tan(&self) -> Self {
        BigFloat(self.0.clone().tan())
    }

    pub fn sinh(&self) -> Self {
        BigFloat(self.0.clone().sinh())
    }

    pub fn cosh(&self) -> Self {
        BigFloat(self.0.clone().cosh())
    }

    pub fn tanh(&self) -> Self {
        BigFloat(self.0.clone().tanh())
    }

    pub fn coth(&self) -> Self {
        BigFloat(self.0.clone().coth())
    }

    pub fn powi(&self, n: i32) -> Self {
        BigFloat(Float::with_val(self.precision(), (&self.0).pow(n)))
    }

    pub fn recip(&self) -> Self {
        BigFloat(self.0.clone().recip())
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Scientific notation with `digits` significant decimal digits, e.g.
    /// `1.6666666666666667e0`.
    pub fn to_sci_string(&self, digits: usize) -> String {
        if !self.0.is_finite() {
            return self.0.to_string();
        }
        if self.0.is_zero() {
            return format!("{:.*}e0", digits.saturating_sub(1), 0.0);
        }
        let s = self.0.to_string_radix(10, Some(digits.max(1)));
        // rug prints `1.234e5`; keep the mantissa/exponent split but make
        // sure a lone digit still carries the decimal point.
        match s.split_once('e') {
            Some((m, e)) => format!("{m}e{}", e.trim_start_matches('+')),
            None => format!("{s}e0"),
        }
    }

    /// Number of decimal digits faithfully represented at this precision.
    pub fn decimal_digits(&self) -> usize {
        (self.precision() as f64 * std::f64::consts::LOG10_2).floor() as usize
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci_string(self.decimal_digits()))
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigFloat({}, {} bits)", self.to_sci_string(20), self.precision())
    }
}

impl PartialEq<f64> for BigFloat {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for BigFloat {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

macro_rules! float_binop {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign_method:ident) => {
        impl $trait<&BigFloat> for &BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: &BigFloat) -> BigFloat {
                let prec = self.0.prec().max(rhs.0.prec());
                BigFloat(Float::with_val(prec, $trait::$method(&self.0, &rhs.0)))
            }
        }
        impl $trait<BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: BigFloat) -> BigFloat {
                $trait::$method(&self, &rhs)
            }
        }
        impl $trait<&BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: &BigFloat) -> BigFloat {
                $trait::$method(&self, rhs)
            }
        }
        impl $assign_trait<&BigFloat> for BigFloat {
            fn $assign_method(&mut self, rhs: &BigFloat) {
                if rhs.0.prec() > self.0.prec() {
                    self.0.set_prec(rhs.0.prec());
                }
                $assign_trait::$assign_method(&mut self.0, &rhs.0);
            }
        }
        impl $assign_trait<BigFloat> for BigFloat {
            fn $assign_method(&mut self, rhs: BigFloat) {
                $assign_trait::$assign_method(self, &rhs);
            }
        }
        impl $trait<f64> for &BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: f64) -> BigFloat {
                BigFloat(Float::with_val(self.0.prec(), $trait::$method(&self.0, rhs)))
            }
        }
        impl $trait<f64> for BigFloat {
            type Output = BigFloat;
            fn $method(mut self, rhs: f64) -> BigFloat {
                $assign_trait::$assign_method(&mut self.0, rhs);
                self
            }
        }
    };
}

float_binop!(Add, add, AddAssign, add_assign);
float_binop!(Sub, sub, SubAssign, sub_assign);
float_binop!(Mul, mul, MulAssign, mul_assign);

impl Div<&BigFloat> for &BigFloat {
    type Output = BigFloat;
    fn div(self, rhs: &BigFloat) -> BigFloat {
        let prec = self.0.prec().max(rhs.0.prec());
        BigFloat(Float::with_val(prec, &self.0 / &rhs.0))
    }
}

impl Div<BigFloat> for BigFloat {
    type Output = BigFloat;
    fn div(self, rhs: BigFloat) -> BigFloat {
        &self / &rhs
    }
}

impl Div<&BigFloat> for BigFloat {
    type Output = BigFloat;
    fn div(self, rhs: &BigFloat) -> BigFloat {
        &self / rhs
    }
}

impl Div<f64> for BigFloat {
    type Output = BigFloat;
    fn div(mut self, rhs: f64) -> BigFloat {
        self.0 /= rhs;
        self
    }
}

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat(-self.0)
    }
}

impl Neg for &BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat(self.0.clone().neg())
    }
}
