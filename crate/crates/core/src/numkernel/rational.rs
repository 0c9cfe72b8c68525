use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use rug::{Integer, Rational as GmpRational};

use super::NumError;

/// Exact rational number, always in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(GmpRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(GmpRational::new())
    }

    pub fn one() -> Self {
        Rational(GmpRational::from(1))
    }

    pub fn from_integer(n: impl Into<Integer>) -> Self {
        Rational(GmpRational::from(n.into()))
    }

    /// `num / den`, reduced. Fails when `den` is zero.
    pub fn new(num: impl Into<Integer>, den: impl Into<Integer>) -> Result<Self, NumError> {
        let den = den.into();
        if den == 0 {
            return Err(NumError::DivisionByZero);
        }
        Ok(Rational(GmpRational::from((num.into(), den))))
    }

    /// Exact value of a finite `f64`.
    pub fn from_f64(x: f64) -> Result<Self, NumError> {
        GmpRational::from_f64(x)
            .map(Rational)
            .ok_or_else(|| NumError::Domain(format!("non-finite value {x}")))
    }

    pub fn numer(&self) -> &Integer {
        self.0.numer()
    }

    pub fn denom(&self) -> &Integer {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.cmp0() == Ordering::Equal
    }

    pub fn is_integer(&self) -> bool {
        *self.0.denom() == 1
    }

    pub fn signum(&self) -> i32 {
        match self.0.cmp0() {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.clone().abs())
    }

    pub fn recip(&self) -> Result<Self, NumError> {
        if self.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        Ok(Rational(self.0.clone().recip()))
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Self, NumError> {
        if rhs.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        Ok(Rational(GmpRational::from(&self.0 / &rhs.0)))
    }

    /// Integer power; negative exponents invert (and fail on zero).
    pub fn pow(&self, exp: i32) -> Result<Self, NumError> {
        if exp < 0 && self.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        use rug::ops::Pow;
        Ok(Rational(GmpRational::from((&self.0).pow(exp))))
    }

    /// Nearest `f64` (ties to even).
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub(crate) fn from_parts_unchecked(r: GmpRational) -> Self {
        Rational(r)
    }

    pub(crate) fn as_gmp(&self) -> &GmpRational {
        &self.0
    }

    pub(crate) fn mul_int(&self, k: &Integer) -> Self {
        Rational(GmpRational::from(&self.0 * k))
    }

    pub(crate) fn div_int(&self, k: &Integer) -> Self {
        debug_assert!(*k != 0);
        Rational(GmpRational::from(&self.0 / k))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational(GmpRational::from(n))
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational(GmpRational::from(n))
    }
}

impl From<u32> for Rational {
    fn from(n: u32) -> Self {
        Rational(GmpRational::from(n))
    }
}

impl From<Integer> for Rational {
    fn from(n: Integer) -> Self {
        Rational(GmpRational::from(n))
    }
}

impl From<(i64, i64)> for Rational {
    /// Panics on a zero denominator, like integer division.
    fn from((n, d): (i64, i64)) -> Self {
        Rational::new(n, d).expect("zero denominator")
    }
}

impl fmt::Display for Rational {
    /// `p/q`, or just `p` for integers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = NumError;

    /// Accepts `p`, `p/q`, or a finite decimal such as `-0.25` (taken exactly).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let err = || NumError::Parse(s.to_string());
        if let Some((n, d)) = t.split_once('/') {
            let n: Integer = n.trim().parse().map_err(|_| err())?;
            let d: Integer = d.trim().parse().map_err(|_| err())?;
            return Rational::new(n, d);
        }
        if let Ok(n) = t.parse::<Integer>() {
            return Ok(Rational::from(n));
        }
        let (mantissa, exp10) = match t.find(['e', 'E']) {
            Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().map_err(|_| err())?),
            None => (t, 0),
        };
        let (neg, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let all = format!("{int_part}{frac_part}");
        let mut value: Integer = all.parse().map_err(|_| err())?;
        if neg {
            value = -value;
        }
        let scale = exp10 - frac_part.len() as i32;
        let ten = Rational::from(10);
        Ok(Rational::from(value) * ten.pow(scale)?)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign_method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(GmpRational::from($trait::$method(&self.0, &rhs.0)))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(mut self, rhs: Rational) -> Rational {
                $assign_trait::$assign_method(&mut self.0, rhs.0);
                self
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(mut self, rhs: &Rational) -> Rational {
                $assign_trait::$assign_method(&mut self.0, &rhs.0);
                self
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $trait::$method(self, &rhs)
            }
        }
        impl $assign_trait<&Rational> for Rational {
            fn $assign_method(&mut self, rhs: &Rational) {
                $assign_trait::$assign_method(&mut self.0, &rhs.0);
            }
        }
        impl $assign_trait<Rational> for Rational {
            fn $assign_method(&mut self, rhs: Rational) {
                $assign_trait::$assign_method(&mut self.0, rhs.0);
            }
        }
    };
}

forward_binop!(Add, add, AddAssign, add_assign);
forward_binop!(Sub, sub, SubAssign, sub_assign);
forward_binop!(Mul, mul, MulAssign, mul_assign);

/// Panics on division by zero; use [`Rational::checked_div`] to get an error instead.
impl Div<&Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        self.checked_div(rhs).expect("rational division by zero")
    }
}

impl Div<Rational> for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        (&self).checked_div(&rhs).expect("rational division by zero")
    }
}

impl Div<&Rational> for Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        (&self).checked_div(rhs).expect("rational division by zero")
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(GmpRational::from(-&self.0))
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::one(), |acc, x| acc * x)
    }
}
