//! Complex scalars with an exact real-rational mode.
//!
//! Arithmetic between two exact values stays exact; anything touching a
//! float value is carried out in binary64 complex arithmetic.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Float entries with modulus below this are treated as zero.
pub const FLOAT_ZERO_THRESHOLD: f64 = 1e-300;

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Float(Complex64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / den` as an exact rational. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn real(x: f64) -> Self {
        Scalar::Float(Complex64::new(x, 0.0))
    }

    pub fn complex(re: f64, im: f64) -> Self {
        Scalar::Float(Complex64::new(re, im))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Float(z) => z.norm() < FLOAT_ZERO_THRESHOLD,
        }
    }

    /// Exact zero, as opposed to a float below the canonical threshold.
    pub fn is_exact_zero(&self) -> bool {
        matches!(self, Scalar::Exact(q) if q.is_zero())
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(q) => Complex64::new(rational_to_f64(q), 0.0),
            Scalar::Float(z) => *z,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Float(_) => None,
        }
    }

    /// Modulus as a float.
    pub fn abs(&self) -> f64 {
        match self {
            Scalar::Exact(q) => rational_to_f64(&q.abs()),
            Scalar::Float(z) => z.norm(),
        }
    }

    pub fn abs_exact(&self) -> Option<BigRational> {
        self.as_exact().map(|q| q.abs())
    }

    pub fn conj(&self) -> Self {
        match self {
            Scalar::Exact(q) => Scalar::Exact(q.clone()),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    /// Unimodular `p` with `p * self = |self|`; zero maps to zero.
    pub fn phase_conj(&self) -> Self {
        match self {
            Scalar::Exact(q) => match q.cmp(&BigRational::zero()) {
                Ordering::Greater => Scalar::one(),
                Ordering::Less => Scalar::int(-1),
                Ordering::Equal => Scalar::zero(),
            },
            Scalar::Float(z) => {
                let r = z.norm();
                if r < FLOAT_ZERO_THRESHOLD {
                    Scalar::zero()
                } else {
                    Scalar::Float(z.conj() / r)
                }
            }
        }
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Option<Scalar> {
        if rhs.is_zero() {
            return None;
        }
        Some(match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a / b),
            _ => Scalar::Float(self.to_complex() / rhs.to_complex()),
        })
    }

    /// Integer power; negative exponents need a nonzero base.
    pub fn powi(&self, e: i32) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(q.pow(e)),
            Scalar::Float(z) => Scalar::Float(z.powi(e)),
        }
    }

    /// Exact comparison in exact mode, bitwise-value comparison otherwise.
    pub fn exactly_equals(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => self.to_complex() == other.to_complex(),
        }
    }

    /// Modulus of the difference, plus whether that difference is an exact zero.
    pub fn distance(&self, other: &Scalar) -> (f64, bool) {
        let d = self - other;
        (d.abs(), d.is_exact_zero())
    }
}

/// Rational to float without overflow for huge numerators and denominators.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if let Some(x) = q.to_f64() {
        if x.is_finite() {
            return x;
        }
    }
    let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
    let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
    if n.is_finite() && d.is_finite() {
        return n / d;
    }
    // Both sides are enormous: scale by the bit-length difference.
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = nb.min(db) - 60;
    let n = (q.numer() >> shift as usize).to_f64().unwrap_or(0.0);
    let d = (q.denom() >> shift as usize).to_f64().unwrap_or(f64::INFINITY);
    n / d
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.exactly_equals(other)
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::Exact(q)
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        Scalar::Float(z)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    _ => Scalar::Float(self.to_complex() $op rhs.to_complex()),
                }
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by zero scalar")
    }
}

impl Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(-q),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        match (&mut *self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => *a += b,
            (Scalar::Float(a), _) => *a += rhs.to_complex(),
            (Scalar::Exact(_), Scalar::Float(b)) => *self = Scalar::Float(self.to_complex() + b),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{q}"),
            Scalar::Float(z) if z.im == 0.0 => write!(f, "{}", z.re),
            Scalar::Float(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(q) => s.serialize_str(&q.to_string()),
            Scalar::Float(z) => [z.re, z.im].serialize(s),
        }
    }
}

/// Parses a real number: integers and `p/q` become exact, decimals become floats.
pub fn parse_real(text: &str) -> Result<Scalar> {
    let t = text.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|e| Error::Parse(format!("{t}: {e}")))?;
        let q = BigInt::from_str(q.trim()).map_err(|e| Error::Parse(format!("{t}: {e}")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("{t}: zero denominator")));
        }
        return Ok(Scalar::Exact(BigRational::new(p, q)));
    }
    if let Ok(n) = BigInt::from_str(t) {
        return Ok(Scalar::Exact(BigRational::from_integer(n)));
    }
    t.parse::<f64>()
        .map(Scalar::real)
        .map_err(|e| Error::Parse(format!("{t}: {e}")))
}

/// Parses `RE[,IM]`; an absent or exactly-zero imaginary part keeps exact reals exact.
pub fn parse_complex(text: &str) -> Result<Scalar> {
    match text.split_once(',') {
        None => parse_real(text),
        Some((re, im)) => {
            let re = parse_real(re)?;
            let im = parse_real(im)?;
            if im.is_exact_zero() {
                Ok(re)
            } else {
                Ok(Scalar::complex(re.to_complex().re, im.to_complex().re))
            }
        }
    }
}
