//! Exact rationals and closed rational intervals.
//!
//! Every real quantity in the engine is an [`Interval`] with rational end
//! points. Exact values are degenerate intervals, so the same code path
//! handles exact rotation numbers and decimal approximations of irrational
//! ones. The integer-part functions refuse to guess: an interval that meets
//! an integer without being that integer yields [`Error::Precision`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, an integer, or a decimal with optional exponent
/// (`"0.618"`, `"1e-13"`, `"-2.5E+3"`) into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {text:?}")))?;
        let den: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {text:?}")))?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    parse_decimal(s).ok_or_else(|| Error::Parse(format!("not a rational or decimal: {text:?}")))
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (whole, fraction) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && fraction.is_empty() {
        return None;
    }
    if !whole.bytes().chain(fraction.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("{whole}{fraction}").parse().ok()?;
    let scale = exponent - fraction.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    Some(if negative { -value } else { value })
}

/// Canonical text form: `"p/q"`, or `"p"` for integers.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_i64(n: &BigInt) -> Result<i64> {
    n.to_i64()
        .ok_or_else(|| Error::Range(format!("integer {n} does not fit in 64 bits")))
}

/// Closed interval `[lo, hi]` with rational end points.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: BigRational,
    hi: BigRational,
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        if lo <= hi {
            Interval { lo, hi }
        } else {
            Interval { lo: hi, hi: lo }
        }
    }

    pub fn exact(value: BigRational) -> Self {
        Interval { lo: value.clone(), hi: value }
    }

    pub fn from_int(n: i64) -> Self {
        Interval::exact(int(n))
    }

    /// `[center - err, center + err]`.
    pub fn around(center: &BigRational, err: &BigRational) -> Self {
        let err = err.abs();
        Interval::new(center - &err, center + &err)
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// The value when the interval is degenerate.
    pub fn as_exact(&self) -> Option<&BigRational> {
        self.is_exact().then_some(&self.lo)
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&BigRational::zero())
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn abs_sup(&self) -> BigRational {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn scale(&self, k: &BigRational) -> Interval {
        Interval::new(&self.lo * k, &self.hi * k)
    }

    pub fn scale_int(&self, k: i64) -> Interval {
        self.scale(&int(k))
    }

    /// `1 / self`; fails when the interval contains zero.
    pub fn recip(&self) -> Result<Interval> {
        if self.contains_zero() {
            return Err(Error::Precondition(format!(
                "cannot invert an interval containing zero: {self}"
            )));
        }
        Ok(Interval::new(self.hi.recip(), self.lo.recip()))
    }

    pub fn div(&self, other: &Interval) -> Result<Interval> {
        Ok(self * &other.recip()?)
    }

    fn straddle_error(&self, k: &BigInt) -> Error {
        Error::Precision(format!(
            "interval {self} meets the integer {k}; supply a tighter decimal"
        ))
    }

    /// `[a] = max{k in Z : k <= a}`.
    pub fn floor_int(&self) -> Result<BigInt> {
        let f = self.lo.floor().to_integer();
        if self.is_exact() {
            return Ok(f);
        }
        if self.lo.is_integer() {
            return Err(self.straddle_error(&f));
        }
        if self.hi.floor().to_integer() != f {
            return Err(self.straddle_error(&(&f + 1)));
        }
        Ok(f)
    }

    /// `E(a) = min{k in Z : k >= a}`.
    pub fn ceil_int(&self) -> Result<BigInt> {
        let f = self.floor_int()?;
        if self.is_exact() && self.lo.is_integer() {
            Ok(f)
        } else {
            Ok(f + 1)
        }
    }

    /// `E(a) - [a]`: 0 on integers, 1 elsewhere.
    pub fn phi(&self) -> Result<u8> {
        let f = self.floor_int()?;
        let c = self.ceil_int()?;
        Ok(if f == c { 0 } else { 1 })
    }

    /// `{a} = a - [a]`, an interval inside `[0, 1)`.
    pub fn frac(&self) -> Result<Interval> {
        let f = BigRational::from_integer(self.floor_int()?);
        Ok(Interval::new(&self.lo - &f, &self.hi - &f))
    }

    /// Supremum over the interval of the distance to the nearest integer.
    pub fn sup_distance_to_integers(&self) -> BigRational {
        let half = rat(1, 2);
        // A half-integer inside the interval attains the maximum 1/2.
        let first_half = (&self.lo - &half).ceil() + &half;
        if first_half <= self.hi {
            return half;
        }
        distance_to_integers(&self.lo).max(distance_to_integers(&self.hi))
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64().unwrap_or(f64::NAN)
    }
}

pub fn distance_to_integers(x: &BigRational) -> BigRational {
    let f = x - x.floor();
    let g = BigRational::one() - &f;
    f.min(g)
}

/// The rational of least denominator in `[lo, hi]` (`0 <= lo <= hi`), found
/// by walking the continued fractions of both end points.
pub fn simplest_rational_in(lo: &BigRational, hi: &BigRational) -> BigRational {
    let a = lo.floor();
    if &a == lo {
        return a;
    }
    if &(&a + BigRational::one()) <= hi {
        return a + BigRational::one();
    }
    let inner = simplest_rational_in(&(hi - &a).recip(), &(lo - &a).recip());
    a + inner.recip()
}

impl From<BigRational> for Interval {
    fn from(value: BigRational) -> Self {
        Interval::exact(value)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", format_rational(&self.lo))
        } else {
            write!(f, "[{}, {}]", format_rational(&self.lo), format_rational(&self.hi))
        }
    }
}

impl Add for &Interval {
    type Output = Interval;
    fn add(self, rhs: &Interval) -> Interval {
        Interval::new(&self.lo + &rhs.lo, &self.hi + &rhs.hi)
    }
}

impl Sub for &Interval {
    type Output = Interval;
    fn sub(self, rhs: &Interval) -> Interval {
        Interval::new(&self.lo - &rhs.hi, &self.hi - &rhs.lo)
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::new(-&self.hi, -&self.lo)
    }
}

impl Mul for &Interval {
    type Output = Interval;
    fn mul(self, rhs: &Interval) -> Interval {
        let products = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = products.iter().min().cloned().unwrap();
        let hi = products.iter().max().cloned().unwrap();
        Interval { lo, hi }
    }
}

/// Exact intervals serialize as a rational string, others as
/// `{"lo": .., "hi": ..}`.
impl serde::Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        if self.is_exact() {
            return s.serialize_str(&format_rational(&self.lo));
        }
        let mut st = s.serialize_struct("Interval", 2)?;
        st.serialize_field("lo", &format_rational(&self.lo))?;
        st.serialize_field("hi", &format_rational(&self.hi))?;
        st.end()
    }
}

/// `serialize_with` helper writing a rational as `"p/q"`.
pub fn serialize_rational<S: serde::Serializer>(
    r: &BigRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

/// Least common multiple of a set of positive integers, 1 for the empty set.
pub fn lcm_all<'a>(values: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v))
}
