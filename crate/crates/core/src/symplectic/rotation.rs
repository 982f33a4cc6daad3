use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::interval::{format_rational, parse_rational, rat, simplest_rational_in, Interval};

/// Largest admissible error bound on a decimal rotation number.
pub fn max_decimal_error() -> BigRational {
    BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), 12))
}

/// Default denominator bound for the "no nearby rational" test on decimals.
pub const DEFAULT_RESOLUTION_LIMIT: u64 = 1000;

/// A rotation angle stored as the turn fraction `theta / 2pi`.
///
/// `Exact` holds a rational in `(0, 1) \ {1/2}`. `Decimal` is an irrational
/// value known only to lie in `[value - err, value + err]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RotationNumber {
    Exact(BigRational),
    Decimal { value: BigRational, err: BigRational },
}

impl RotationNumber {
    pub fn exact(value: BigRational) -> Result<Self> {
        let r = RotationNumber::Exact(value);
        r.validate()?;
        Ok(r)
    }

    pub fn ratio(p: i64, q: i64) -> Result<Self> {
        Self::exact(rat(p, q))
    }

    pub fn decimal(value: BigRational, err: BigRational) -> Result<Self> {
        let r = RotationNumber::Decimal { value, err };
        r.validate()?;
        Ok(r)
    }

    /// Parses a decimal string and an error string such as `"1e-13"`.
    pub fn parse_decimal(value: &str, err: &str) -> Result<Self> {
        Self::decimal(parse_rational(value)?, parse_rational(err)?)
    }

    pub fn is_irrational(&self) -> bool {
        matches!(self, RotationNumber::Decimal { .. })
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            RotationNumber::Exact(v) => Some(v),
            RotationNumber::Decimal { .. } => None,
        }
    }

    pub fn center(&self) -> &BigRational {
        match self {
            RotationNumber::Exact(v) => v,
            RotationNumber::Decimal { value, .. } => value,
        }
    }

    pub fn interval(&self) -> Interval {
        match self {
            RotationNumber::Exact(v) => Interval::exact(v.clone()),
            RotationNumber::Decimal { value, err } => Interval::around(value, err),
        }
    }

    /// `m * theta / 2pi` as an interval.
    pub fn times(&self, m: i64) -> Interval {
        self.interval().scale_int(m)
    }

    pub fn validate(&self) -> Result<()> {
        let half = rat(1, 2);
        let range = self.interval();
        if let RotationNumber::Decimal { err, .. } = self {
            if !err.is_positive() {
                return Err(Error::Validation(format!(
                    "rotation number {self}: decimal error bound must be positive"
                )));
            }
            if *err >= max_decimal_error() {
                return Err(Error::Validation(format!(
                    "rotation number {self}: decimal error bound must be below 1e-12"
                )));
            }
        }
        if !range.lo().is_positive() || *range.hi() >= BigRational::one() {
            return Err(Error::Validation(format!(
                "rotation number {self} must lie strictly between 0 and 1 (angle in (0, 2pi))"
            )));
        }
        if range.contains(&half) {
            return Err(Error::Validation(format!(
                "rotation number {self} must differ from 1/2 (angle pi is excluded)"
            )));
        }
        Ok(())
    }

    /// For decimals: no rational with denominator `<= limit` may lie in the
    /// enclosing interval. This guarantees `m * value` is decidable for all
    /// `m <= limit`.
    pub fn check_resolution(&self, limit: u64) -> Result<()> {
        let RotationNumber::Decimal { .. } = self else {
            return Ok(());
        };
        let range = self.interval();
        let nearest = simplest_rational_in(range.lo(), range.hi());
        if nearest.denom() <= &BigInt::from(limit) {
            return Err(Error::Validation(format!(
                "decimal rotation number {self} is within its error of the rational {} \
                 (resolution limit {limit}); it cannot be treated as irrational",
                format_rational(&nearest)
            )));
        }
        Ok(())
    }

    /// Angle in radians, for floating-point spectral checks.
    pub fn angle(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.interval().to_f64()
    }

    /// True when the angle lies in `(pi, 2pi)`.
    pub fn in_upper_half_turn(&self) -> bool {
        self.center() > &rat(1, 2)
    }
}

/// Terminating decimal expansion of `r`, if it has one.
pub fn format_decimal(r: &BigRational) -> Option<String> {
    let mut den = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut twos = 0usize;
    let mut fives = 0usize;
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    let digits = twos.max(fives);
    let scaled = r * BigRational::from_integer(num_traits::pow(BigInt::from(10), digits));
    let n = scaled.to_integer();
    if digits == 0 {
        return Some(n.to_string());
    }
    let negative = n.is_negative();
    let mut s = n.abs().to_string();
    if s.len() <= digits {
        s = format!("{}{}", "0".repeat(digits - s.len() + 1), s);
    }
    let (whole, frac) = s.split_at(s.len() - digits);
    Some(format!("{}{}.{}", if negative { "-" } else { "" }, whole, frac))
}

impl fmt::Display for RotationNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RotationNumber::Exact(v) => write!(f, "{}", format_rational(v)),
            RotationNumber::Decimal { value, err } => {
                let v = format_decimal(value).unwrap_or_else(|| format_rational(value));
                let e = format_decimal(err).unwrap_or_else(|| format_rational(err));
                write!(f, "{v}±{e}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_rotation_number_bounds() {
        assert!(RotationNumber::ratio(1, 4).is_ok());
        assert!(RotationNumber::ratio(3, 5).is_ok());
        assert!(RotationNumber::ratio(1, 2).is_err());
        assert!(RotationNumber::ratio(0, 1).is_err());
        assert!(RotationNumber::ratio(1, 1).is_err());
        assert!(RotationNumber::ratio(5, 4).is_err());
    }

    #[test]
    fn decimal_rotation_number_bounds() {
        assert!(RotationNumber::parse_decimal("0.6180339887498949", "1e-13").is_ok());
        // error bound too coarse
        assert!(RotationNumber::parse_decimal("0.6180339887", "1e-10").is_err());
        assert!(RotationNumber::parse_decimal("0.6180339887498949", "0").is_err());
        // interval crosses 1/2
        assert!(RotationNumber::parse_decimal("0.5", "1e-13").is_err());
    }

    #[test]
    fn resolution_rejects_decimals_near_small_fractions() {
        let near_third = RotationNumber::parse_decimal("0.333333333333", "1e-13").unwrap();
        assert!(near_third.check_resolution(10).is_ok());
        let on_third = RotationNumber::parse_decimal("0.33333333333333", "1e-13").unwrap();
        assert!(on_third.check_resolution(10).is_err());
        let golden = RotationNumber::parse_decimal("0.6180339887498949", "1e-13").unwrap();
        assert!(golden.check_resolution(DEFAULT_RESOLUTION_LIMIT).is_ok());
    }

    #[test]
    fn decimal_formatting_round_trips() {
        for s in ["0.6180339887498949", "0.0000000000001", "12.5", "-0.75", "3"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(parse_rational(&format_decimal(&r).unwrap()).unwrap(), r);
        }
        assert_eq!(format_decimal(&rat(1, 3)), None);
        assert_eq!(format_decimal(&rat(1, 8)).unwrap(), "0.125");
    }
}
