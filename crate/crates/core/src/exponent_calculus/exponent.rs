use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ExponentError;

/// Exact rational number used for every exponent identity.
pub type Rational = BigRational;

/// Builds the rational `num/den`. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    BigRational::from_integer(BigInt::from(value))
}

/// Renders a rational as `n` or `n/d`.
pub fn fmt_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Parses `n`, `-n` or `n/d` into an exact rational. Decimals are refused.
pub fn parse_rational(text: &str) -> Result<Rational, ExponentError> {
    let text = text.trim();
    let bad = || ExponentError::Parse(text.to_string());
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let valid = |s: &str| {
        let digits = s.strip_prefix('-').unwrap_or(s);
        !digits.is_empty() && digits.len() <= 4096 && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num) || !valid(den) || den.starts_with('-') {
        return Err(bad());
    }
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// A Lebesgue exponent in `[1, ∞]`, stored through its reciprocal so that the
/// endpoint `∞` is the ordinary rational `0` and every Hölder or Sobolev
/// relation is plain addition.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Exponent {
    inv: Rational,
}

impl Exponent {
    pub fn infinity() -> Self {
        Exponent { inv: Rational::zero() }
    }

    pub fn one() -> Self {
        Exponent { inv: Rational::one() }
    }

    pub fn integer(value: i64) -> Result<Self, ExponentError> {
        Self::new(int(value))
    }

    pub fn fraction(num: i64, den: i64) -> Result<Self, ExponentError> {
        if den == 0 {
            return Err(ExponentError::Parse(format!("{num}/{den}")));
        }
        Self::new(ratio(num, den))
    }

    /// Finite exponent with the given value; values below one are rejected.
    pub fn new(value: Rational) -> Result<Self, ExponentError> {
        if value < Rational::one() {
            return Err(ExponentError::BelowOne(fmt_rational(&value)));
        }
        Ok(Exponent { inv: value.recip() })
    }

    /// Exponent whose reciprocal is `inv`; `inv` must lie in `[0, 1]`.
    pub fn from_reciprocal(inv: Rational) -> Result<Self, ExponentError> {
        if inv.is_negative() || inv > Rational::one() {
            return Err(ExponentError::BelowOne(if inv.is_zero() {
                "inf".into()
            } else {
                fmt_rational(&inv.recip())
            }));
        }
        Ok(Exponent { inv })
    }

    pub fn reciprocal(&self) -> &Rational {
        &self.inv
    }

    pub fn is_infinite(&self) -> bool {
        self.inv.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.inv.is_one()
    }

    /// True for exponents in the open interval `(1, ∞)`.
    pub fn is_interior(&self) -> bool {
        !self.is_infinite() && !self.is_one()
    }

    pub fn value(&self) -> Option<Rational> {
        (!self.is_infinite()).then(|| self.inv.recip())
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        match self.value() {
            Some(v) => v.to_f64().unwrap_or(f64::INFINITY),
            None => f64::INFINITY,
        }
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        other.inv.cmp(&self.inv)
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            None => f.write_str("inf"),
            Some(v) => f.write_str(&fmt_rational(&v)),
        }
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Exponent({self})")
    }
}

impl FromStr for Exponent {
    type Err = ExponentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if matches!(t, "inf" | "infinity" | "∞" | "Inf" | "INF") {
            return Ok(Exponent::infinity());
        }
        Exponent::new(parse_rational(t)?)
    }
}

impl serde::Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// A (time, space) exponent pair, e.g. the class `L^α(0,T;L^β)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct ExponentPair {
    pub time: Exponent,
    pub space: Exponent,
}

impl ExponentPair {
    pub fn new(time: Exponent, space: Exponent) -> Self {
        ExponentPair { time, space }
    }

    pub fn fractions(time: (i64, i64), space: (i64, i64)) -> Result<Self, ExponentError> {
        Ok(ExponentPair {
            time: Exponent::fraction(time.0, time.1)?,
            space: Exponent::fraction(space.0, space.1)?,
        })
    }

    /// `1/time + 1/space`.
    pub fn reciprocal_sum(&self) -> Rational {
        self.time.reciprocal() + self.space.reciprocal()
    }
}

impl fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.time, self.space)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_infinity() {
        assert_eq!("9/5".parse::<Exponent>().unwrap().to_string(), "9/5");
        assert_eq!("18/10".parse::<Exponent>().unwrap().to_string(), "9/5");
        assert_eq!(" 4 ".parse::<Exponent>().unwrap().to_string(), "4");
        assert!("inf".parse::<Exponent>().unwrap().is_infinite());
        assert!("∞".parse::<Exponent>().unwrap().is_infinite());
        assert!("1".parse::<Exponent>().unwrap().is_one());
    }

    #[test]
    fn rejects_malformed_and_small() {
        for bad in ["", "1.5", "3/0", "a/b", "/3", "3/", "1/2", "-3", "3/-1", "2//3", "+2"] {
            assert!(bad.parse::<Exponent>().is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn ordering_follows_values() {
        let two = Exponent::integer(2).unwrap();
        let three = Exponent::integer(3).unwrap();
        assert!(two < three);
        assert!(three < Exponent::infinity());
        assert!(Exponent::one() < two);
    }

    #[test]
    fn serde_uses_fraction_strings() {
        let pair = ExponentPair::fractions((6, 5), (3, 2)).unwrap();
        let json = serde_json::to_string(&pair).unwrap();
        assert_eq!(json, r#"{"time":"6/5","space":"3/2"}"#);
        let back: ExponentPair = serde_json::from_str(&json).unwrap();
        assert_eq!(back, pair);
    }
}
