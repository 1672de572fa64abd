//! Exact dyadic rationals `p / 2^k` and the rational type used for support endpoints.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact rational number. Support endpoints of a PL map may be non-dyadic.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberParseError {
    #[error("malformed number `{0}`")]
    Malformed(String),
    #[error("`{0}` is not a dyadic rational")]
    NotDyadic(String),
}

/// A dyadic rational `numerator / 2^exponent`.
///
/// Always canonical: either `exponent == 0` or the numerator is odd, so
/// structural equality is numeric equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    pub fn new(num: impl Into<BigInt>, exp: u32) -> Self {
        let mut d = Dyadic {
            num: num.into(),
            exp,
        };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic {
            num: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            num: BigInt::one(),
            exp: 0,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic::new(n, 0)
    }

    /// `2^k` for any integer `k`.
    pub fn pow2(k: i64) -> Self {
        if k >= 0 {
            Dyadic::new(BigInt::one() << k as usize, 0)
        } else {
            Dyadic::new(1, (-k) as u32)
        }
    }

    /// `1 - 2^-k`.
    pub fn one_minus_pow2(k: u32) -> Self {
        Dyadic::one() - Dyadic::pow2(-(k as i64))
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        if self.exp == 0 {
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0);
        let shift = tz.min(self.exp as u64) as u32;
        if shift > 0 {
            self.num >>= shift as usize;
            self.exp -= shift;
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.num.is_positive()
    }

    /// Multiply by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.num.is_zero() {
            return self.clone();
        }
        let e = self.exp as i64 - k;
        if e >= 0 {
            Dyadic::new(self.num.clone(), e as u32)
        } else {
            Dyadic::new(&self.num << (-e) as usize, 0)
        }
    }

    /// For a positive value, returns `(odd, log)` with `self = odd * 2^log`.
    pub(crate) fn odd_decomposition(&self) -> (BigInt, i64) {
        debug_assert!(self.is_positive());
        if self.exp > 0 {
            (self.num.clone(), -(self.exp as i64))
        } else {
            let tz = self.num.trailing_zeros().unwrap_or(0);
            (&self.num >> tz as usize, tz as i64)
        }
    }

    /// If `self / other` (both positive) is an integer power of two, its exponent.
    pub fn log2_ratio(&self, other: &Dyadic) -> Option<i64> {
        let (o1, l1) = self.odd_decomposition();
        let (o2, l2) = other.odd_decomposition();
        (o1 == o2).then_some(l1 - l2)
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.num.clone(), BigInt::one() << self.exp as usize)
    }

    /// Exact conversion when the denominator is a power of two.
    pub fn from_rational(q: &Rational) -> Option<Self> {
        let d = q.denom();
        let tz = d.trailing_zeros().unwrap_or(0);
        if (d >> tz as usize).is_one() {
            Some(Dyadic::new(q.numer().clone(), tz as u32))
        } else {
            None
        }
    }

    /// Midpoint `(a + b) / 2`.
    pub fn midpoint(a: &Dyadic, b: &Dyadic) -> Dyadic {
        (a.clone() + b.clone()).mul_pow2(-1)
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::zero()
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.exp.cmp(&other.exp) {
            Ordering::Equal => self.num.cmp(&other.num),
            Ordering::Less => {
                let lhs = &self.num << (other.exp - self.exp) as usize;
                lhs.cmp(&other.num)
            }
            Ordering::Greater => {
                let rhs = &other.num << (self.exp - other.exp) as usize;
                self.num.cmp(&rhs)
            }
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn aligned(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, u32) {
    let e = a.exp.max(b.exp);
    (
        &a.num << (e - a.exp) as usize,
        &b.num << (e - b.exp) as usize,
        e,
    )
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl<'a> Add<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = aligned(self, rhs);
        Dyadic::new(a + b, e)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        &self - &rhs
    }
}

impl<'a> Sub<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = aligned(self, rhs);
        Dyadic::new(a - b, e)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -self.num,
            exp: self.exp,
        }
    }
}

/// Written as an integer or as `p/2^k`.
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts `p`, `p/2^k` and `p/q` with `q` a power of two.
impl FromStr for Dyadic {
    type Err = NumberParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || NumberParseError::Malformed(s.to_string());
        match t.split_once('/') {
            None => Ok(Dyadic::new(t.parse::<BigInt>().map_err(|_| bad())?, 0)),
            Some((p, q)) => {
                let num = p.trim().parse::<BigInt>().map_err(|_| bad())?;
                let q = q.trim();
                if let Some(k) = q.strip_prefix("2^") {
                    let k: u32 = k.parse().map_err(|_| bad())?;
                    Ok(Dyadic::new(num, k))
                } else {
                    let den: BigInt = q.parse().map_err(|_| bad())?;
                    if !den.is_positive() {
                        return Err(bad());
                    }
                    Dyadic::from_rational(&Rational::new(num, den))
                        .ok_or_else(|| NumberParseError::NotDyadic(s.to_string()))
                }
            }
        }
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses `p`, `p/q` or `p/2^k` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, NumberParseError> {
    let t = s.trim();
    let bad = || NumberParseError::Malformed(s.to_string());
    match t.split_once('/') {
        None => Ok(Rational::from_integer(t.parse().map_err(|_| bad())?)),
        Some((p, q)) => {
            let num: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q = q.trim();
            let den: BigInt = if let Some(k) = q.strip_prefix("2^") {
                BigInt::one() << k.parse::<usize>().map_err(|_| bad())?
            } else {
                q.parse().map_err(|_| bad())?
            };
            if den.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(num, den))
        }
    }
}

/// Dyadic values print as `p/2^k`; everything else as `p/q`.
pub fn format_rational(q: &Rational) -> String {
    match Dyadic::from_rational(q) {
        Some(d) => d.to_string(),
        None => format!("{}/{}", q.numer(), q.denom()),
    }
}

pub(crate) fn is_integer_multiple(a: i64, b: i64) -> Option<i64> {
    if b == 0 {
        return None;
    }
    let (q, r) = a.div_rem(&b);
    (r == 0).then_some(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_form() {
        assert_eq!(Dyadic::new(4, 3), Dyadic::new(1, 1));
        assert_eq!(Dyadic::new(0, 7).exponent(), 0);
        assert_eq!(d("2/4"), d("1/2^1"));
        assert_eq!(d("3/2^2").to_string(), "3/2^2");
        assert_eq!(d("8/2^2").to_string(), "2");
    }

    #[test]
    fn parse_rejects_non_dyadic() {
        assert!(matches!(
            "1/3".parse::<Dyadic>(),
            Err(NumberParseError::NotDyadic(_))
        ));
        assert!("x/2".parse::<Dyadic>().is_err());
        assert!("1/0".parse::<Dyadic>().is_err());
    }

    #[test]
    fn ordering_across_exponents() {
        assert!(d("1/2") < d("3/4"));
        assert!(d("5/8") > d("1/2"));
        assert!(d("-1/2") < d("0"));
        assert_eq!(d("1/2").cmp(&d("2/4")), Ordering::Equal);
    }

    #[test]
    fn log2_ratio() {
        assert_eq!(d("1/4").log2_ratio(&d("1/2")), Some(-1));
        assert_eq!(d("3/8").log2_ratio(&d("3/2")), Some(-2));
        assert_eq!(d("3/4").log2_ratio(&d("1")), None);
        assert_eq!(d("2").log2_ratio(&d("3")), None);
    }

    #[test]
    fn rational_roundtrip() {
        let q = parse_rational("6/9").unwrap();
        assert_eq!(format_rational(&q), "2/3");
        assert_eq!(format_rational(&parse_rational("3/12").unwrap()), "1/2^2");
    }

    proptest! {
        #[test]
        fn text_roundtrip(n in -10_000i64..10_000, e in 0u32..40) {
            let x = Dyadic::new(n, e);
            let back: Dyadic = x.to_string().parse().unwrap();
            prop_assert_eq!(&back, &x);
            prop_assert_eq!(Dyadic::from_rational(&x.to_rational()), Some(x));
        }

        #[test]
        fn arithmetic_matches_rationals(a in -1000i64..1000, ea in 0u32..20, b in -1000i64..1000, eb in 0u32..20) {
            let x = Dyadic::new(a, ea);
            let y = Dyadic::new(b, eb);
            prop_assert_eq!((x.clone() + y.clone()).to_rational(), x.to_rational() + y.to_rational());
            prop_assert_eq!((x.clone() - y.clone()).to_rational(), x.to_rational() - y.to_rational());
            prop_assert_eq!(x.cmp(&y), x.to_rational().cmp(&y.to_rational()));
        }
    }
}
