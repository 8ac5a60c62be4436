//! Exact dyadic rationals `m · 2^e`.
//!
//! Every finite `f64` is a dyadic rational, and dyadics are closed under
//! addition, subtraction, multiplication and halving, which is all the
//! transition-atom bookkeeping needs. Values are kept normalized (odd
//! mantissa, or zero with exponent 0) so that structural equality and hashing
//! coincide with numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn from_int(v: i64) -> Self {
        Self::new(BigInt::from(v), 0)
    }

    /// `mant · 2^exp`, normalized.
    pub fn new(mant: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    /// `2^exp`.
    pub fn pow2(exp: i64) -> Self {
        Dyadic { mant: BigInt::one(), exp }
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
    }

    /// Exact conversion of a finite float.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::Dyadic(format!("non-finite value {x}")));
        }
        if x == 0.0 {
            return Ok(Self::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Ok(Self::new(BigInt::from(mant) * sign, exp))
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.sign() == Sign::Plus
    }

    pub fn is_negative(&self) -> bool {
        self.mant.sign() == Sign::Minus
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn abs(&self) -> Self {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    /// Exact multiplication by `2^k`.
    pub fn scale_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { mant: self.mant.clone(), exp: self.exp + k }
    }

    pub fn half(&self) -> Self {
        self.scale_pow2(-1)
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Number of significant bits in the mantissa.
    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    /// Nearest `f64` (ties to even). Saturates to ±∞ / 0 outside the range.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let negative = self.is_negative();
        let mut m = self.mant.abs();
        let mut e = self.exp;
        let bits = m.bits();
        if bits > 64 {
            let shift = bits - 64;
            let sticky = (m.trailing_zeros().unwrap_or(0)) < shift;
            m >>= shift;
            e += shift as i64;
            if sticky {
                m |= BigInt::one();
            }
        }
        let top = m.to_u64().expect("fits in 64 bits");
        let v = ldexp(top as f64, e);
        // `top as f64` rounds once; ldexp is exact unless the result is subnormal
        if negative {
            -v
        } else {
            v
        }
    }

    /// Largest integer `≤ self`.
    pub fn floor_int(&self) -> BigInt {
        if self.exp >= 0 {
            return &self.mant << self.exp as u64;
        }
        // BigInt >> is an arithmetic shift: rounds toward −∞
        &self.mant >> (-self.exp) as u64
    }
}

/// `x · 2^e` without intermediate overflow.
pub(crate) fn ldexp(mut x: f64, mut e: i64) -> f64 {
    const STEP: i64 = 1000;
    while e > STEP {
        x *= 2f64.powi(STEP as i32);
        e -= STEP;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -STEP {
        x *= 2f64.powi(-STEP as i32);
        e += STEP;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

fn align(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, i64) {
    let e = a.exp.min(b.exp);
    let ma = &a.mant << (a.exp - e) as u64;
    let mb = &b.mant << (b.exp - e) as u64;
    (ma, mb, e)
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (a, b, e) = align(self, rhs);
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        if rhs.is_zero() {
            return self.clone();
        }
        let (a, b, e) = align(self, rhs);
        Dyadic::new(a - b, e)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mant * &rhs.mant, self.exp + rhs.exp)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: &Dyadic) -> Dyadic {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.mant.sign(), other.mant.sign()) {
            (a, b) if a != b => {
                let rank = |s: Sign| match s {
                    Sign::Minus => 0,
                    Sign::NoSign => 1,
                    Sign::Plus => 2,
                };
                rank(a).cmp(&rank(b))
            }
            _ => {
                let (a, b, _) = align(self, other);
                a.cmp(&b)
            }
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// `m*2^e` notation; round-trips through [`str::parse`].
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.mant)
        } else {
            write!(f, "{}*2^{}", self.mant, self.exp)
        }
    }
}

impl std::str::FromStr for Dyadic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Dyadic(format!("cannot parse '{s}'"));
        match s.split_once("*2^") {
            Some((m, e)) => {
                let mant: BigInt = m.trim().parse().map_err(|_| bad())?;
                let exp: i64 = e.trim().parse().map_err(|_| bad())?;
                Ok(Dyadic::new(mant, exp))
            }
            None => {
                if let Ok(m) = s.parse::<BigInt>() {
                    return Ok(Dyadic::new(m, 0));
                }
                let x: f64 = s.parse().map_err(|_| bad())?;
                Dyadic::from_f64(x)
            }
        }
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(x: f64) -> Dyadic {
        Dyadic::from_f64(x).unwrap()
    }

    #[test]
    fn float_round_trip_is_exact() {
        for &x in &[0.0, 1.0, -1.0, 0.1, 3.5e-300, 5e-324, 1.7e308, -2.25] {
            assert_eq!(d(x).to_f64(), x, "{x}");
        }
    }

    #[test]
    fn normalization_makes_equality_numeric() {
        let a = Dyadic::new(BigInt::from(6), -2);
        let b = Dyadic::new(BigInt::from(3), -1);
        assert_eq!(a, b);
        assert_eq!(Dyadic::new(BigInt::zero(), 17), Dyadic::zero());
    }

    #[test]
    fn arithmetic_beyond_f64_precision() {
        let one = Dyadic::from_int(1);
        let tiny = Dyadic::pow2(-400);
        let s = &one + &tiny;
        assert!(s > one);
        assert_eq!(&s - &one, tiny);
        assert_eq!(s.to_f64(), 1.0);
        assert_eq!(s.bits(), 401);
    }

    #[test]
    fn ordering_with_signs() {
        assert!(d(-1.0) < Dyadic::zero());
        assert!(Dyadic::zero() < d(1e-300));
        assert!(d(-2.0) < d(-1.5));
        assert!(d(0.5) < d(0.75));
    }

    #[test]
    fn display_parse_round_trip() {
        let x = &d(0.1) - &Dyadic::pow2(-80);
        let s = x.to_string();
        assert_eq!(s.parse::<Dyadic>().unwrap(), x);
        assert_eq!("0.25".parse::<Dyadic>().unwrap(), Dyadic::pow2(-2));
    }

    #[test]
    fn floor_int_rounds_down() {
        assert_eq!(d(2.75).floor_int(), BigInt::from(2));
        assert_eq!(d(-2.25).floor_int(), BigInt::from(-3));
        assert_eq!(d(-3.0).floor_int(), BigInt::from(-3));
    }

    #[test]
    fn to_f64_rounds_to_nearest() {
        // 1 + 2^-53 + 2^-100 is just above the midpoint between 1 and 1 + 2^-52
        let x = &(&Dyadic::from_int(1) + &Dyadic::pow2(-53)) + &Dyadic::pow2(-100);
        assert_eq!(x.to_f64(), 1.0 + f64::EPSILON);
    }

    proptest! {
        #[test]
        fn add_sub_consistent_with_float(a in -1e6f64..1e6, b in -1e6f64..1e6) {
            let (da, db) = (d(a), d(b));
            prop_assert_eq!((&da + &db).to_f64(), a + b);
            prop_assert_eq!(&(&da - &db) + &db, da.clone());
            prop_assert_eq!(da.cmp(&db), a.partial_cmp(&b).unwrap());
            prop_assert_eq!((&da * &db).to_f64(), a * b);
        }
    }
}
