//! Scalar abstractions.
//!
//! Floating-point numerics (weights, bump synthesis, envelopes) are written
//! against [`Real`], implemented for `f32` and `f64`. Polynomial work that
//! benefits from exact arithmetic is written against [`Field`], which also
//! covers the rational types from `num-rational`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal. Never fails for the finite literals used in this crate.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Scalar field used for polynomial interpolation.
///
/// Floating types compare with a relative tolerance; rational types compare
/// exactly and ignore the tolerance.
pub trait Field: Num + Clone + Debug + Signed + PartialOrd + Send + Sync {
    fn from_i64(v: i64) -> Self;

    /// Equality up to `rel_tol` (relative to `max(1, |a|, |b|)`).
    fn near(&self, other: &Self, rel_tol: f64) -> bool;

    /// Lossy conversion for reporting.
    fn to_f64_lossy(&self) -> f64;

    /// `true` for exact arithmetic (no rounding).
    const EXACT: bool;
}

macro_rules! float_field {
    ($t:ty) => {
        impl Field for $t {
            fn from_i64(v: i64) -> Self {
                v as $t
            }
            fn near(&self, other: &Self, rel_tol: f64) -> bool {
                let a = *self as f64;
                let b = *other as f64;
                let scale = 1f64.max(a.abs()).max(b.abs());
                (a - b).abs() <= rel_tol * scale
            }
            fn to_f64_lossy(&self) -> f64 {
                *self as f64
            }
            const EXACT: bool = false;
        }
    };
}

float_field!(f32);
float_field!(f64);

impl Field for Rational64 {
    fn from_i64(v: i64) -> Self {
        Rational64::from_integer(v)
    }
    fn near(&self, other: &Self, _rel_tol: f64) -> bool {
        self == other
    }
    fn to_f64_lossy(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
    const EXACT: bool = true;
}

impl Field for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn near(&self, other: &Self, _rel_tol: f64) -> bool {
        self == other
    }
    fn to_f64_lossy(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        self.to_f64().unwrap_or(f64::NAN)
    }
    const EXACT: bool = true;
}

/// Largest power of two not exceeding `x` (`x > 0`, finite).
pub(crate) fn floor_pow2<F: Real>(x: F) -> F {
    let two = F::lit(2.0);
    let e = x.log2().floor();
    let mut p = two.powf(e);
    // log2 can be off by one ulp near exact powers of two
    while p > x {
        p = p / two;
    }
    while p * two <= x {
        p = p * two;
    }
    p
}
