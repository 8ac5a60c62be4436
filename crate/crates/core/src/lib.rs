//! Denjoy-Carleman weight sequences, certified flat bump functions, sparse
//! systems of transition atoms, and finite-scale witnesses around
//! quasi-analyticity.
//!
//! Numeric code is generic over [`scalar::Real`] (`f32`, `f64`) or
//! [`scalar::Field`] (floats and rationals). The sparse and Cantor modules
//! work in `f64` with exact dyadic bookkeeping, since their values fall far
//! below the `f32` range.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dyadic;
pub mod envelope;
pub mod error;
pub mod flat;
pub mod poly;
pub mod scalar;
pub mod sparse;
pub mod weights;
pub mod wetzel;

pub use dyadic::Dyadic;
pub use error::{Error, Result};

pub type WeightSequence64 = weights::WeightSequence<f64>;
pub type WeightSequence32 = weights::WeightSequence<f32>;
pub type FlatSpline64 = flat::FlatSpline<f64>;
pub type FlatSpline32 = flat::FlatSpline<f32>;
pub type TransitionFunction64 = flat::TransitionFunction<f64>;
pub type PolyFamilyQ = poly::PolyFamilyQ;
pub type PolyFamily64 = poly::PolyFamily<f64>;
