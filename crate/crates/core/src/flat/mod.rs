//! Flat bump functions and monotone transitions with certified derivative
//! bounds.

mod bump;
mod hughes;
mod piecewise;
mod transition;

pub use bump::{make_bump, BumpCertificate, FlatSpline, FlatSynth, DEFAULT_K_MAX};
pub use hughes::{hughes_lambda, HughesConstants};
pub use transition::{end_value, make_transition, make_transition_with, TransitionFunction};
