//! Finite-level witnesses for the two-valued family on the Cantor set and
//! the discreteness of analytic equalizers.

mod cantor;
mod equalizer;
mod family;

pub use cantor::{CantorApprox, Gap, MAX_LEVEL};
pub use equalizer::{equalizer_demo, isolate_roots, lookup, AnalyticFn, EqualizerReport, PairEqualizers, REGISTRY};
pub use family::{
    build_flat_on_cantor, distinct_windows, family_member, sample_family, separating_point, two_value_check, unit_grid,
    window_count, FlatOnCantorFunction, TwoValueReport, TwoValuedFamilyMember, TWO_VALUE_TOL,
};
