//! Sparse systems of increasing bijections glued from a countable set of
//! transition atoms.

mod atom;
mod map;
mod registry;
mod report;
pub mod schedule;

pub use atom::{AtomKey, ExactValue, TransitionAtom};
pub use map::{build_core, build_default, Evaluation, InverseEvaluation, Provenance, Sample, Side, SparsePiecewiseMap, DEFAULT_DEPTH};
pub use registry::AtomRegistry;
pub use report::{derivative_audit, piece_envelope, sparseness_report, DerivativeAudit, ReportRow, SparsenessReport};
pub use schedule::{Explicit, Halving, Schedule};
