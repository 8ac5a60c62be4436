//! Offsets `d_i = x_P − p_i` of the core breakpoints.

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

/// Supplies `d_1 > d_2 > … > 0` with every `Δ_i = d_i − d_{i+1}` exactly
/// representable as an `f64`.
pub trait Schedule: Send + Sync {
    /// `d_i` for `i ≥ 1`, or `None` past the end of a finite schedule.
    fn offset(&self, i: u32) -> Option<Dyadic>;
}

/// `d_i = 2^{1−i}`, so `Δ_i = 2^{−i}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Halving;

impl Schedule for Halving {
    fn offset(&self, i: u32) -> Option<Dyadic> {
        (i >= 1).then(|| Dyadic::pow2(1 - i as i64))
    }
}

/// A finite list `d_1, …, d_n`.
#[derive(Debug, Clone)]
pub struct Explicit {
    offsets: Vec<Dyadic>,
}

impl Explicit {
    pub fn new(offsets: Vec<Dyadic>) -> Result<Self> {
        validate(&offsets)?;
        Ok(Explicit { offsets })
    }
}

impl Schedule for Explicit {
    fn offset(&self, i: u32) -> Option<Dyadic> {
        (i >= 1).then(|| self.offsets.get(i as usize - 1).cloned()).flatten()
    }
}

/// Checks positivity, strict decrease and that each span fits an `f64`.
pub fn validate(offsets: &[Dyadic]) -> Result<()> {
    for (i, d) in offsets.iter().enumerate() {
        if !d.is_positive() {
            return Err(Error::InvalidSchedule(format!("d_{} = {d} is not positive", i + 1)));
        }
    }
    for (i, w) in offsets.windows(2).enumerate() {
        if w[1] >= w[0] {
            return Err(Error::InvalidSchedule(format!(
                "p_i must increase: d_{} = {} is not below d_{} = {}",
                i + 2,
                w[1],
                i + 1,
                w[0]
            )));
        }
        let span = &w[0] - &w[1];
        if Dyadic::from_f64(span.to_f64()).ok().as_ref() != Some(&span) {
            return Err(Error::InvalidSchedule(format!("span Δ_{} = {span} is not an exact f64", i + 1)));
        }
    }
    Ok(())
}

/// First `n + 1` offsets of `schedule`.
pub(crate) fn take(schedule: &dyn Schedule, n: u32) -> Result<Vec<Dyadic>> {
    let offsets = (1..=n + 1)
        .map(|i| {
            schedule
                .offset(i)
                .ok_or_else(|| Error::InvalidSchedule(format!("schedule ends before d_{i} (depth {n} requested)")))
        })
        .collect::<Result<Vec<_>>>()?;
    validate(&offsets)?;
    Ok(offsets)
}
