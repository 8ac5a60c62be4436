//! Transition atoms `t_{p,q,Δ,Γ,i}(x) = q + (Γ / y(Δ,i)) s_{Δ,i}(x − p)`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::flat::{end_value, TransitionFunction};

/// `anchor + offset`, compared exactly. Values near `y_P` differ from it by
/// far less than an `f64` ulp, so the anchor carries the leading part.
#[derive(Clone, Serialize)]
pub struct ExactValue {
    pub anchor: Dyadic,
    pub offset: f64,
}

impl ExactValue {
    pub fn exact(v: Dyadic) -> Self {
        ExactValue { anchor: v, offset: 0.0 }
    }

    pub fn to_dyadic(&self) -> Dyadic {
        &self.anchor + &Dyadic::from_f64(self.offset).expect("finite offset")
    }

    pub fn to_f64(&self) -> f64 {
        self.to_dyadic().to_f64()
    }

    /// `self − other`, rounded once.
    pub fn diff(&self, other: &ExactValue) -> f64 {
        (&self.to_dyadic() - &other.to_dyadic()).to_f64()
    }
}

impl fmt::Debug for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {:e}", self.anchor, self.offset)
    }
}

impl PartialEq for ExactValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExactValue {}

impl PartialOrd for ExactValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactValue {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.anchor == other.anchor {
            return self.offset.total_cmp(&other.offset);
        }
        self.to_dyadic().cmp(&other.to_dyadic())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AtomKey {
    pub p: Dyadic,
    pub q: Dyadic,
    pub delta: Dyadic,
    pub gamma: Dyadic,
    pub i: u32,
}

#[derive(Clone)]
pub struct TransitionAtom {
    key: AtomKey,
    delta: f64,
    ratio: f64,
    transition: Arc<TransitionFunction<f64>>,
}

impl fmt::Debug for TransitionAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransitionAtom").field("key", &self.key).field("ratio", &self.ratio).finish()
    }
}

impl TransitionAtom {
    /// Admits the atom iff `Γ ≤ y(Δ, i)`, compared exactly.
    pub fn new(key: AtomKey, transition: Arc<TransitionFunction<f64>>) -> Result<Self> {
        let delta = key.delta.to_f64();
        if transition.delta() != delta || Dyadic::from_f64(delta)? != key.delta {
            return Err(Error::NotAdmissible(format!("transition span {} does not match Δ = {}", transition.delta(), key.delta)));
        }
        if !key.gamma.is_positive() {
            return Err(Error::NotAdmissible(format!("Γ = {} is not positive", key.gamma)));
        }
        let y = end_value(&transition);
        if key.gamma > Dyadic::from_f64(y)? {
            return Err(Error::NotAdmissible(format!("Γ / y(Δ, i) = {} exceeds 1", key.gamma.to_f64() / y)));
        }
        let ratio = (key.gamma.to_f64() / y).min(1.0);
        Ok(TransitionAtom { key, delta, ratio, transition })
    }

    pub fn key(&self) -> &AtomKey {
        &self.key
    }

    /// `Γ / y(Δ, i)`, at most 1.
    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn flatness_index(&self) -> u32 {
        self.key.i
    }

    pub fn transition(&self) -> &TransitionFunction<f64> {
        &self.transition
    }

    pub fn domain(&self) -> (Dyadic, Dyadic) {
        (self.key.p.clone(), &self.key.p + &self.key.delta)
    }

    pub fn range(&self) -> (Dyadic, Dyadic) {
        (self.key.q.clone(), &self.key.q + &self.key.gamma)
    }

    /// Local coordinate `x − p`, rounded once and clamped to `[0, Δ]`.
    pub fn local(&self, x: &Dyadic) -> f64 {
        (x - &self.key.p).to_f64().clamp(0.0, self.delta)
    }

    /// `t(p + local)`, anchored at whichever range endpoint is nearer.
    pub fn value_at_local(&self, local: f64) -> ExactValue {
        if local <= self.delta / 2.0 {
            let s = self.transition.eval(local, 0).expect("order 0");
            ExactValue { anchor: self.key.q.clone(), offset: self.ratio * s }
        } else {
            let c = self.transition.complement(local);
            ExactValue { anchor: &self.key.q + &self.key.gamma, offset: -(self.ratio * c) }
        }
    }

    pub fn value(&self, x: &Dyadic) -> ExactValue {
        self.value_at_local(self.local(x))
    }

    /// `t^(k)` at `x`, `k ≥ 1`.
    pub fn derivative(&self, x: &Dyadic, k: usize) -> Result<f64> {
        if k == 0 {
            return Ok(self.value(x).to_f64());
        }
        Ok(self.ratio * self.transition.eval(self.local(x), k)?)
    }

    /// Local coordinate whose image is `w`, for `w` in the range.
    pub fn solve(&self, w: &Dyadic) -> f64 {
        let (q0, q1) = self.range();
        let below = (w - &q0).to_f64();
        let above = (&q1 - w).to_f64();
        let (mut lo, mut hi) = (0.0f64, self.delta);
        if below <= above {
            // ratio · s(x) = below, s increasing
            let target = below / self.ratio;
            while lo < hi {
                let mid = lo + (hi - lo) / 2.0;
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.transition.eval(mid, 0).expect("order 0") < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if target - self.transition.eval(lo, 0).expect("order 0") <= self.transition.eval(hi, 0).expect("order 0") - target {
                lo
            } else {
                hi
            }
        } else {
            // ratio · (y − s(x)) = above, decreasing
            let target = above / self.ratio;
            while lo < hi {
                let mid = lo + (hi - lo) / 2.0;
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.transition.complement(mid) > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if self.transition.complement(lo) - target <= target - self.transition.complement(hi) {
                lo
            } else {
                hi
            }
        }
    }
}
