//! Monotone transition functions `s = (1/A') ∫ b` on `[0, Δ]`.

use super::bump::{FlatSpline, FlatSynth};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::weights::WeightSequence;

#[derive(Debug, Clone)]
pub struct TransitionFunction<F> {
    spline: FlatSpline<F>,
    rescale: F,
    end_value: F,
    flat_index: usize,
    a_factor: F,
    bound_table: Vec<F>,
}

/// Transition `s_{Δ,i}` on `[0, Δ]` with flatness `ε = 1/i`.
pub fn make_transition<F: Real>(
    delta: F,
    i: u32,
    seq: &WeightSequence<F>,
    k_max: usize,
) -> Result<TransitionFunction<F>> {
    let synth = FlatSynth::new(seq, k_max)?;
    make_transition_with(&synth, delta, i)
}

pub fn make_transition_with<F: Real>(synth: &FlatSynth<F>, delta: F, i: u32) -> Result<TransitionFunction<F>> {
    if i == 0 {
        return Err(Error::InvalidArgument("flatness index i must be at least 1".into()));
    }
    if !(delta.is_finite() && delta > F::zero()) {
        return Err(Error::InvalidArgument(format!("Δ must be positive, got {delta}")));
    }
    let epsilon = F::one() / F::lit(i as f64);
    let spline = synth.bump(F::zero(), delta, epsilon)?;
    TransitionFunction::from_bump(spline, synth.sequence())
}

impl<F: Real> TransitionFunction<F> {
    /// Wraps `s_0 = ∫ b` and normalizes it by `max(1, A)`.
    ///
    /// `N` is the first index from which `M_{k-1}/M_k < ε` holds through
    /// `K_max`; beyond it `‖s_0^(k)‖ ≤ ε^{k-1} M_{k-1} < ε^k M_k` already.
    /// `A` is the worst ratio `‖s_0^(k)‖ / (ε^k M_k)` below `N`, with the
    /// norms taken from the analytic certificate of `b`.
    pub fn from_bump(spline: FlatSpline<F>, seq: &WeightSequence<F>) -> Result<Self> {
        let k_max = spline.certified_order();
        let epsilon = spline.epsilon();
        let ln_eps = epsilon.ln();
        let below = |k: usize| -> Result<bool> { Ok(seq.log_m(k - 1)? - seq.log_m(k)? < ln_eps) };
        let mut flat_index = k_max + 1;
        for n in (1..=k_max).rev() {
            if below(n)? {
                flat_index = n;
            } else {
                break;
            }
        }
        let bound = |k: usize| -> Result<F> { Ok((F::from_usize_lossy(k) * ln_eps + seq.log_m(k)?).exp()) };
        let mut a_factor = spline.total_integral() / bound(0)?;
        for k in 1..flat_index.min(k_max + 1) {
            a_factor = a_factor.max(spline.certified_norms()[k - 1] / bound(k)?);
        }
        let rescale = a_factor.max(F::one());
        let end_value = spline.total_integral() / rescale;
        if !(end_value > F::zero()) {
            return Err(Error::SynthesisFailed(format!("end value {end_value} underflows")));
        }
        let bound_table = (0..=k_max).map(bound).collect::<Result<Vec<F>>>()?;
        Ok(TransitionFunction { spline, rescale, end_value, flat_index, a_factor, bound_table })
    }

    /// The derivative profile `b`.
    pub fn spline(&self) -> &FlatSpline<F> {
        &self.spline
    }

    pub fn delta(&self) -> F {
        self.spline.interval().1 - self.spline.interval().0
    }

    pub fn rescale(&self) -> F {
        self.rescale
    }

    pub fn a_factor(&self) -> F {
        self.a_factor
    }

    pub fn flat_index(&self) -> usize {
        self.flat_index
    }

    pub fn certified_order(&self) -> usize {
        self.spline.certified_order()
    }

    /// Highest order [`TransitionFunction::eval`] supports.
    pub fn max_order(&self) -> usize {
        self.spline.max_order() + 1
    }

    /// `ε^k M_k`, `k = 0..=K_max`.
    pub fn bound_table(&self) -> &[F] {
        &self.bound_table
    }

    /// Analytic bounds on `‖s^(k)‖` after rescaling.
    pub fn certified_norms(&self) -> Vec<F> {
        let mut out = vec![self.end_value];
        out.extend(self.spline.certified_norms().iter().take(self.certified_order()).map(|&c| c / self.rescale));
        out
    }

    /// `s^(k)(x)` for `x` in local coordinates; constant outside `[0, Δ]`.
    pub fn eval(&self, x: F, k: usize) -> Result<F> {
        if k == 0 {
            return Ok(self.spline.integral_to(x) / self.rescale);
        }
        Ok(self.spline.eval(x, k - 1)? / self.rescale)
    }

    /// `y(Δ, i) − s(x)`, accurate where `s(x)` is close to the end value.
    pub fn complement(&self, x: F) -> F {
        self.spline.integral_from(x) / self.rescale
    }

    /// `s(x2) − s(x1)` without cancellation near either endpoint.
    pub fn increment(&self, x1: F, x2: F) -> F {
        let mid = self.delta() / F::lit(2.0);
        if x1 >= mid && x2 >= mid {
            self.complement(x1) - self.complement(x2)
        } else {
            (self.spline.integral_to(x2) - self.spline.integral_to(x1)) / self.rescale
        }
    }

    /// Raw end value `∫ b` before rescaling.
    pub fn raw_end_value(&self) -> F {
        self.spline.total_integral()
    }
}

/// `y(Δ, i) = s_{Δ,i}(Δ)`.
pub fn end_value<F: Real>(t: &TransitionFunction<F>) -> F {
    t.end_value
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq() -> WeightSequence<f64> {
        WeightSequence::gevrey(2.0, 40).unwrap()
    }

    #[test]
    fn starts_at_zero_and_is_flat_at_ends() {
        let t = make_transition(1.0, 2, &seq(), 8).unwrap();
        assert_eq!(t.eval(0.0, 0).unwrap(), 0.0);
        assert_eq!(t.eval(0.0, 1).unwrap(), 0.0);
        assert_eq!(t.eval(1.0, 1).unwrap(), 0.0);
        assert_eq!(t.eval(1.0, 0).unwrap(), end_value(&t));
        assert!(end_value(&t) > 0.0);
    }

    #[test]
    fn rescale_follows_a_factor() {
        for i in [1u32, 2, 5, 40] {
            let t = make_transition(0.5, i, &seq(), 8).unwrap();
            if t.a_factor() <= 1.0 {
                assert_eq!(t.rescale(), 1.0);
                assert_eq!(end_value(&t), t.raw_end_value());
            } else {
                assert_eq!(t.rescale(), t.a_factor());
            }
            let norms = t.certified_norms();
            for (k, (&n, &b)) in norms.iter().zip(t.bound_table()).enumerate().skip(1) {
                assert!(n <= b * (1.0 + 1e-12), "i = {i}, k = {k}: {n} > {b}");
            }
        }
    }

    #[test]
    fn flat_index_for_gevrey2() {
        // 1/k^2 < 1/5 first holds at k = 3
        let t = make_transition(1.0, 5, &seq(), 8).unwrap();
        assert_eq!(t.flat_index(), 3);
        let t = make_transition(1.0, 1, &seq(), 8).unwrap();
        assert_eq!(t.flat_index(), 2);
    }

    #[test]
    fn doubling_amplitude_doubles_raw_end_value() {
        let t = make_transition(1.0, 1, &seq(), 8).unwrap();
        let doubled = t.spline().with_amplitude(2.0 * t.spline().amplitude(), &seq()).unwrap();
        assert_eq!(doubled.total_integral(), 2.0 * t.raw_end_value());
    }

    #[test]
    fn end_value_below_mean_value_bound() {
        for i in [1u32, 3] {
            let t = make_transition(2.0, i, &seq(), 8).unwrap();
            let eps = 1.0 / i as f64;
            let m1 = seq().m(1).unwrap();
            assert!(end_value(&t) <= 2.0 * eps * m1);
        }
    }

    #[test]
    fn complement_and_increment_are_consistent() {
        let t = make_transition(1.0, 1, &seq(), 8).unwrap();
        for &x in &[0.1, 0.4, 0.6, 0.95] {
            let s = t.eval(x, 0).unwrap();
            assert!((s + t.complement(x) - end_value(&t)).abs() < 1e-15);
        }
        assert!(t.increment(0.9999, 0.99995) > 0.0);
        assert!(t.increment(0.00001, 0.00002) > 0.0);
    }

    #[test]
    fn zero_index_rejected() {
        assert!(make_transition(1.0, 0, &seq(), 8).is_err());
        assert!(make_transition(0.0, 1, &seq(), 8).is_err());
    }
}
