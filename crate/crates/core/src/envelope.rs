//! Fitting and checking envelopes `‖f^(k)‖ ≤ β B^k M_k` against measured
//! derivative norms.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flat::{FlatSpline, TransitionFunction};
use crate::scalar::Real;
use crate::sparse::SparsePiecewiseMap;
use crate::weights::WeightSequence;
use crate::wetzel::{AnalyticFn, FlatOnCantorFunction};

/// Slack below which an envelope counts as violated.
pub const FEASIBILITY_TOL: f64 = 1e-12;
/// Relative change between grid densities accepted as converged.
pub const CONVERGENCE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormSource {
    Analytic,
    SampledGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeNormProfile<F> {
    norms: Vec<F>,
    interval: (F, F),
    source: NormSource,
}

impl<F: Real> DerivativeNormProfile<F> {
    pub fn new(norms: Vec<F>, interval: (F, F), source: NormSource) -> Result<Self> {
        if norms.is_empty() {
            return Err(Error::InvalidArgument("profile needs at least d_0".into()));
        }
        if let Some(k) = norms.iter().position(|d| !(d.is_finite() && *d >= F::zero())) {
            return Err(Error::InvalidArgument(format!("d_{k} = {} is not a finite nonnegative norm", norms[k])));
        }
        Ok(DerivativeNormProfile { norms, interval, source })
    }

    pub fn norms(&self) -> &[F] {
        &self.norms
    }

    /// Highest order `K` present.
    pub fn order(&self) -> usize {
        self.norms.len() - 1
    }

    pub fn interval(&self) -> (F, F) {
        self.interval
    }

    pub fn source(&self) -> NormSource {
        self.source
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EnvelopeFit<F> {
    pub beta: F,
    pub big_b: F,
    /// `min_k ln(β B^k M_k) − ln d_k`
    pub slack: F,
    pub argmin: usize,
    pub feasible: bool,
}

fn log_terms<F: Real>(profile: &DerivativeNormProfile<F>, seq: &WeightSequence<F>, big_b: F) -> Result<Vec<F>> {
    if seq.max_index() < profile.order() {
        return Err(Error::InvalidArgument(format!(
            "profile has order {} but the sequence stops at {}",
            profile.order(),
            seq.max_index()
        )));
    }
    if !(big_b > F::zero() && big_b.is_finite()) {
        return Err(Error::InvalidArgument(format!("B must be positive, got {big_b}")));
    }
    let ln_b = big_b.ln();
    // ln d_k − k ln B − ln M_k
    (0..=profile.order())
        .map(|k| Ok(profile.norms[k].ln() - F::from_usize_lossy(k) * ln_b - seq.log_m(k)?))
        .collect()
}

pub fn check_membership<F: Real>(
    profile: &DerivativeNormProfile<F>,
    seq: &WeightSequence<F>,
    beta: F,
    big_b: F,
) -> Result<EnvelopeFit<F>> {
    if !(beta > F::zero() && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!("β must be positive, got {beta}")));
    }
    let terms = log_terms(profile, seq, big_b)?;
    let ln_beta = beta.ln();
    let (argmin, slack) = terms
        .iter()
        .enumerate()
        .map(|(k, &t)| (k, ln_beta - t))
        .fold((0, F::infinity()), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
    let feasible = slack >= -F::lit(FEASIBILITY_TOL);
    Ok(EnvelopeFit { beta, big_b, slack, argmin, feasible })
}

/// Smallest `β` for the given `B`; at least the smallest positive float.
pub fn minimal_beta<F: Real>(profile: &DerivativeNormProfile<F>, seq: &WeightSequence<F>, big_b: F) -> Result<F> {
    let terms = log_terms(profile, seq, big_b)?;
    let ln_max = terms.iter().fold(F::neg_infinity(), |a, &t| a.max(t));
    Ok(ln_max.exp().max(F::min_positive_value()))
}

/// `β̃ = max(β, β_2)` with `β_2 = max_{k<N} d_k / (B^k M_k)`, given that
/// `(β, B)` already bounds every order `k ≥ N`.
pub fn extend_low_orders<F: Real>(
    profile: &DerivativeNormProfile<F>,
    seq: &WeightSequence<F>,
    n: usize,
    beta: F,
    big_b: F,
) -> Result<F> {
    let terms = log_terms(profile, seq, big_b)?;
    let ln_beta = beta.ln();
    if let Some(k) = (n..terms.len()).find(|&k| ln_beta - terms[k] < -F::lit(FEASIBILITY_TOL)) {
        return Err(Error::Precondition(format!("(β, B) = ({beta}, {big_b}) fails at order {k} ≥ N = {n}")));
    }
    let low = terms[..n.min(terms.len())].iter().fold(F::neg_infinity(), |a, &t| a.max(t));
    Ok(beta.max(low.exp()))
}

/// Minimal `β` for each `B` in the grid.
pub fn fit_envelope<F: Real>(
    profile: &DerivativeNormProfile<F>,
    seq: &WeightSequence<F>,
    b_grid: &[F],
) -> Result<Vec<EnvelopeFit<F>>> {
    b_grid
        .iter()
        .map(|&b| check_membership(profile, seq, minimal_beta(profile, seq, b)?, b))
        .collect()
}

/// Something whose derivatives can be sampled.
pub trait DerivativeSource<F> {
    fn derivative(&self, x: F, k: usize) -> Result<F>;
    fn max_order(&self) -> usize;
}

impl<F: Real> DerivativeSource<F> for FlatSpline<F> {
    fn derivative(&self, x: F, k: usize) -> Result<F> {
        self.eval(x, k)
    }
    fn max_order(&self) -> usize {
        FlatSpline::max_order(self)
    }
}

impl<F: Real> DerivativeSource<F> for TransitionFunction<F> {
    fn derivative(&self, x: F, k: usize) -> Result<F> {
        self.eval(x, k)
    }
    fn max_order(&self) -> usize {
        TransitionFunction::max_order(self)
    }
}

impl DerivativeSource<f64> for SparsePiecewiseMap {
    fn derivative(&self, x: f64, k: usize) -> Result<f64> {
        SparsePiecewiseMap::derivative(self, x, k)
    }
    fn max_order(&self) -> usize {
        self.registry().k_max() + 1
    }
}

impl DerivativeSource<f64> for FlatOnCantorFunction {
    fn derivative(&self, x: f64, k: usize) -> Result<f64> {
        self.eval(x, k)
    }
    fn max_order(&self) -> usize {
        self.certified_order()
    }
}

impl DerivativeSource<f64> for AnalyticFn {
    fn derivative(&self, x: f64, k: usize) -> Result<f64> {
        let shift = k as f64 * std::f64::consts::FRAC_PI_2;
        let base = self.amplitude * self.omega.powi(k as i32) * (self.omega * x + self.phase + shift).sin();
        Ok(if k == 0 { base + self.offset } else { base })
    }
    fn max_order(&self) -> usize {
        usize::MAX
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MeasuredProfile<F> {
    /// Norms on the finer grid.
    pub profile: DerivativeNormProfile<F>,
    pub coarse: Vec<F>,
    /// `|fine − coarse| / fine` per order (0 when both vanish).
    pub refinement: Vec<F>,
    pub converged: bool,
}

fn sup_norms<F: Real, S: DerivativeSource<F> + ?Sized>(src: &S, lo: F, hi: F, order: usize, n: usize) -> Result<Vec<F>> {
    let mut out = vec![F::zero(); order + 1];
    let step = (hi - lo) / F::from_usize_lossy(n - 1);
    for j in 0..n {
        let x = if j == n - 1 { hi } else { lo + step * F::from_usize_lossy(j) };
        for (k, m) in out.iter_mut().enumerate() {
            *m = m.max(src.derivative(x, k)?.abs());
        }
    }
    Ok(out)
}

/// Sup-norms of `f^(k)`, `k ≤ order`, on `n` and `2n − 1` point grids.
pub fn measure_norms<F: Real, S: DerivativeSource<F> + ?Sized>(
    src: &S,
    interval: (F, F),
    order: usize,
    n: usize,
) -> Result<MeasuredProfile<F>> {
    if order > src.max_order() {
        return Err(Error::OrderTooLarge { order, max: src.max_order() });
    }
    let (lo, hi) = interval;
    if !(hi > lo) || n < 2 {
        return Err(Error::InvalidArgument(format!("need lo < hi and n ≥ 2, got [{lo}, {hi}], n = {n}")));
    }
    let coarse = sup_norms(src, lo, hi, order, n)?;
    let fine = sup_norms(src, lo, hi, order, 2 * n - 1)?;
    let refinement: Vec<F> = coarse
        .iter()
        .zip(&fine)
        .map(|(&c, &f)| if f > F::zero() { (f - c).abs() / f } else { F::zero() })
        .collect();
    let converged = refinement.iter().all(|&r| r < F::lit(CONVERGENCE_TOL));
    Ok(MeasuredProfile {
        profile: DerivativeNormProfile::new(fine, interval, NormSource::SampledGrid)?,
        coarse,
        refinement,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flat::make_bump;
    use proptest::prelude::*;

    fn flat_seq(k: usize) -> WeightSequence<f64> {
        WeightSequence::custom(vec![1.0; k + 1]).unwrap()
    }

    fn profile(d: Vec<f64>) -> DerivativeNormProfile<f64> {
        DerivativeNormProfile::new(d, (0.0, 1.0), NormSource::Analytic).unwrap()
    }

    #[test]
    fn exact_envelopes() {
        let g = WeightSequence::<f64>::gevrey(2.0, 10).unwrap();
        let m = g.values();
        let fit = check_membership(&profile(m.clone()), &g, 1.0, 1.0).unwrap();
        assert!(fit.feasible && fit.slack.abs() < 1e-12);
        let d: Vec<f64> = m.iter().enumerate().map(|(k, &mk)| 3.0 * 2f64.powi(k as i32) * mk).collect();
        let fit = check_membership(&profile(d.clone()), &g, 3.0, 2.0).unwrap();
        assert!(fit.feasible && fit.slack.abs() < 1e-12);
        let fit = check_membership(&profile(d.clone()), &g, 3.0, 1.9).unwrap();
        assert!(!fit.feasible);
        // direct scan: the first failing order is k = 1 and the worst is the last
        let first = (0..=10).find(|&k| d[k] > 3.0 * 1.9f64.powi(k as i32) * m[k] * (1.0 + 1e-12));
        assert_eq!(first, Some(1));
        assert_eq!(fit.argmin, 10);
    }

    #[test]
    fn minimal_beta_examples() {
        let g = WeightSequence::<f64>::gevrey(2.0, 5).unwrap();
        assert!((minimal_beta(&profile(g.values()), &g, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let b = minimal_beta(&profile(vec![1.0, 10.0, 1.0]), &flat_seq(2), 1.0).unwrap();
        assert!((b - 10.0).abs() < 1e-13);
        assert_eq!(minimal_beta(&profile(vec![0.0; 3]), &flat_seq(2), 1.0).unwrap(), f64::MIN_POSITIVE);
    }

    #[test]
    fn extend_low_orders_examples() {
        let s = flat_seq(4);
        let p = profile(vec![5.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(extend_low_orders(&p, &s, 0, 5.0, 1.0).unwrap(), 5.0);
        assert_eq!(extend_low_orders(&profile(vec![1.0; 5]), &s, 2, 1.0, 1.0).unwrap(), 1.0);
        let bt = extend_low_orders(&p, &s, 1, 1.0, 1.0).unwrap();
        assert!((bt - 5.0).abs() < 1e-14);
        assert!(check_membership(&p, &s, bt, 1.0).unwrap().feasible);
        assert!(matches!(extend_low_orders(&p, &s, 0, 1.0, 1.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn bad_inputs() {
        assert!(DerivativeNormProfile::new(vec![1.0, f64::NAN], (0.0, 1.0), NormSource::Analytic).is_err());
        assert!(DerivativeNormProfile::<f64>::new(vec![], (0.0, 1.0), NormSource::Analytic).is_err());
        assert!(check_membership(&profile(vec![1.0; 4]), &flat_seq(2), 1.0, 1.0).is_err());
        assert!(check_membership(&profile(vec![1.0]), &flat_seq(2), 1.0, 0.0).is_err());
    }

    #[test]
    fn constant_function_norms() {
        let c = AnalyticFn::sinusoid(0.0, 1.0, 0.0, -2.5);
        let m = measure_norms(&c, (0.0, 3.0), 4, 50).unwrap();
        assert_eq!(m.profile.norms(), &[2.5, 0.0, 0.0, 0.0, 0.0]);
        assert!(m.converged);
    }

    #[test]
    fn sine_norms_converge() {
        let s = AnalyticFn::sinusoid(1.0, 2.0, 0.1, 0.0);
        let m = measure_norms(&s, (0.0, 4.0), 5, 2000).unwrap();
        for (k, &d) in m.profile.norms().iter().enumerate() {
            assert!((d - 2f64.powi(k as i32)).abs() < 1e-3 * 2f64.powi(k as i32));
        }
        assert!(m.converged);
    }

    #[test]
    fn bump_norms_below_certificate() {
        let g = WeightSequence::<f64>::gevrey(2.0, 20).unwrap();
        let b = make_bump((0.0, 1.0), 0.5, &g, 6).unwrap();
        let m = measure_norms(&b, (0.0, 1.0), 6, 4001).unwrap();
        for (k, &d) in m.profile.norms().iter().enumerate() {
            assert!(d <= b.certified_norms()[k] * (1.0 + 1e-9));
        }
        assert!(matches!(measure_norms(&b, (0.0, 1.0), 20, 10), Err(Error::OrderTooLarge { .. })));
    }

    fn random_profile() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (3usize..12).prop_flat_map(|n| {
            (prop::collection::vec(1e-3f64..1e3, n), prop::collection::vec(1e-2f64..1e2, n))
        })
    }

    proptest! {
        #[test]
        fn minimal_beta_round_trip((d, m) in random_profile(), b in 0.1f64..5.0) {
            let p = profile(d);
            let s = WeightSequence::custom(m).unwrap();
            let beta = minimal_beta(&p, &s, b).unwrap();
            let fit = check_membership(&p, &s, beta, b).unwrap();
            prop_assert!(fit.feasible);
            prop_assert!(fit.slack.abs() < 1e-12);
        }

        #[test]
        fn feasibility_is_monotone((d, m) in random_profile(), b in 0.1f64..5.0, up in 1.0f64..3.0) {
            let p = profile(d);
            let s = WeightSequence::custom(m).unwrap();
            let beta = minimal_beta(&p, &s, b).unwrap();
            prop_assert!(check_membership(&p, &s, beta * up, b).unwrap().feasible);
            prop_assert!(check_membership(&p, &s, beta, b * up).unwrap().feasible);
        }

        #[test]
        fn extension_is_feasible((d, m) in random_profile(), b in 0.1f64..5.0, cut in 0usize..12) {
            let p = profile(d);
            let s = WeightSequence::custom(m).unwrap();
            let n = cut.min(p.order() + 1);
            // smallest β valid from N on
            let tail = DerivativeNormProfile::new(
                p.norms().iter().enumerate().map(|(k, &v)| if k < n { 0.0 } else { v }).collect(),
                (0.0, 1.0),
                NormSource::Analytic,
            ).unwrap();
            let beta = minimal_beta(&tail, &s, b).unwrap();
            let bt = extend_low_orders(&p, &s, n, beta, b).unwrap();
            prop_assert!(bt >= beta);
            prop_assert!(check_membership(&p, &s, bt, b).unwrap().feasible);
        }
    }
}
