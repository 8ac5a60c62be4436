//! Weight sequences `{M_k}`, their log-convexification and the Carleman
//! quasi-analyticity test.
//!
//! All work happens in log space: `k!` overflows `f64` near `k = 171`, while
//! `ln k!` stays tame for any prefix length that fits in memory.

mod hull;
mod registry;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use registry::{WeightEntry, WeightRegistry};

/// Closed-form family tag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightKind {
    /// `M_k = k!`
    Factorial,
    /// `M_k = (k!)^s`, `s > 0`
    Gevrey { s: f64 },
    /// `M_k = k^(c·k)` with `0^0 = 1`, `c > 0`
    Power { c: f64 },
    /// Finite user-supplied prefix.
    Custom,
}

impl WeightKind {
    pub fn is_closed_form(&self) -> bool {
        !matches!(self, WeightKind::Custom)
    }

    /// Exact Carleman rule for registered closed forms. For these families the
    /// sequence is already log-convex and `M_{k-1}/M_k` behaves like `k^{-s}`
    /// (gevrey) or `e^{-c} k^{-c}` (power), so the series diverges iff the
    /// exponent is at most one.
    fn exact_verdict(&self) -> Option<Verdict> {
        match *self {
            WeightKind::Factorial => Some(Verdict::QuasiAnalytic),
            WeightKind::Gevrey { s } | WeightKind::Power { c: s } => Some(if s <= 1.0 {
                Verdict::QuasiAnalytic
            } else {
                Verdict::NonQuasiAnalytic
            }),
            WeightKind::Custom => None,
        }
    }
}

/// A positive sequence `M_0..M_K`, stored by logarithm.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence<F> {
    kind: WeightKind,
    log_prefix: Vec<F>,
    /// Linear values exactly as supplied, for custom prefixes.
    raw: Option<Vec<F>>,
}

fn validate_param(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::InvalidSequence(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

fn check_len(max_index: usize) -> Result<()> {
    if max_index < 2 {
        return Err(Error::InvalidSequence(format!("need K >= 2, got K = {max_index}")));
    }
    Ok(())
}

/// `ln k!` for `k = 0..=max_index` by cumulative summation.
fn log_factorials<F: Real>(max_index: usize) -> Vec<F> {
    let mut out = Vec::with_capacity(max_index + 1);
    let mut acc = F::zero();
    out.push(acc);
    for k in 1..=max_index {
        acc = acc + F::from_usize_lossy(k).ln();
        out.push(acc);
    }
    out
}

impl<F: Real> WeightSequence<F> {
    pub fn factorial(max_index: usize) -> Result<Self> {
        check_len(max_index)?;
        Ok(WeightSequence { kind: WeightKind::Factorial, log_prefix: log_factorials(max_index), raw: None })
    }

    pub fn gevrey(s: f64, max_index: usize) -> Result<Self> {
        validate_param("gevrey order s", s)?;
        check_len(max_index)?;
        let sf = F::lit(s);
        let log_prefix = log_factorials::<F>(max_index).into_iter().map(|l| sf * l).collect();
        Ok(WeightSequence { kind: WeightKind::Gevrey { s }, log_prefix, raw: None })
    }

    pub fn power(c: f64, max_index: usize) -> Result<Self> {
        validate_param("power exponent c", c)?;
        check_len(max_index)?;
        let cf = F::lit(c);
        let log_prefix = (0..=max_index)
            .map(|k| {
                if k == 0 {
                    F::zero()
                } else {
                    let kf = F::from_usize_lossy(k);
                    cf * kf * kf.ln()
                }
            })
            .collect();
        Ok(WeightSequence { kind: WeightKind::Power { c }, log_prefix, raw: None })
    }

    /// Custom prefix `M_0..M_K` of strictly positive finite values.
    pub fn custom(prefix: Vec<F>) -> Result<Self> {
        if prefix.is_empty() {
            return Err(Error::InvalidSequence("empty prefix".into()));
        }
        check_len(prefix.len() - 1)?;
        for (k, &m) in prefix.iter().enumerate() {
            if !(m.is_finite() && m > F::zero()) {
                return Err(Error::InvalidSequence(format!("M_{k} = {m} is not positive and finite")));
            }
        }
        let log_prefix = prefix.iter().map(|m| m.ln()).collect();
        Ok(WeightSequence { kind: WeightKind::Custom, log_prefix, raw: Some(prefix) })
    }

    /// Custom prefix given by logarithms, for values outside the float range.
    pub fn custom_log(log_prefix: Vec<F>) -> Result<Self> {
        if log_prefix.is_empty() {
            return Err(Error::InvalidSequence("empty prefix".into()));
        }
        check_len(log_prefix.len() - 1)?;
        if let Some(k) = log_prefix.iter().position(|l| !l.is_finite()) {
            return Err(Error::InvalidSequence(format!("ln M_{k} is not finite")));
        }
        Ok(WeightSequence { kind: WeightKind::Custom, log_prefix, raw: None })
    }

    /// Same family materialized up to a different `K`. Custom prefixes can
    /// only be truncated.
    pub fn with_max_index(&self, max_index: usize) -> Result<Self> {
        match self.kind {
            WeightKind::Factorial => Self::factorial(max_index),
            WeightKind::Gevrey { s } => Self::gevrey(s, max_index),
            WeightKind::Power { c } => Self::power(c, max_index),
            WeightKind::Custom => {
                if max_index > self.max_index() {
                    return Err(Error::OutOfRange { index: max_index, len: self.max_index() });
                }
                check_len(max_index)?;
                Ok(WeightSequence {
                    kind: self.kind,
                    log_prefix: self.log_prefix[..=max_index].to_vec(),
                    raw: self.raw.as_ref().map(|r| r[..=max_index].to_vec()),
                })
            }
        }
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    /// `K`, the largest materialized index.
    pub fn max_index(&self) -> usize {
        self.log_prefix.len() - 1
    }

    pub fn log_values(&self) -> &[F] {
        &self.log_prefix
    }

    pub fn log_m(&self, k: usize) -> Result<F> {
        self.log_prefix
            .get(k)
            .copied()
            .ok_or(Error::OutOfRange { index: k, len: self.max_index() })
    }

    /// `M_k` (may be `+∞` when it exceeds the float range).
    pub fn m(&self, k: usize) -> Result<F> {
        if let Some(raw) = &self.raw {
            return raw.get(k).copied().ok_or(Error::OutOfRange { index: k, len: self.max_index() });
        }
        self.log_m(k).map(F::exp)
    }

    pub fn values(&self) -> Vec<F> {
        match &self.raw {
            Some(raw) => raw.clone(),
            None => self.log_prefix.iter().map(|l| l.exp()).collect(),
        }
    }
}

/// Log-convex minorant of a weight sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexifiedSequence<F> {
    source: WeightSequence<F>,
    log_minorant: Vec<F>,
    hull_vertices: Vec<usize>,
}

impl<F: Real> ConvexifiedSequence<F> {
    pub fn source(&self) -> &WeightSequence<F> {
        &self.source
    }

    pub fn hull_vertices(&self) -> &[usize] {
        &self.hull_vertices
    }

    pub fn log_minorant(&self) -> &[F] {
        &self.log_minorant
    }

    pub fn max_index(&self) -> usize {
        self.log_minorant.len() - 1
    }

    pub fn is_vertex(&self, k: usize) -> bool {
        self.hull_vertices.binary_search(&k).is_ok()
    }

    /// `M'_k`; equals the source value bit-for-bit at hull vertices.
    pub fn value(&self, k: usize) -> F {
        if self.is_vertex(k) {
            if let Ok(v) = self.source.m(k) {
                return v;
            }
        }
        self.log_minorant[k].exp()
    }

    pub fn minorant(&self) -> Vec<F> {
        (0..self.log_minorant.len()).map(|k| self.value(k)).collect()
    }

    /// `ln(M'_{k-1}/M'_k)` for `k ≥ 1`.
    pub fn log_ratio(&self, k: usize) -> F {
        self.log_minorant[k - 1] - self.log_minorant[k]
    }

    /// The minorant as a standalone custom sequence.
    pub fn to_sequence(&self) -> Result<WeightSequence<F>> {
        let values = self.minorant();
        if values.iter().all(|v| v.is_finite()) {
            WeightSequence::custom(values)
        } else {
            WeightSequence::custom_log(self.log_minorant.clone())
        }
    }
}

/// Exponential of the lower convex hull of `(k, ln M_k)`.
pub fn log_convexify<F: Real>(seq: &WeightSequence<F>) -> ConvexifiedSequence<F> {
    let vertices = hull::lower_hull(&seq.log_prefix);
    let log_minorant = hull::interpolate(&seq.log_prefix, &vertices);
    ConvexifiedSequence { source: seq.clone(), log_minorant, hull_vertices: vertices }
}

/// `Σ_{k=1}^{K} M'_{k-1}/M'_k`.
pub fn carleman_partial_sum<F: Real>(conv: &ConvexifiedSequence<F>, upto: usize) -> Result<F> {
    if upto > conv.max_index() {
        return Err(Error::OutOfRange { index: upto, len: conv.max_index() });
    }
    let mut sum = F::zero();
    let mut comp = F::zero();
    for k in 1..=upto {
        // Kahan summation keeps 10^6-term sums accurate
        let term = conv.log_ratio(k).exp() - comp;
        let next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    QuasiAnalytic,
    NonQuasiAnalytic,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictBasis {
    ExactRule,
    HeuristicTail,
}

/// Outcome of [`classify`]. The verdict holds for `C{M_k}` and
/// `C_loc{M_k}` alike.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CarlemanVerdict {
    pub verdict: Verdict,
    pub partial_sum: f64,
    pub basis: VerdictBasis,
    /// Fitted decay exponent σ in `r_k ≈ C k^{-σ}`; heuristic verdicts only.
    pub tail_exponent: Option<f64>,
}

/// Minimum number of tail ratios for the heuristic fit.
pub const MIN_TAIL_POINTS: usize = 4;
/// Fitted exponents at or below this are reported divergence-like.
pub const DIVERGENT_EXPONENT: f64 = 0.8;
/// Fitted exponents at or above this are reported summable.
pub const SUMMABLE_EXPONENT: f64 = 1.2;

/// Least-squares slope of `ln r_k` against `ln k` over the last quartile.
fn tail_exponent<F: Real>(conv: &ConvexifiedSequence<F>) -> Option<f64> {
    let k_max = conv.max_index();
    let count = k_max / 4;
    if count < MIN_TAIL_POINTS {
        return None;
    }
    let start = k_max - count + 1;
    let pts: Vec<(f64, f64)> = (start..=k_max)
        .map(|k| ((k as f64).ln(), conv.log_ratio(k).to_f64_lossy()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    Some(-sxy / sxx)
}

pub fn classify<F: Real>(seq: &WeightSequence<F>) -> CarlemanVerdict {
    let conv = log_convexify(seq);
    let partial_sum = carleman_partial_sum(&conv, conv.max_index())
        .expect("full range is valid")
        .to_f64_lossy();
    if let Some(verdict) = seq.kind.exact_verdict() {
        return CarlemanVerdict { verdict, partial_sum, basis: VerdictBasis::ExactRule, tail_exponent: None };
    }
    let sigma = tail_exponent(&conv);
    let verdict = match sigma {
        Some(s) if s <= DIVERGENT_EXPONENT => Verdict::QuasiAnalytic,
        Some(s) if s >= SUMMABLE_EXPONENT => Verdict::NonQuasiAnalytic,
        _ => Verdict::Undetermined,
    };
    CarlemanVerdict { verdict, partial_sum, basis: VerdictBasis::HeuristicTail, tail_exponent: sigma }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Lower hull by brute force: the minorant at `k` is the highest value at
    /// `k` of any line through two points that stays below every point.
    fn brute_force_log_minorant(ys: &[f64]) -> Vec<f64> {
        let n = ys.len();
        let scale = ys.iter().fold(1f64, |a, y| a.max(y.abs()));
        let mut best = vec![f64::NEG_INFINITY; n];
        for i in 0..n {
            for j in i + 1..n {
                let slope = (ys[j] - ys[i]) / (j - i) as f64;
                let line = |k: usize| ys[i] + slope * (k as f64 - i as f64);
                if (0..n).all(|k| ys[k] >= line(k) - 1e-12 * scale) {
                    for (k, b) in best.iter_mut().enumerate() {
                        *b = b.max(line(k));
                    }
                }
            }
        }
        best
    }

    #[test]
    fn convexify_examples() {
        let bump = WeightSequence::custom(vec![1.0f64, 10.0, 1.0]).unwrap();
        let conv = log_convexify(&bump);
        assert_eq!(conv.minorant(), vec![1.0, 1.0, 1.0]);
        assert_eq!(conv.hull_vertices(), &[0, 2]);

        let fact = WeightSequence::<f64>::factorial(10).unwrap();
        let conv = log_convexify(&fact);
        assert_eq!(conv.hull_vertices().len(), 11);
        assert_eq!(conv.minorant(), fact.values());

        let flat = WeightSequence::custom(vec![1.0f64, 1.0, 1.0]).unwrap();
        assert_eq!(log_convexify(&flat).minorant(), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn closed_forms_match_direct_products() {
        let f = WeightSequence::<f64>::factorial(20).unwrap();
        let g = WeightSequence::<f64>::gevrey(2.0, 20).unwrap();
        let p = WeightSequence::<f64>::power(1.5, 20).unwrap();
        let mut fact = 1.0f64;
        for k in 0..=20usize {
            if k > 0 {
                fact *= k as f64;
            }
            let rel = |a: f64, b: f64| ((a - b) / b).abs();
            assert!(rel(f.m(k).unwrap(), fact) < 1e-12);
            assert!(rel(g.m(k).unwrap(), fact * fact) < 1e-12);
            let pk = if k == 0 { 1.0 } else { (k as f64).powf(1.5 * k as f64) };
            assert!(rel(p.m(k).unwrap(), pk) < 1e-12);
        }
    }

    #[test]
    fn invalid_sequences_rejected() {
        assert!(matches!(WeightSequence::custom(vec![1.0f64, 0.0, 1.0]), Err(Error::InvalidSequence(_))));
        assert!(matches!(WeightSequence::custom(vec![1.0f64, -2.0, 1.0]), Err(Error::InvalidSequence(_))));
        assert!(matches!(WeightSequence::custom(vec![1.0f64, f64::NAN, 1.0]), Err(Error::InvalidSequence(_))));
        assert!(WeightSequence::custom(vec![1.0f64, 2.0]).is_err());
        assert!(WeightSequence::<f64>::gevrey(0.0, 10).is_err());
        assert!(WeightSequence::<f64>::factorial(1).is_err());
    }

    #[test]
    fn partial_sum_examples() {
        let conv = log_convexify(&WeightSequence::<f64>::factorial(100).unwrap());
        let harmonic: f64 = (1..=100).map(|k| 1.0 / k as f64).sum();
        assert!((carleman_partial_sum(&conv, 100).unwrap() - harmonic).abs() < 1e-9);
        assert!((harmonic - 5.18738).abs() < 1e-5);
        assert_eq!(carleman_partial_sum(&conv, 0).unwrap(), 0.0);
        assert!(matches!(carleman_partial_sum(&conv, 101), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn classify_examples() {
        let v = classify(&WeightSequence::<f64>::factorial(50).unwrap());
        assert_eq!((v.verdict, v.basis), (Verdict::QuasiAnalytic, VerdictBasis::ExactRule));
        let v = classify(&WeightSequence::<f64>::gevrey(2.0, 50).unwrap());
        assert_eq!((v.verdict, v.basis), (Verdict::NonQuasiAnalytic, VerdictBasis::ExactRule));
        let v = classify(&WeightSequence::custom(vec![1.0f64, 2.0, 3.0]).unwrap());
        assert_eq!((v.verdict, v.basis), (Verdict::Undetermined, VerdictBasis::HeuristicTail));
        assert_eq!(classify(&WeightSequence::<f64>::power(1.0, 40).unwrap()).verdict, Verdict::QuasiAnalytic);
        assert_eq!(classify(&WeightSequence::<f64>::power(2.0, 40).unwrap()).verdict, Verdict::NonQuasiAnalytic);
    }

    #[test]
    fn heuristic_on_custom_prefixes() {
        // (k!)^2 copied into a custom prefix: ratios 1/k^2 are summable
        let g = WeightSequence::<f64>::gevrey(2.0, 200).unwrap();
        let custom = WeightSequence::custom_log(g.log_values().to_vec()).unwrap();
        let v = classify(&custom);
        assert_eq!((v.verdict, v.basis), (Verdict::NonQuasiAnalytic, VerdictBasis::HeuristicTail));
        assert!((v.tail_exponent.unwrap() - 2.0).abs() < 0.05);

        // k! as a custom prefix sits on the boundary: harmonic ratios
        let f = WeightSequence::<f64>::factorial(200).unwrap();
        let v = classify(&WeightSequence::custom_log(f.log_values().to_vec()).unwrap());
        assert_eq!(v.verdict, Verdict::Undetermined);

        // (k!)^{1/2}: ratios k^{-1/2}
        let half: Vec<f64> = f.log_values().iter().map(|l| l / 2.0).collect();
        assert_eq!(classify(&WeightSequence::custom_log(half).unwrap()).verdict, Verdict::QuasiAnalytic);

        // geometric sequence: constant ratios diverge
        let geo: Vec<f64> = (0..64).map(|k| 2f64.powi(k)).collect();
        assert_eq!(classify(&WeightSequence::custom(geo).unwrap()).verdict, Verdict::QuasiAnalytic);
    }

    #[test]
    fn f32_sequences_work() {
        let conv = log_convexify(&WeightSequence::<f32>::gevrey(2.0, 30).unwrap());
        let s = carleman_partial_sum(&conv, 30).unwrap();
        let oracle: f32 = (1..=30).map(|k| 1.0 / (k * k) as f32).sum();
        assert!((s - oracle).abs() < 1e-4);
    }

    fn positive_sequence() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-20.0f64..20.0, 3..40).prop_map(|l| l.into_iter().map(f64::exp).collect())
    }

    proptest! {
        #[test]
        fn minorant_properties(values in positive_sequence()) {
            let seq = WeightSequence::custom(values.clone()).unwrap();
            let conv = log_convexify(&seq);
            let m = conv.minorant();
            for k in 0..m.len() {
                prop_assert!(m[k] <= values[k] * (1.0 + 1e-12));
            }
            let lm = conv.log_minorant();
            for k in 1..lm.len() - 1 {
                prop_assert!(2.0 * lm[k] <= lm[k - 1] + lm[k + 1] + 1e-10);
            }
            for &v in conv.hull_vertices() {
                prop_assert_eq!(m[v], values[v]);
            }
            let oracle = brute_force_log_minorant(seq.log_values());
            for k in 0..m.len() {
                let scale = 1f64.max(oracle[k].abs());
                prop_assert!((lm[k] - oracle[k]).abs() <= 1e-12 * scale);
            }
        }

        #[test]
        fn convexify_is_idempotent(values in positive_sequence()) {
            let conv = log_convexify(&WeightSequence::custom(values).unwrap());
            let again = log_convexify(&conv.to_sequence().unwrap());
            let (a, b) = (conv.minorant(), again.minorant());
            for &v in conv.hull_vertices() {
                prop_assert_eq!(a[v], b[v]);
            }
            for k in 0..a.len() {
                prop_assert!(((a[k] - b[k]) / a[k]).abs() <= 1e-12);
            }
        }

        #[test]
        fn partial_sums_nondecreasing(values in positive_sequence()) {
            let conv = log_convexify(&WeightSequence::custom(values).unwrap());
            let mut prev = 0.0;
            for k in 0..=conv.max_index() {
                let s = carleman_partial_sum(&conv, k).unwrap();
                prop_assert!(s >= prev);
                prev = s;
            }
        }
    }
}
