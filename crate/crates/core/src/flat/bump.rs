//! Flat bump functions as cascades of box averages.
//!
//! With `1_{w0}` the indicator of a centred window of width `w0` and
//! `μ_a` the unit-mass box of width `a`, the bump is
//!
//! ```text
//! b = c · 1_{w0} * μ_{a_1} * … * μ_{a_J}
//! ```
//!
//! Differentiating a box average of width `a` replaces it by the central
//! difference `(f(x + a/2) − f(x − a/2)) / a`, so
//!
//! ```text
//! b^(k) = c / (a_1 ⋯ a_k) · D_{a_1} ⋯ D_{a_k} (1_{w0} * μ_{a_{k+1}} * … * μ_{a_J})
//! ```
//!
//! and since every stage is bounded by one, `‖b^(k)‖ ≤ c 2^k / (a_1 ⋯ a_k)`.
//! Choosing `c` below `ε^k M_k (a_1 ⋯ a_k) / 2^k` for every certified order
//! gives the derivative bound analytically.
//!
//! All cascade arithmetic runs in units of `U`, the largest power of two not
//! exceeding the interval length. Widths are rounded down to multiples of two
//! machine epsilons in those units, which keeps every breakpoint, and the sum
//! `w0 + Σ a_j`, exact.

use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use super::piecewise::PiecewisePoly;
use crate::error::{Error, Result};
use crate::scalar::{floor_pow2, Real};
use crate::weights::{classify, log_convexify, ConvexifiedSequence, Verdict, WeightSequence};

/// Default highest certified derivative order.
pub const DEFAULT_K_MAX: usize = 8;

/// Validated weight data shared by every bump built from one sequence.
#[derive(Debug, Clone)]
pub struct FlatSynth<F> {
    seq: WeightSequence<F>,
    conv: ConvexifiedSequence<F>,
    k_max: usize,
}

impl<F: Real> FlatSynth<F> {
    /// Checks that the sequence is not quasi-analytic and materializes it far
    /// enough for a cascade of depth `k_max + 2`.
    pub fn new(seq: &WeightSequence<F>, k_max: usize) -> Result<Self> {
        if k_max < 1 {
            return Err(Error::InvalidArgument("K_max must be at least 1".into()));
        }
        let depth = k_max + 2;
        let seq = if seq.max_index() < depth {
            seq.with_max_index(depth).map_err(|_| {
                Error::SynthesisFailed(format!(
                    "sequence has K = {} but a cascade for K_max = {k_max} needs K >= {depth}",
                    seq.max_index()
                ))
            })?
        } else {
            seq.clone()
        };
        let verdict = classify(&seq);
        if verdict.verdict == Verdict::QuasiAnalytic {
            return Err(Error::NotNonQuasiAnalytic(format!(
                "{:?} is classified quasi-analytic ({:?}); no flat bumps exist",
                seq.kind(),
                verdict.basis
            )));
        }
        let conv = log_convexify(&seq);
        Ok(FlatSynth { seq, conv, k_max })
    }

    pub fn sequence(&self) -> &WeightSequence<F> {
        &self.seq
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn depth(&self) -> usize {
        self.k_max + 2
    }

    /// Width schedule `a_j = min((2/ε) M'_{j-1}/M'_j, L 2^{-j-1})` before
    /// quantization.
    pub fn raw_widths(&self, length: F, epsilon: F) -> Vec<F> {
        let two = F::lit(2.0);
        (1..=self.depth())
            .map(|j| {
                let uncapped = two / epsilon * self.conv.log_ratio(j).exp();
                let cap = length * two.powi(-(j as i32) - 1);
                uncapped.min(cap)
            })
            .collect()
    }

    /// Bump on `(left, right)` with `‖b^(k)‖ ≤ ε^k M_k` for `k ≤ K_max`.
    pub fn bump(&self, left: F, right: F, epsilon: F) -> Result<FlatSpline<F>> {
        if !(left.is_finite() && right.is_finite() && right > left) {
            return Err(Error::InvalidArgument(format!("degenerate interval ({left}, {right})")));
        }
        if !(epsilon.is_finite() && epsilon > F::zero()) {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
        }
        let length = right - left;
        let unit = floor_pow2(length);
        let norm_len = length / unit;
        let quantum = F::lit(2.0) * F::epsilon();
        let depth = self.depth();

        let mut norm_widths = Vec::with_capacity(depth);
        for (j, raw) in self.raw_widths(length, epsilon).into_iter().enumerate() {
            let mut w = (raw / unit / quantum).floor() * quantum;
            if let Some(&prev) = norm_widths.last() {
                w = w.min(prev);
            }
            if !(w > F::zero()) {
                return Err(Error::SynthesisFailed(format!(
                    "width a_{} = {raw} vanishes at resolution {}; interval ({left}, {right}) is too \
                     narrow for K_max = {} at epsilon = {epsilon}",
                    j + 1,
                    quantum * unit,
                    self.k_max
                )));
            }
            norm_widths.push(w);
        }
        let norm_sum = norm_widths.iter().fold(F::zero(), |acc, &w| acc + w);
        let norm_base = norm_len - norm_sum;
        if !(norm_base > F::zero()) {
            return Err(Error::SynthesisFailed(format!(
                "widths sum to {} of the interval; no room for the base window",
                norm_sum / norm_len
            )));
        }
        let widths: Vec<F> = norm_widths.iter().map(|&w| w * unit).collect();
        let base_width = norm_base * unit;

        // ln(ε^k M_k a_1⋯a_k / 2^k), minimized over certified orders
        let ln_eps = epsilon.ln();
        let ln2 = F::LN_2();
        let mut ln_prod = F::zero();
        let mut ln_cap = F::infinity();
        for k in 0..=self.k_max {
            if k > 0 {
                ln_prod = ln_prod + widths[k - 1].ln();
            }
            let kf = F::from_usize_lossy(k);
            let v = kf * ln_eps + self.seq.log_m(k)? + ln_prod - kf * ln2;
            ln_cap = ln_cap.min(v);
        }
        // slack covers rounding in the log sums, which scales with their size
        let ln_scale = F::one() + ln_cap.abs() + F::from_usize_lossy(self.k_max) * (ln_eps.abs() + ln2);
        let slack = F::lit(16.0) * F::from_usize_lossy(self.k_max + 1) * F::epsilon() * ln_scale;
        let amplitude = (ln_cap - slack).exp();
        if !(amplitude.is_finite() && amplitude > F::zero()) {
            return Err(Error::SynthesisFailed(format!(
                "amplitude exp({ln_cap}) is not representable; reduce K_max or widen the interval"
            )));
        }
        let spline = FlatSpline::assemble(
            left,
            right,
            epsilon,
            widths,
            base_width,
            amplitude,
            self.k_max,
            &self.seq,
            unit,
            norm_widths,
            norm_base,
            norm_len,
        )?;
        if let Some(k) = spline.log_margins.iter().position(|&m| m < F::zero()) {
            return Err(Error::SynthesisFailed(format!(
                "certificate fails at order {k} (margin {})",
                spline.log_margins[k]
            )));
        }
        Ok(spline)
    }
}

/// Convenience wrapper: validate `seq` and synthesize one bump.
pub fn make_bump<F: Real>(
    interval: (F, F),
    epsilon: F,
    seq: &WeightSequence<F>,
    k_max: usize,
) -> Result<FlatSpline<F>> {
    FlatSynth::new(seq, k_max)?.bump(interval.0, interval.1, epsilon)
}

#[derive(Clone)]
struct Tables<F> {
    cascades: Vec<OnceLock<PiecewisePoly<F>>>,
    derivatives: Vec<OnceLock<PiecewisePoly<F>>>,
    integral: OnceLock<(PiecewisePoly<F>, F)>,
}

/// A certified flat bump supported on `[left, right]`.
#[derive(Clone)]
pub struct FlatSpline<F> {
    left: F,
    right: F,
    epsilon: F,
    widths: Vec<F>,
    base_width: F,
    amplitude: F,
    certified_order: usize,
    bound_table: Vec<F>,
    certificate: Vec<F>,
    log_margins: Vec<F>,
    /// `c / (a_1 ⋯ a_k)`
    derivative_scale: Vec<F>,
    unit: F,
    norm_widths: Vec<F>,
    norm_base: F,
    norm_len: F,
    tables: Tables<F>,
}

impl<F: fmt::Debug> fmt::Debug for FlatSpline<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FlatSpline")
            .field("interval", &(&self.left, &self.right))
            .field("epsilon", &self.epsilon)
            .field("widths", &self.widths)
            .field("base_width", &self.base_width)
            .field("amplitude", &self.amplitude)
            .field("certified_order", &self.certified_order)
            .finish()
    }
}

/// JSON certificate report.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BumpCertificate {
    pub interval: (f64, f64),
    pub epsilon: f64,
    pub widths: Vec<f64>,
    pub base_width: f64,
    pub amplitude: f64,
    pub certified_order: usize,
    pub bound_table: Vec<f64>,
    pub certified_norms: Vec<f64>,
    /// `ln(ε^k M_k) − ln(c 2^k / (a_1 ⋯ a_k))`, nonnegative when certified.
    pub margin_per_order: Vec<f64>,
}

impl<F: Real> FlatSpline<F> {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        left: F,
        right: F,
        epsilon: F,
        widths: Vec<F>,
        base_width: F,
        amplitude: F,
        certified_order: usize,
        seq: &WeightSequence<F>,
        unit: F,
        norm_widths: Vec<F>,
        norm_base: F,
        norm_len: F,
    ) -> Result<Self> {
        let depth = widths.len();
        let two = F::lit(2.0);
        let mut bound_table = Vec::with_capacity(certified_order + 1);
        let mut certificate = Vec::with_capacity(certified_order + 1);
        let mut log_margins = Vec::with_capacity(certified_order + 1);
        let mut ln_prod = F::zero();
        for k in 0..=certified_order {
            if k > 0 {
                ln_prod = ln_prod + widths[k - 1].ln();
            }
            let kf = F::from_usize_lossy(k);
            let ln_bound = kf * epsilon.ln() + seq.log_m(k)?;
            let ln_cert = amplitude.ln() + kf * F::LN_2() - ln_prod;
            bound_table.push(ln_bound.exp());
            let mut cert = amplitude;
            for w in &widths[..k] {
                cert = cert * two / *w;
            }
            certificate.push(cert);
            log_margins.push(ln_bound - ln_cert);
        }
        let mut derivative_scale = Vec::with_capacity(depth);
        let mut s = amplitude;
        derivative_scale.push(s);
        for w in widths.iter().take(depth.saturating_sub(1)) {
            s = s / *w;
            derivative_scale.push(s);
        }
        let tables = Tables {
            cascades: (0..depth).map(|_| OnceLock::new()).collect(),
            derivatives: (0..depth.saturating_sub(1)).map(|_| OnceLock::new()).collect(),
            integral: OnceLock::new(),
        };
        Ok(FlatSpline {
            left,
            right,
            epsilon,
            widths,
            base_width,
            amplitude,
            certified_order,
            bound_table,
            certificate,
            log_margins,
            derivative_scale,
            unit,
            norm_widths,
            norm_base,
            norm_len,
            tables,
        })
    }

    /// Same cascade with a different amplitude. The certificate is recomputed
    /// and may fail; see [`FlatSpline::is_certified`].
    pub fn with_amplitude(&self, amplitude: F, seq: &WeightSequence<F>) -> Result<Self> {
        let mut out = Self::assemble(
            self.left,
            self.right,
            self.epsilon,
            self.widths.clone(),
            self.base_width,
            amplitude,
            self.certified_order,
            seq,
            self.unit,
            self.norm_widths.clone(),
            self.norm_base,
            self.norm_len,
        )?;
        out.tables = self.tables.clone();
        Ok(out)
    }

    pub fn interval(&self) -> (F, F) {
        (self.left, self.right)
    }

    pub fn epsilon(&self) -> F {
        self.epsilon
    }

    /// Box widths `a_1..a_J`, nonincreasing.
    pub fn widths(&self) -> &[F] {
        &self.widths
    }

    pub fn base_width(&self) -> F {
        self.base_width
    }

    pub fn amplitude(&self) -> F {
        self.amplitude
    }

    /// Cascade depth `J`.
    pub fn depth(&self) -> usize {
        self.widths.len()
    }

    pub fn certified_order(&self) -> usize {
        self.certified_order
    }

    /// Highest derivative order [`FlatSpline::eval`] supports (`J − 2`).
    pub fn max_order(&self) -> usize {
        self.depth() - 2
    }

    /// `ε^k M_k` for `k = 0..=K_max`.
    pub fn bound_table(&self) -> &[F] {
        &self.bound_table
    }

    /// Analytic sup bounds `c 2^k / (a_1 ⋯ a_k)`.
    pub fn certified_norms(&self) -> &[F] {
        &self.certificate
    }

    pub fn log_margins(&self) -> &[F] {
        &self.log_margins
    }

    pub fn is_certified(&self) -> bool {
        self.log_margins.iter().all(|&m| m >= F::zero())
            && self.certificate.iter().zip(&self.bound_table).all(|(c, b)| !b.is_finite() || c <= b)
    }

    /// `w0 + Σ a_j` in normalized units, which equals the normalized interval
    /// length exactly.
    pub fn normalized_support_sum(&self) -> (F, F) {
        let s = self.norm_widths.iter().fold(self.norm_base, |acc, &w| acc + w);
        (s, self.norm_len)
    }

    pub fn certificate_report(&self) -> BumpCertificate {
        let f = |v: &[F]| v.iter().map(|x| x.to_f64_lossy()).collect::<Vec<_>>();
        BumpCertificate {
            interval: (self.left.to_f64_lossy(), self.right.to_f64_lossy()),
            epsilon: self.epsilon.to_f64_lossy(),
            widths: f(&self.widths),
            base_width: self.base_width.to_f64_lossy(),
            amplitude: self.amplitude.to_f64_lossy(),
            certified_order: self.certified_order,
            bound_table: f(&self.bound_table),
            certified_norms: f(&self.certificate),
            margin_per_order: f(&self.log_margins),
        }
    }

    /// Normalized cascade with widths `a_{k+1}..a_J`.
    fn cascade(&self, k: usize) -> &PiecewisePoly<F> {
        let depth = self.depth();
        if k + 1 == depth {
            return self.tables.cascades[k].get_or_init(|| {
                let lo = (self.norm_len - self.norm_base) / F::lit(2.0);
                PiecewisePoly::indicator(lo, lo + self.norm_base).box_average(self.norm_widths[depth - 1])
            });
        }
        self.tables.cascades[k].get_or_init(|| self.cascade(k + 1).box_average(self.norm_widths[k]))
    }

    /// `D_{a_1} ⋯ D_{a_k}` applied to the `(J − k)`-fold cascade.
    fn derivative_table(&self, k: usize) -> &PiecewisePoly<F> {
        if k == 0 {
            return self.cascade(0);
        }
        self.tables.derivatives[k].get_or_init(|| {
            let mut p = self.cascade(k).clone();
            for j in (0..k).rev() {
                p = p.central_difference(self.norm_widths[j]);
            }
            p
        })
    }

    fn integral_table(&self) -> &(PiecewisePoly<F>, F) {
        self.tables.integral.get_or_init(|| self.cascade(0).antiderivative())
    }

    fn midpoint(&self) -> F {
        self.left + (self.right - self.left) / F::lit(2.0)
    }

    /// Local normalized coordinate measured from the nearer endpoint, and
    /// whether that endpoint is the right one.
    fn local(&self, x: F) -> (F, bool) {
        if x <= self.midpoint() {
            ((x - self.left) / self.unit, false)
        } else {
            ((self.right - x) / self.unit, true)
        }
    }

    fn check_order(&self, k: usize) -> Result<()> {
        if k > self.max_order() {
            return Err(Error::OrderTooLarge { order: k, max: self.max_order() });
        }
        Ok(())
    }

    /// `b^(k)(x)`, exact up to rounding, for `k ≤ J − 2`.
    pub fn eval(&self, x: F, k: usize) -> Result<F> {
        self.check_order(k)?;
        if !(x > self.left && x < self.right) {
            return Ok(F::zero());
        }
        let (u, mirrored) = self.local(x);
        let v = self.derivative_table(k).eval(u);
        let sign = if mirrored && k % 2 == 1 { -F::one() } else { F::one() };
        Ok(sign * self.derivative_scale[k] * v)
    }

    /// `b^(k)(x)` as the `2^k`-term alternating sum of shifted cascade values.
    /// Slower than [`FlatSpline::eval`]; kept as an independent route.
    pub fn eval_telescoped(&self, x: F, k: usize) -> Result<F> {
        self.check_order(k)?;
        if !(x > self.left && x < self.right) {
            return Ok(F::zero());
        }
        let u = (x - self.left) / self.unit;
        let cascade = self.cascade(k);
        let half = F::lit(0.5);
        let mut acc = F::zero();
        for mask in 0u32..(1u32 << k) {
            let mut shift = F::zero();
            let mut sign = F::one();
            for j in 0..k {
                if mask & (1 << j) != 0 {
                    shift = shift + half * self.norm_widths[j];
                } else {
                    shift = shift - half * self.norm_widths[j];
                    sign = -sign;
                }
            }
            acc = acc + sign * cascade.eval(u + shift);
        }
        Ok(self.derivative_scale[k] * acc)
    }

    /// `∫_{left}^{right} b = c · w0`.
    pub fn total_integral(&self) -> F {
        self.amplitude * self.base_width
    }

    /// `∫_{left}^{x} b`.
    pub fn integral_to(&self, x: F) -> F {
        if x <= self.left {
            return F::zero();
        }
        if x >= self.right {
            return self.total_integral();
        }
        let (table, _) = self.integral_table();
        let (u, mirrored) = self.local(x);
        let partial = self.amplitude * self.unit * table.eval(u);
        if mirrored {
            self.total_integral() - partial
        } else {
            partial
        }
    }

    /// `∫_{x}^{right} b`, accurate near the right endpoint.
    pub fn integral_from(&self, x: F) -> F {
        if x <= self.left {
            return self.total_integral();
        }
        if x >= self.right {
            return F::zero();
        }
        let (table, _) = self.integral_table();
        let (u, mirrored) = self.local(x);
        let partial = self.amplitude * self.unit * table.eval(u);
        if mirrored {
            partial
        } else {
            self.total_integral() - partial
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gevrey2() -> WeightSequence<f64> {
        WeightSequence::gevrey(2.0, 40).unwrap()
    }

    #[test]
    fn support_and_positivity() {
        let b = make_bump((0.0, 4.0), 1.0, &gevrey2(), 8).unwrap();
        assert_eq!(b.eval(0.0, 0).unwrap(), 0.0);
        assert_eq!(b.eval(4.0, 0).unwrap(), 0.0);
        assert_eq!(b.eval(-1.0, 0).unwrap(), 0.0);
        assert!(b.eval(2.0, 0).unwrap() > 0.0);
        assert_eq!(b.eval(0.0, 1).unwrap(), 0.0);
        for i in 1..1000 {
            let x = 0.02 + 3.96 * i as f64 / 1000.0;
            assert!(b.eval(x, 0).unwrap() > 0.0, "x = {x}");
        }
    }

    #[test]
    fn uncapped_schedule_fits_for_gevrey2() {
        // a_j = 2 M_{j-1}/M_j = 2/j^2, and Σ 2/j^2 = π²/3 < 4
        let oracle: f64 = (1..=100_000).map(|j| 2.0 / (j as f64 * j as f64)).sum();
        assert!((oracle - std::f64::consts::PI.powi(2) / 3.0).abs() < 1e-4);
        assert!(oracle < 4.0);
        let synth = FlatSynth::new(&gevrey2(), 8).unwrap();
        let raw = synth.raw_widths(4.0, 1.0);
        // the geometric cap L 2^{-j-1} binds everywhere except j = 3
        assert_eq!(raw[0], 1.0);
        for (j, &r) in raw.iter().enumerate().map(|(i, r)| (i + 1, r)) {
            let want = (2.0 / (j * j) as f64).min(2f64.powi(1 - j as i32));
            assert!((r - want).abs() < 1e-14 * want, "j = {j}");
        }
        assert!((raw[2] - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn widths_are_exact_and_monotone() {
        for &(l, r) in &[(0.0, 1.0), (0.3, 1.7), (-5.0, 0.1), (0.0, 2f64.powi(-40))] {
            let b = make_bump((l, r), 0.5, &gevrey2(), 8).unwrap();
            let (sum, len) = b.normalized_support_sum();
            assert_eq!(sum, len);
            assert!(b.widths().windows(2).all(|w| w[0] >= w[1]));
            assert!(b.widths().iter().all(|&w| w > 0.0));
            assert!(b.depth() >= b.certified_order() + 2);
        }
    }

    #[test]
    fn certificate_holds() {
        let b = make_bump((0.0, 1.0), 0.25, &gevrey2(), 8).unwrap();
        assert!(b.is_certified());
        for k in 0..=8 {
            let mut prod = 1.0;
            for w in &b.widths()[..k] {
                prod *= w;
            }
            let rhs = 0.25f64.powi(k as i32) * gevrey2().m(k).unwrap() * prod / 2f64.powi(k as i32);
            assert!(b.amplitude() <= rhs, "k = {k}");
        }
    }

    #[test]
    fn telescoped_route_agrees() {
        let b = make_bump((-1.0, 2.0), 0.5, &gevrey2(), 6).unwrap();
        for i in 0..50 {
            let x = -1.0 + 3.0 * (i as f64 + 0.37) / 50.0;
            for k in 0..=6 {
                let fast = b.eval(x, k).unwrap();
                let slow = b.eval_telescoped(x, k).unwrap();
                let scale = b.certified_norms()[k];
                assert!((fast - slow).abs() <= 1e-9 * scale, "x = {x}, k = {k}: {fast} vs {slow}");
            }
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let b = make_bump((0.0, 1.0), 1.0, &gevrey2(), 8).unwrap();
        let h = 1e-6;
        for i in 1..100 {
            let x = 0.2 + 0.6 * i as f64 / 100.0;
            let fd = (b.eval(x + h, 0).unwrap() - b.eval(x - h, 0).unwrap()) / (2.0 * h);
            let exact = b.eval(x, 1).unwrap();
            assert!((fd - exact).abs() <= 1e-5 * exact.abs().max(1e-3 * b.certified_norms()[1]));
        }
    }

    #[test]
    fn order_beyond_cascade_rejected() {
        let b = make_bump((0.0, 1.0), 1.0, &gevrey2(), 4).unwrap();
        assert!(b.eval(0.5, 4).is_ok());
        assert!(matches!(b.eval(0.5, 5), Err(Error::OrderTooLarge { order: 5, max: 4 })));
    }

    #[test]
    fn quasi_analytic_sequence_rejected() {
        let fact = WeightSequence::<f64>::factorial(20).unwrap();
        assert!(matches!(make_bump((0.0, 1.0), 1.0, &fact, 4), Err(Error::NotNonQuasiAnalytic(_))));
    }

    #[test]
    fn too_narrow_interval_fails_with_diagnostic() {
        let err = make_bump((0.0, 1.0), 1e-300, &gevrey2(), 8).unwrap_err();
        assert!(matches!(err, Error::SynthesisFailed(_)), "{err}");
    }

    #[test]
    fn integral_matches_quadrature() {
        let b = make_bump((0.0, 4.0), 1.0, &gevrey2(), 8).unwrap();
        let n = 100_000;
        let h = 4.0 / n as f64;
        // composite Simpson
        let mut s = b.eval(0.0, 0).unwrap() + b.eval(4.0, 0).unwrap();
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * b.eval(i as f64 * h, 0).unwrap();
        }
        let quad = s * h / 3.0;
        let exact = b.total_integral();
        assert!(((quad - exact) / exact).abs() < 1e-8, "{quad} vs {exact}");
        assert!((b.integral_to(4.0) - exact).abs() == 0.0);
        assert!((b.integral_to(2.0) - exact / 2.0).abs() < 1e-14 * exact);
    }

    #[test]
    fn f32_bump() {
        let seq = WeightSequence::<f32>::gevrey(2.0, 20).unwrap();
        let b = make_bump((0.0f32, 1.0), 1.0, &seq, 4).unwrap();
        assert!(b.eval(0.5, 0).unwrap() > 0.0);
        assert_eq!(b.eval(0.0, 0).unwrap(), 0.0);
        let (sum, len) = b.normalized_support_sum();
        assert_eq!(sum, len);
    }
}
