//! A flat-on-Cantor function `g_m` and the windowed family `f_{ab}`.

use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;

use super::cantor::{CantorApprox, Gap};
use crate::error::{Error, Result};
use crate::flat::{FlatSpline, FlatSynth};
use crate::weights::WeightSequence;

/// Sum of one certified bump per level-`m` gap.
#[derive(Debug, Clone)]
pub struct FlatOnCantorFunction {
    cantor: CantorApprox,
    k_max: usize,
    bumps: Vec<FlatSpline<f64>>,
    seq: WeightSequence<f64>,
}

/// Gap at stage `ℓ` gets `ε = 3^{-ℓ}`; supports are disjoint, so
/// `‖g^(k)‖ ≤ 3^{-k} M_k` and `(β, B) = (1, 1/3)`.
pub fn build_flat_on_cantor(seq: &WeightSequence<f64>, level: u32, k_max: usize) -> Result<FlatOnCantorFunction> {
    let cantor = CantorApprox::new(level)?;
    let synth = FlatSynth::new(seq, k_max)?;
    let bumps = cantor
        .gaps()
        .iter()
        .map(|g| {
            let eps = 3f64.powi(-(g.stage as i32));
            synth.bump(cantor.to_f64(g.lo), cantor.to_f64(g.hi), eps).map_err(|e| match e {
                Error::SynthesisFailed(msg) => Error::SynthesisFailed(format!(
                    "gap ({}, {})/3^{level}: {msg}; reduce K_max or the level",
                    g.lo, g.hi
                )),
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FlatOnCantorFunction { cantor, k_max, bumps, seq: synth.sequence().clone() })
}

impl FlatOnCantorFunction {
    pub fn cantor(&self) -> &CantorApprox {
        &self.cantor
    }

    pub fn level(&self) -> u32 {
        self.cantor.level()
    }

    pub fn certified_order(&self) -> usize {
        self.k_max
    }

    pub fn bumps(&self) -> &[FlatSpline<f64>] {
        &self.bumps
    }

    /// `(β, B)` with `‖g^(k)‖ ≤ β B^k M_k` for `k ≤ K_max`.
    pub fn envelope(&self) -> (f64, f64) {
        (1.0, 1.0 / 3.0)
    }

    /// `β B^k M_k`, `k = 0..=K_max`.
    pub fn bound_table(&self) -> Vec<f64> {
        let (beta, b) = self.envelope();
        (0..=self.k_max).map(|k| beta * b.powi(k as i32) * self.seq.m(k).expect("k ≤ K_max")).collect()
    }

    fn gap_at(&self, x: f64) -> Option<usize> {
        let gaps = self.cantor.gaps();
        let j = self.bumps.partition_point(|b| b.interval().0 < x);
        (j > 0 && x < self.bumps[j - 1].interval().1).then(|| j - 1).filter(|&j| j < gaps.len())
    }

    pub fn gap(&self, j: usize) -> Gap {
        self.cantor.gaps()[j]
    }

    pub fn eval(&self, x: f64, k: usize) -> Result<f64> {
        if k > self.bumps.first().map_or(self.k_max, |b| b.max_order()) {
            return Err(Error::OrderTooLarge { order: k, max: self.k_max });
        }
        match self.gap_at(x) {
            Some(j) => self.bumps[j].eval(x, k),
            None => Ok(0.0),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval(x, 0).expect("order 0")
    }
}

/// `f_{ab} = g` on `[a, b]` and 0 elsewhere, with `a < b` level-`m` endpoints.
#[derive(Debug, Clone, Copy)]
pub struct TwoValuedFamilyMember<'g> {
    pub a: f64,
    pub b: f64,
    g: &'g FlatOnCantorFunction,
}

pub fn family_member(g: &FlatOnCantorFunction, a: f64, b: f64) -> Result<TwoValuedFamilyMember<'_>> {
    let c = g.cantor();
    if c.endpoint_index(a).is_none() || c.endpoint_index(b).is_none() {
        return Err(Error::InvalidArgument(format!("({a}, {b}) are not level-{} Cantor endpoints", c.level())));
    }
    if !(a < b) {
        return Err(Error::InvalidArgument(format!("need a < b, got ({a}, {b})")));
    }
    Ok(TwoValuedFamilyMember { a, b, g })
}

impl TwoValuedFamilyMember<'_> {
    pub fn eval(&self, x: f64) -> f64 {
        if self.a <= x && x <= self.b {
            self.g.value(x)
        } else {
            0.0
        }
    }

    pub fn eval_derivative(&self, x: f64, k: usize) -> Result<f64> {
        if self.a <= x && x <= self.b {
            self.g.eval(x, k)
        } else {
            Ok(0.0)
        }
    }
}

/// `C(2^{m+1}, 2)`: windows `[a, b]` over all endpoint pairs.
pub fn window_count(level: u32) -> u64 {
    let n = 1u64 << (level + 1);
    n * (n - 1) / 2
}

/// Windows from the left end of interval `s` to the right end of interval
/// `t`, `s < t`. Every other window shares its set of gaps with one of these
/// or contains no gap at all, so these are the distinct nonzero members.
pub fn distinct_windows(cantor: &CantorApprox) -> Vec<(f64, f64)> {
    let e = cantor.endpoints();
    let n = e.len() / 2;
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for s in 0..n {
        for t in s + 1..n {
            out.push((cantor.to_f64(e[2 * s]), cantor.to_f64(e[2 * t + 1])));
        }
    }
    out
}

/// All distinct members, or a uniform sample of `limit` of them.
pub fn sample_family<'g, R: Rng>(
    g: &'g FlatOnCantorFunction,
    limit: Option<usize>,
    rng: &mut R,
) -> Vec<TwoValuedFamilyMember<'g>> {
    let windows = distinct_windows(g.cantor());
    let chosen: Vec<usize> = match limit {
        Some(n) if n < windows.len() => {
            let mut idx = sample(rng, windows.len(), n).into_vec();
            idx.sort_unstable();
            idx
        }
        _ => (0..windows.len()).collect(),
    };
    chosen.into_iter().map(|i| TwoValuedFamilyMember { a: windows[i].0, b: windows[i].1, g }).collect()
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TwoValueReport {
    pub pass: bool,
    pub max_values: usize,
    /// Grid point with the most distinct values.
    pub worst_x: f64,
    /// Largest distance of any member value from `{0, g(x)}`.
    pub max_deviation: f64,
}

pub const TWO_VALUE_TOL: f64 = 1e-12;

/// At each `x`, the member values must lie in `{0, g(x)}`.
pub fn two_value_check(g: &FlatOnCantorFunction, family: &[TwoValuedFamilyMember<'_>], grid: &[f64]) -> TwoValueReport {
    let mut max_values = 0;
    let mut worst_x = grid.first().copied().unwrap_or(0.0);
    let mut max_deviation = 0f64;
    let mut distinct: Vec<f64> = Vec::new();
    for &x in grid {
        let gx = g.value(x);
        distinct.clear();
        for m in family {
            let v = m.eval(x);
            max_deviation = max_deviation.max(v.abs().min((v - gx).abs()));
            if !distinct.iter().any(|d| (d - v).abs() <= TWO_VALUE_TOL * d.abs().max(v.abs()).max(f64::MIN_POSITIVE)) {
                distinct.push(v);
            }
        }
        if distinct.len() > max_values {
            max_values = distinct.len();
            worst_x = x;
        }
    }
    let pass = max_values <= 2 && max_deviation <= TWO_VALUE_TOL;
    TwoValueReport { pass, max_values, worst_x, max_deviation }
}

/// First grid point where the two members differ, if any.
pub fn separating_point(f1: &TwoValuedFamilyMember<'_>, f2: &TwoValuedFamilyMember<'_>, grid: &[f64]) -> Option<f64> {
    grid.iter().copied().find(|&x| f1.eval(x) != f2.eval(x))
}

/// `n` evenly spaced points on `[0, 1]`.
pub fn unit_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| j as f64 / (n.max(2) - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(level: u32) -> FlatOnCantorFunction {
        build_flat_on_cantor(&WeightSequence::gevrey(2.0, 20).unwrap(), level, 8).unwrap()
    }

    #[test]
    fn vanishes_on_endpoints_and_outside() {
        let g = g(3);
        assert_eq!(g.value(0.0), 0.0);
        assert_eq!(g.value(2.0), 0.0);
        assert_eq!(g.value(-0.5), 0.0);
        assert!(g.value(0.5) > 0.0);
        for &e in g.cantor().endpoints() {
            assert_eq!(g.value(g.cantor().to_f64(e)), 0.0);
        }
        assert_eq!(g.bumps().len(), 7);
    }

    #[test]
    fn sampled_norms_within_envelope() {
        let g = g(3);
        let bounds = g.bound_table();
        let grid = unit_grid(20_001);
        for (k, &bound) in bounds.iter().enumerate().take(9) {
            let m = grid.iter().map(|&x| g.eval(x, k).unwrap().abs()).fold(0.0, f64::max);
            assert!(m <= bound * (1.0 + 1e-9), "k = {k}: {m} > {bound}");
        }
    }

    #[test]
    fn member_windows() {
        let g = g(2);
        let full = family_member(&g, 0.0, 1.0).unwrap();
        for &x in &unit_grid(101) {
            assert_eq!(full.eval(x), g.value(x));
        }
        let e = g.cantor().endpoints().to_vec();
        let m = family_member(&g, g.cantor().to_f64(e[2]), g.cantor().to_f64(e[5])).unwrap();
        assert_eq!(m.eval(0.05), 0.0);
        let inside = (g.cantor().to_f64(e[3]) + g.cantor().to_f64(e[4])) / 2.0;
        assert!(m.eval(inside) > 0.0);
        assert!(family_member(&g, 0.5, 1.0).is_err());
        assert!(family_member(&g, 1.0, 0.0).is_err());
    }

    #[test]
    fn distinct_member_count() {
        for m in 1..=5 {
            let c = CantorApprox::new(m).unwrap();
            let n = 1usize << m;
            assert_eq!(distinct_windows(&c).len(), n * (n - 1) / 2);
            assert_eq!(window_count(m), ((2 * n) * (2 * n - 1) / 2) as u64);
        }
    }

    #[test]
    fn full_family_is_two_valued() {
        let g = g(4);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let family = sample_family(&g, None, &mut rng);
        assert_eq!(family.len(), 120);
        let r = two_value_check(&g, &family, &unit_grid(2_000));
        assert!(r.pass && r.max_values == 2, "{r:?}");
        assert!(two_value_check(&g, &family[..1], &unit_grid(100)).pass);
    }

    #[test]
    fn edges_are_flat() {
        let g = g(3);
        let e = g.cantor().endpoints().to_vec();
        let m = family_member(&g, g.cantor().to_f64(e[2]), g.cantor().to_f64(e[9])).unwrap();
        let bounds = g.bound_table();
        let h = 1e-4;
        for &edge in &[m.a, m.b] {
            for (k, &bound) in bounds.iter().enumerate().take(5).skip(1) {
                // forward differences of order k on both sides of the edge
                for dir in [-1.0, 1.0] {
                    let mut fd = 0.0;
                    for j in 0..=k {
                        let binom = (1..=j).fold(1.0, |acc, t| acc * (k + 1 - t) as f64 / t as f64);
                        let sign = if (k - j).is_multiple_of(2) { 1.0 } else { -1.0 };
                        fd += sign * binom * m.eval(edge + dir * j as f64 * h);
                    }
                    let deriv = fd / h.powi(k as i32);
                    assert!(deriv.abs() <= 1e-6 * bound, "edge {edge}, k = {k}: {deriv}");
                }
            }
        }
    }
}
