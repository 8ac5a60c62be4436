//! The increasing bijection `h_P` glued from atoms, with provenance.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::ToPrimitive;
use serde::Serialize;

use super::atom::{AtomKey, ExactValue, TransitionAtom};
use super::registry::AtomRegistry;
use super::schedule::{self, Schedule};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

pub const DEFAULT_DEPTH: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Which piece of `h_P` produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Provenance {
    /// `u = x_P`, or `u` closer to `x_P` than the materialized depth.
    Point,
    /// Registry enumeration index.
    Atom(usize),
}

impl Provenance {
    pub fn atom(&self) -> Option<usize> {
        match self {
            Provenance::Atom(i) => Some(*i),
            Provenance::Point => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: ExactValue,
    pub provenance: Provenance,
    /// Set when `u ≠ x_P` fell inside the unmaterialized core; bounds
    /// `|h(u) − y_P|`.
    pub gap_bound: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct InverseEvaluation {
    pub x: f64,
    pub provenance: Provenance,
    pub gap_bound: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Sample {
    pub u: f64,
    pub value: f64,
    pub provenance: Provenance,
}

enum Located {
    Point,
    Beyond(f64),
    Atom(usize),
}

pub struct SparsePiecewiseMap {
    registry: Arc<AtomRegistry>,
    x_p: Dyadic,
    y_p: Dyadic,
    /// `d_1, …, d_{n+2}`
    offsets: Vec<Dyadic>,
    /// `g_1, …, g_{n+1}` with `q_i = y_P − g_i`
    gaps: Vec<Dyadic>,
    left: Vec<usize>,
    right: Vec<usize>,
    unit_rise: Dyadic,
    extensions: Mutex<HashMap<(Side, u64), usize>>,
}

impl std::fmt::Debug for SparsePiecewiseMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SparsePiecewiseMap")
            .field("point", &self.point())
            .field("depth", &self.depth())
            .finish()
    }
}

/// Core atoms toward `P = (x, y)` on both sides, `depth` pieces each.
///
/// `q_{i+1} = y_P − min(y(Δ_{i+1}, i+1), y_P − q_i) / 2`, which is already a
/// dyadic, so no rounding is needed to keep `y(Δ_i, i) > y_P − q_i > 0`.
pub fn build_core(
    registry: &Arc<AtomRegistry>,
    point: (f64, f64),
    schedule: &dyn Schedule,
    depth: u32,
) -> Result<SparsePiecewiseMap> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let x_p = Dyadic::from_f64(point.0)?;
    let y_p = Dyadic::from_f64(point.1)?;
    let offsets = schedule::take(schedule, depth + 1)?;
    let spans: Vec<Dyadic> = offsets.windows(2).map(|w| &w[0] - &w[1]).collect();
    let mut gaps = Vec::with_capacity(depth as usize + 1);
    for (j, span) in spans.iter().enumerate() {
        let y = Dyadic::from_f64(registry.end_value(span, j as u32 + 1)?)?;
        let g = match gaps.last() {
            None => y.half(),
            Some(prev) => y.min(Dyadic::clone(prev)).half(),
        };
        if !g.is_positive() {
            return Err(Error::SynthesisFailed(format!("range gap g_{} underflows", j + 1)));
        }
        gaps.push(g);
    }
    let mut left = Vec::with_capacity(depth as usize);
    let mut right = Vec::with_capacity(depth as usize);
    for j in 0..depth as usize {
        let gamma = &gaps[j] - &gaps[j + 1];
        let i = j as u32 + 1;
        left.push(registry.admit(AtomKey {
            p: &x_p - &offsets[j],
            q: &y_p - &gaps[j],
            delta: spans[j].clone(),
            gamma: gamma.clone(),
            i,
        })?);
        right.push(registry.admit(AtomKey {
            p: &x_p + &offsets[j + 1],
            q: &y_p + &gaps[j + 1],
            delta: spans[j].clone(),
            gamma,
            i,
        })?);
    }
    let unit_rise = Dyadic::from_f64(registry.end_value(&Dyadic::from_int(1), 1)?)?;
    Ok(SparsePiecewiseMap {
        registry: registry.clone(),
        x_p,
        y_p,
        offsets,
        gaps,
        left,
        right,
        unit_rise,
        extensions: Mutex::new(HashMap::new()),
    })
}

/// [`build_core`] with the halving schedule and a fresh registry.
pub fn build_default(point: (f64, f64), depth: u32) -> Result<SparsePiecewiseMap> {
    let seq = crate::weights::WeightSequence::gevrey(2.0, 64)?;
    let reg = AtomRegistry::shared(&seq, crate::flat::DEFAULT_K_MAX)?;
    build_core(&reg, point, &schedule::Halving, depth)
}

impl SparsePiecewiseMap {
    pub fn registry(&self) -> &Arc<AtomRegistry> {
        &self.registry
    }

    pub fn point(&self) -> (f64, f64) {
        (self.x_p.to_f64(), self.y_p.to_f64())
    }

    pub fn point_exact(&self) -> (&Dyadic, &Dyadic) {
        (&self.x_p, &self.y_p)
    }

    pub fn depth(&self) -> u32 {
        self.left.len() as u32
    }

    /// `(p_i, q_i)` for `i = 1..=depth + 1`; consecutive left atoms meet at these.
    pub fn junctions(&self) -> Vec<(Dyadic, Dyadic)> {
        self.offsets
            .iter()
            .zip(&self.gaps)
            .map(|(d, g)| (&self.x_p - d, &self.y_p - g))
            .collect()
    }

    /// Registry indices of core atoms `i = 1..=depth` on one side.
    pub fn core_atoms(&self, side: Side) -> &[usize] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn atom(&self, idx: usize) -> Arc<TransitionAtom> {
        self.registry.get(idx).expect("map indices are registered")
    }

    /// `y(1, 1)`, the rise of each unit extension atom.
    pub fn unit_rise(&self) -> f64 {
        self.unit_rise.to_f64()
    }

    /// Registry index of the `n`-th unit atom beyond the core (`n ≥ 1`).
    pub fn extension_atom(&self, side: Side, n: u64) -> Result<usize> {
        if n == 0 {
            return Err(Error::InvalidArgument("extension atoms are numbered from 1".into()));
        }
        if let Some(&idx) = self.extensions.lock().unwrap_or_else(|e| e.into_inner()).get(&(side, n)) {
            return Ok(idx);
        }
        let n_d = Dyadic::from_int(i64::try_from(n).map_err(|_| Error::InvalidArgument(format!("extension {n} too far")))?);
        let one = Dyadic::from_int(1);
        let key = match side {
            Side::Left => AtomKey {
                p: &(&self.x_p - &self.offsets[0]) - &n_d,
                q: &(&self.y_p - &self.gaps[0]) - &(&n_d * &self.unit_rise),
                delta: one,
                gamma: self.unit_rise.clone(),
                i: 1,
            },
            Side::Right => {
                let m = Dyadic::from_int(n as i64 - 1);
                AtomKey {
                    p: &(&self.x_p + &self.offsets[0]) + &m,
                    q: &(&self.y_p + &self.gaps[0]) + &(&m * &self.unit_rise),
                    delta: one,
                    gamma: self.unit_rise.clone(),
                    i: 1,
                }
            }
        };
        let idx = self.registry.admit(key)?;
        self.extensions.lock().unwrap_or_else(|e| e.into_inner()).insert((side, n), idx);
        Ok(idx)
    }

    /// Materializes the first `n` unit atoms on each side.
    pub fn extend_infinite(&self, n: u64) -> Result<&Self> {
        for k in 1..=n {
            self.extension_atom(Side::Left, k)?;
            self.extension_atom(Side::Right, k)?;
        }
        Ok(self)
    }

    fn to_count(v: &Dyadic) -> Result<u64> {
        v.floor_int().to_u64().ok_or_else(|| Error::InvalidArgument(format!("{v} is out of range")))
    }

    fn locate(&self, x: &Dyadic) -> Result<Located> {
        let n = self.left.len();
        if *x == self.x_p {
            return Ok(Located::Point);
        }
        if *x < self.x_p {
            let d = &self.x_p - x;
            if d > self.offsets[0] {
                // n = ceil(d − d_1)
                let m = Self::to_count(&(&self.offsets[0] - &d).neg_floor())?;
                return Ok(Located::Atom(self.extension_atom(Side::Left, m)?));
            }
            let j = self.offsets[..=n].partition_point(|o| *o >= d);
            if j > n {
                return Ok(Located::Beyond(self.gaps[n].to_f64()));
            }
            Ok(Located::Atom(self.left[j - 1]))
        } else {
            let d = x - &self.x_p;
            if d >= self.offsets[0] {
                let m = Self::to_count(&(&d - &self.offsets[0]))? + 1;
                return Ok(Located::Atom(self.extension_atom(Side::Right, m)?));
            }
            let j = self.offsets[..=n].partition_point(|o| *o > d);
            if j > n {
                return Ok(Located::Beyond(self.gaps[n].to_f64()));
            }
            Ok(Located::Atom(self.right[j - 1]))
        }
    }

    pub fn eval_exact(&self, x: &Dyadic) -> Result<Evaluation> {
        Ok(match self.locate(x)? {
            Located::Point => Evaluation { value: ExactValue::exact(self.y_p.clone()), provenance: Provenance::Point, gap_bound: None },
            Located::Beyond(gap) => {
                Evaluation { value: ExactValue::exact(self.y_p.clone()), provenance: Provenance::Point, gap_bound: Some(gap) }
            }
            Located::Atom(idx) => {
                Evaluation { value: self.atom(idx).value(x), provenance: Provenance::Atom(idx), gap_bound: None }
            }
        })
    }

    /// `h_P(u)` and the atom that produced it.
    pub fn eval_with_provenance(&self, u: f64) -> Result<Evaluation> {
        self.eval_exact(&Dyadic::from_f64(u)?)
    }

    /// `h_P^(k)(u)`; all derivatives vanish at `x_P`.
    pub fn derivative(&self, u: f64, k: usize) -> Result<f64> {
        let x = Dyadic::from_f64(u)?;
        match self.locate(&x)? {
            Located::Atom(idx) => self.atom(idx).derivative(&x, k),
            _ if k == 0 => Ok(self.y_p.to_f64()),
            _ => Ok(0.0),
        }
    }

    fn locate_value(&self, w: &Dyadic) -> Result<Located> {
        let n = self.left.len();
        if *w == self.y_p {
            return Ok(Located::Point);
        }
        let rise = self.unit_rise.to_f64();
        if *w < self.y_p {
            let e = &self.y_p - w;
            if e > self.gaps[0] {
                let q1 = &self.y_p - &self.gaps[0];
                let v = |m: u64| &q1 - &(&Dyadic::from_int(m as i64) * &self.unit_rise);
                let mut m = ((&e - &self.gaps[0]).to_f64() / rise).ceil().max(1.0) as u64;
                while v(m) > *w {
                    m += 1;
                }
                while m > 1 && v(m - 1) <= *w {
                    m -= 1;
                }
                return Ok(Located::Atom(self.extension_atom(Side::Left, m)?));
            }
            let j = self.gaps.partition_point(|g| *g >= e);
            if j > n {
                return Ok(Located::Beyond(self.offsets[n].to_f64()));
            }
            Ok(Located::Atom(self.left[j - 1]))
        } else {
            let t = w - &self.y_p;
            if t >= self.gaps[0] {
                let q = &self.y_p + &self.gaps[0];
                let v = |m: u64| &q + &(&Dyadic::from_int(m as i64 - 1) * &self.unit_rise);
                let mut m = ((&t - &self.gaps[0]).to_f64() / rise).floor().max(0.0) as u64 + 1;
                while m > 1 && v(m) > *w {
                    m -= 1;
                }
                while v(m + 1) <= *w {
                    m += 1;
                }
                return Ok(Located::Atom(self.extension_atom(Side::Right, m)?));
            }
            let j = self.gaps.partition_point(|g| *g > t);
            if j > n {
                return Ok(Located::Beyond(self.offsets[n].to_f64()));
            }
            Ok(Located::Atom(self.right[j - 1]))
        }
    }

    /// `h_P^{-1}(w)` by bisection inside the unique atom whose range holds `w`.
    pub fn inverse_exact(&self, w: &Dyadic) -> Result<InverseEvaluation> {
        Ok(match self.locate_value(w)? {
            Located::Point => InverseEvaluation { x: self.x_p.to_f64(), provenance: Provenance::Point, gap_bound: None },
            Located::Beyond(gap) => {
                InverseEvaluation { x: self.x_p.to_f64(), provenance: Provenance::Point, gap_bound: Some(gap) }
            }
            Located::Atom(idx) => {
                let atom = self.atom(idx);
                let local = atom.solve(w);
                let x = (&atom.key().p + &Dyadic::from_f64(local)?).to_f64();
                InverseEvaluation { x, provenance: Provenance::Atom(idx), gap_bound: None }
            }
        })
    }

    pub fn inverse_eval(&self, w: f64) -> Result<InverseEvaluation> {
        self.inverse_exact(&Dyadic::from_f64(w)?)
    }

    /// `n ≥ 2` evenly spaced samples on `[lo, hi]`.
    pub fn samples(&self, lo: f64, hi: f64, n: usize) -> Result<Vec<Sample>> {
        if n < 2 || !(hi > lo) {
            return Err(Error::InvalidArgument(format!("need n ≥ 2 and lo < hi, got n = {n}, [{lo}, {hi}]")));
        }
        (0..n)
            .map(|j| {
                let u = lo + (hi - lo) * j as f64 / (n - 1) as f64;
                let e = self.eval_with_provenance(u)?;
                Ok(Sample { u, value: e.value.to_f64(), provenance: e.provenance })
            })
            .collect()
    }
}

trait NegFloor {
    fn neg_floor(&self) -> Dyadic;
}

impl NegFloor for Dyadic {
    /// `floor(self)` negated, i.e. `ceil(−self)`.
    fn neg_floor(&self) -> Dyadic {
        Dyadic::new(-self.floor_int(), 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::WeightSequence;

    fn registry() -> Arc<AtomRegistry> {
        AtomRegistry::shared(&WeightSequence::gevrey(2.0, 64).unwrap(), 8).unwrap()
    }

    #[test]
    fn passes_through_point() {
        let map = build_core(&registry(), (0.3, -1.7), &schedule::Halving, 12).unwrap();
        let e = map.eval_with_provenance(0.3).unwrap();
        assert_eq!(e.value.to_dyadic(), Dyadic::from_f64(-1.7).unwrap());
        assert_eq!(e.provenance, Provenance::Point);
        assert!(e.gap_bound.is_none());
    }

    #[test]
    fn schedule_invariants() {
        let map = build_core(&registry(), (1.0, 2.0), &schedule::Halving, 20).unwrap();
        let js = map.junctions();
        for w in js.windows(2) {
            assert!(w[0].0 < w[1].0 && w[0].1 < w[1].1);
        }
        for (i, &idx) in map.core_atoms(Side::Left).iter().enumerate() {
            let a = map.atom(idx);
            assert!(a.ratio() <= 1.0);
            assert_eq!(a.flatness_index(), i as u32 + 1);
            // y(Δ_i, i) > y_P − q_i > 0
            let y = Dyadic::from_f64(a.transition().eval(a.transition().delta(), 0).unwrap()).unwrap();
            let gap = &Dyadic::from_f64(2.0).unwrap() - &a.key().q;
            assert!(gap.is_positive() && y > gap);
            // junction continuity, exactly
            assert_eq!(a.domain().0, js[i].0);
            assert_eq!(a.value(&js[i + 1].0).to_dyadic(), js[i + 1].1);
            if i + 1 < map.depth() as usize {
                let next = map.atom(map.core_atoms(Side::Left)[i + 1]);
                assert_eq!(next.value(&js[i + 1].0).to_dyadic(), js[i + 1].1);
            }
        }
    }

    #[test]
    fn extensions_start_where_core_ends() {
        let map = build_core(&registry(), (0.0, 0.0), &schedule::Halving, 8).unwrap();
        let js = map.junctions();
        let e1 = map.atom(map.extension_atom(Side::Left, 1).unwrap());
        assert_eq!(e1.domain().1, js[0].0);
        assert_eq!(e1.range().1, js[0].1);
        assert_eq!(e1.ratio(), 1.0);
        assert_eq!(e1.domain().0, &js[0].0 - &Dyadic::from_int(1));
        let r1 = map.atom(map.extension_atom(Side::Right, 1).unwrap());
        assert_eq!(r1.domain().0, Dyadic::from_int(1));
        let last_right = map.atom(map.core_atoms(Side::Right)[0]);
        assert_eq!(last_right.range().1, r1.range().0);
        let far = map.eval_with_provenance(-7.5).unwrap();
        assert_eq!(far.provenance, Provenance::Atom(map.extension_atom(Side::Left, 7).unwrap()));
    }

    #[test]
    fn odd_symmetry() {
        let map = build_core(&registry(), (0.25, 0.5), &schedule::Halving, 16).unwrap();
        for j in 1..100 {
            let d = j as f64 * 0.0371;
            let plus = map.eval_with_provenance(0.25 + d).unwrap().value.to_dyadic();
            let minus = map.eval_with_provenance(0.25 - d).unwrap().value.to_dyadic();
            let y_p = Dyadic::from_f64(0.5).unwrap();
            let a = (&plus - &y_p).to_f64();
            let b = (&y_p - &minus).to_f64();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300), "d = {d}: {a} vs {b}");
        }
    }

    #[test]
    fn inverse_round_trip() {
        let map = build_core(&registry(), (-0.4, 0.9), &schedule::Halving, 20).unwrap();
        for j in 0..100 {
            let u = -0.4 - 3.0 + 6.0 * (j as f64 + 0.5) / 100.0;
            let e = map.eval_with_provenance(u).unwrap();
            let inv = map.inverse_exact(&e.value.to_dyadic()).unwrap();
            assert_eq!(inv.provenance, e.provenance);
            assert!((inv.x - u).abs() < 1e-10, "u = {u}, got {}", inv.x);
        }
        assert_eq!(map.inverse_eval(0.9).unwrap().x, -0.4);
    }

    #[test]
    fn beyond_depth_falls_back_to_point() {
        let map = build_core(&registry(), (0.0, 0.0), &schedule::Halving, 4).unwrap();
        let e = map.eval_with_provenance(-0.01).unwrap();
        assert_eq!(e.provenance, Provenance::Point);
        assert!(e.gap_bound.unwrap() > 0.0);
    }

    #[test]
    fn shared_registry_collapses_identical_tails() {
        // P2 = P1 + (1, y(1,1)) shifts the left unit chain by exactly one atom
        let reg = registry();
        let a = build_core(&reg, (0.0, 0.0), &schedule::Halving, 6).unwrap();
        let b = build_core(&reg, (1.0, a.unit_rise()), &schedule::Halving, 6).unwrap();
        for &u in &[-1.25, -2.5, -3.75, -10.5] {
            let ea = a.eval_with_provenance(u).unwrap();
            let eb = b.eval_with_provenance(u).unwrap();
            assert_eq!(ea.provenance, eb.provenance);
            assert_eq!(ea.value, eb.value);
        }
        let size = reg.len();
        let c = build_core(&reg, (0.0, 0.0), &schedule::Halving, 6).unwrap();
        c.eval_with_provenance(-1.25).unwrap();
        assert_eq!(reg.len(), size);
    }
}
