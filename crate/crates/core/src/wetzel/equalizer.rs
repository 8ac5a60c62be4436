//! Coincidence sets of analytic functions are discrete: a numerical
//! demonstration on sinusoids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `amplitude · sin(omega x + phase) + offset`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticFn {
    pub amplitude: f64,
    pub omega: f64,
    pub phase: f64,
    pub offset: f64,
}

impl AnalyticFn {
    pub const fn sinusoid(amplitude: f64, omega: f64, phase: f64, offset: f64) -> Self {
        AnalyticFn { amplitude, omega, phase, offset }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.amplitude * (self.omega * x + self.phase).sin() + self.offset
    }
}

/// The fixed test registry.
pub const REGISTRY: &[(&str, AnalyticFn)] = &[
    ("sin", AnalyticFn::sinusoid(1.0, 1.0, 0.0, 0.0)),
    ("cos", AnalyticFn::sinusoid(1.0, 1.0, std::f64::consts::FRAC_PI_2, 0.0)),
    ("sin-shift", AnalyticFn::sinusoid(1.0, 1.0, 1.0, 0.0)),
    ("sin2", AnalyticFn::sinusoid(0.5, 2.0, 0.3, 0.1)),
    ("sin3", AnalyticFn::sinusoid(0.8, 3.0, -0.7, -0.2)),
];

pub fn lookup(name: &str) -> Result<AnalyticFn> {
    REGISTRY
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| *f)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown analytic function '{name}'")))
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PairEqualizers {
    pub first: usize,
    pub second: usize,
    pub roots: Vec<f64>,
    /// `|f_i − f_j| ≤ 1e-12` on the whole grid.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EqualizerReport {
    pub interval: (f64, f64),
    pub pairs: Vec<PairEqualizers>,
    /// Union of all pairwise roots, sorted.
    pub merged: Vec<f64>,
    pub min_separation: Option<f64>,
    pub degenerate: bool,
    pub discrete: bool,
}

pub const DEGENERATE_TOL: f64 = 1e-12;

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    lo + (hi - lo) / 2.0
}

/// Roots of `f` on `[lo, hi]` from sign changes over `grid` subintervals.
pub fn isolate_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, grid: usize) -> Vec<f64> {
    let xs: Vec<f64> = (0..=grid).map(|j| lo + (hi - lo) * j as f64 / grid as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut roots = Vec::new();
    for j in 0..grid {
        if vals[j] == 0.0 {
            roots.push(xs[j]);
        } else if vals[j + 1] != 0.0 && (vals[j] < 0.0) != (vals[j + 1] < 0.0) {
            roots.push(bisect(&f, xs[j], xs[j + 1]));
        }
    }
    if vals[grid] == 0.0 {
        roots.push(xs[grid]);
    }
    roots
}

/// Pairwise equalizer points of `fns` on `interval`; the report is discrete
/// when no pair is degenerate and merged roots are more than `delta` apart.
pub fn equalizer_demo(fns: &[AnalyticFn], interval: (f64, f64), grid: usize, delta: f64) -> Result<EqualizerReport> {
    let (lo, hi) = interval;
    if !(hi > lo) || grid < 2 {
        return Err(Error::InvalidArgument(format!("need lo < hi and grid ≥ 2, got [{lo}, {hi}], {grid}")));
    }
    let mut pairs = Vec::new();
    for i in 0..fns.len() {
        for j in i + 1..fns.len() {
            let diff = |x: f64| fns[i].eval(x) - fns[j].eval(x);
            let degenerate = (0..=grid).all(|t| diff(lo + (hi - lo) * t as f64 / grid as f64).abs() <= DEGENERATE_TOL);
            let roots = if degenerate { Vec::new() } else { isolate_roots(diff, lo, hi, grid) };
            pairs.push(PairEqualizers { first: i, second: j, roots, degenerate });
        }
    }
    let mut merged: Vec<f64> = pairs.iter().flat_map(|p| p.roots.iter().copied()).collect();
    merged.sort_by(f64::total_cmp);
    let min_separation = merged.windows(2).map(|w| w[1] - w[0]).reduce(f64::min);
    let degenerate = pairs.iter().any(|p| p.degenerate);
    let discrete = !degenerate && min_separation.is_none_or(|s| s > delta);
    Ok(EqualizerReport { interval, pairs, merged, min_separation, degenerate, discrete })
}
