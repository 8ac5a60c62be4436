//! Reference constants of the classical flat-function construction, kept for
//! order-of-magnitude comparison with the cascade widths.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::weights::{classify, Verdict, WeightSequence};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HughesConstants {
    /// `L_1 = 8 M_0 / ε`
    pub l1: f64,
    /// `D = Σ_{n≥2} (L_{n-1}/L_n) (Σ_{k≥n} L_{k-1}/L_k)^{-1/2}`, truncated.
    pub d: f64,
    /// `ρ = ε / (8D)`
    pub rho: f64,
    /// `λ_ρ = L_0/L_1 + ρ D`
    pub lambda: f64,
}

/// Auxiliary sequence `L_1 = 8 M_0/ε`, `L_n = M_n` otherwise, truncated at
/// `tail_depth`.
pub fn hughes_lambda<F: Real>(seq: &WeightSequence<F>, epsilon: f64, tail_depth: usize) -> Result<HughesConstants> {
    if tail_depth < 2 {
        return Err(Error::InvalidArgument("tail depth must be at least 2".into()));
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let seq = if seq.max_index() < tail_depth { seq.with_max_index(tail_depth)? } else { seq.clone() };
    if classify(&seq).verdict == Verdict::QuasiAnalytic {
        return Err(Error::NotNonQuasiAnalytic(format!("{:?}", seq.kind())));
    }
    let ln_m0 = seq.log_m(0)?.to_f64_lossy();
    let ln_l = |n: usize| -> Result<f64> {
        Ok(match n {
            1 => 8f64.ln() + ln_m0 - epsilon.ln(),
            _ => seq.log_m(n)?.to_f64_lossy(),
        })
    };
    // r_n = L_{n-1}/L_n for n = 1..=T
    let mut ratios = vec![0.0; tail_depth + 1];
    for (n, r) in ratios.iter_mut().enumerate().skip(1) {
        *r = (ln_l(n - 1)? - ln_l(n)?).exp();
    }
    let mut tail = vec![0.0; tail_depth + 2];
    for n in (1..=tail_depth).rev() {
        tail[n] = tail[n + 1] + ratios[n];
    }
    let mut d = 0.0;
    for n in 2..=tail_depth {
        if !(tail[n] > 0.0) {
            return Err(Error::DivisionByZero(format!("tail sum from n = {n} vanishes")));
        }
        d += ratios[n] / tail[n].sqrt();
    }
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::DivisionByZero(format!("D = {d}")));
    }
    let rho = epsilon / (8.0 * d);
    let l1 = ln_l(1)?.exp();
    Ok(HughesConstants { l1, d, rho, lambda: ratios[1] + rho * d })
}
