//! Finite-scale sparseness tables and derivative audits.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use super::map::{build_core, Side, SparsePiecewiseMap};
use super::registry::AtomRegistry;
use super::schedule::Schedule;
use super::TransitionAtom;
use crate::dyadic::Dyadic;
use crate::error::Result;

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportRow {
    pub point: usize,
    pub x_p: f64,
    pub y_p: f64,
    pub u: f64,
    pub value: f64,
    /// `None` only if `u` fell below the materialized depth.
    pub atom: Option<usize>,
    /// `h(u)` equals the registered atom's own value at `u`.
    pub verified: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SparsenessReport {
    pub rows: Vec<ReportRow>,
    /// `(P, u)` pairs with `u = x_P`, left out of the table.
    pub excluded: usize,
    pub pairs: usize,
    pub registry_size: usize,
    pub distinct_atoms_used: usize,
    pub misses: usize,
    pub all_resolved: bool,
}

/// Evaluates `h_P(u)` for every point and query over one shared registry.
pub fn sparseness_report(
    registry: &Arc<AtomRegistry>,
    points: &[(f64, f64)],
    queries: &[f64],
    schedule: &dyn Schedule,
    depth: u32,
) -> Result<SparsenessReport> {
    let mut rows = Vec::with_capacity(points.len() * queries.len());
    let mut excluded = 0;
    for (pi, &p) in points.iter().enumerate() {
        let map = build_core(registry, p, schedule, depth)?;
        for &u in queries {
            if u == p.0 {
                excluded += 1;
                continue;
            }
            let e = map.eval_with_provenance(u)?;
            let atom = e.provenance.atom();
            let verified = match atom {
                Some(idx) => map.atom(idx).value(&Dyadic::from_f64(u)?) == e.value,
                None => false,
            };
            rows.push(ReportRow { point: pi, x_p: p.0, y_p: p.1, u, value: e.value.to_f64(), atom, verified });
        }
    }
    let used: BTreeSet<usize> = rows.iter().filter_map(|r| r.atom).collect();
    let misses = rows.iter().filter(|r| !r.verified).count();
    Ok(SparsenessReport {
        pairs: rows.len(),
        excluded,
        registry_size: registry.len(),
        distinct_atoms_used: used.len(),
        misses,
        all_resolved: misses == 0,
        rows,
    })
}

/// `max |t^(k)|` over `samples` evenly spaced points of the atom's domain,
/// for `k = 0..=k_max` (entry 0 unused).
pub fn atom_norms(atom: &TransitionAtom, k_max: usize, samples: usize) -> Result<Vec<f64>> {
    let (p0, _) = atom.domain();
    let delta = atom.transition().delta();
    let mut out = vec![0.0; k_max + 1];
    for j in 0..samples {
        let local = delta * (j as f64 + 0.5) / samples as f64;
        let x = &p0 + &Dyadic::from_f64(local)?;
        for (k, m) in out.iter_mut().enumerate().skip(1) {
            *m = f64::max(*m, atom.derivative(&x, k)?.abs());
        }
    }
    Ok(out)
}

/// Per-piece `max |h^(k)|` on core pieces `i = 1..=depth`.
pub fn piece_envelope(map: &SparsePiecewiseMap, side: Side, k: usize, samples: usize) -> Result<Vec<f64>> {
    map.core_atoms(side)
        .iter()
        .map(|&idx| Ok(atom_norms(&map.atom(idx), k, samples)?[k]))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DerivativeAudit {
    /// Sampled `max |h^(k)|`, `k = 1..=K_max`.
    pub max_norms: Vec<f64>,
    /// `M_k`
    pub bounds: Vec<f64>,
    pub pass: bool,
}

/// Checks `‖h^(k)‖ ≤ M_k` on every core piece and the first `extension`
/// unit atoms on each side.
pub fn derivative_audit(map: &SparsePiecewiseMap, extension: u64, samples: usize) -> Result<DerivativeAudit> {
    let reg = map.registry();
    let k_max = reg.k_max();
    let mut atoms: Vec<usize> = map.core_atoms(Side::Left).to_vec();
    atoms.extend_from_slice(map.core_atoms(Side::Right));
    for n in 1..=extension {
        atoms.push(map.extension_atom(Side::Left, n)?);
        atoms.push(map.extension_atom(Side::Right, n)?);
    }
    let mut max_norms = vec![0.0; k_max];
    for idx in atoms {
        let norms = atom_norms(&map.atom(idx), k_max, samples)?;
        for (m, n) in max_norms.iter_mut().zip(&norms[1..]) {
            *m = f64::max(*m, *n);
        }
    }
    let bounds = (1..=k_max).map(|k| reg.sequence().m(k)).collect::<Result<Vec<f64>>>()?;
    let pass = max_norms.iter().zip(&bounds).all(|(m, b)| *m <= b * (1.0 + 1e-9));
    Ok(DerivativeAudit { max_norms, bounds, pass })
}
