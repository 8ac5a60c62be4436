//! The shared, append-only set `T` of admitted atoms.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, MutexGuard};

use super::atom::{AtomKey, TransitionAtom};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::flat::{end_value, make_transition_with, FlatSynth, TransitionFunction};
use crate::weights::WeightSequence;

#[derive(Default)]
struct Inner {
    atoms: Vec<Arc<TransitionAtom>>,
    index: HashMap<AtomKey, usize>,
    transitions: HashMap<(Dyadic, u32), Arc<TransitionFunction<f64>>>,
}

/// Atoms are enumerated in insertion order; inserting an existing tuple
/// returns its original index.
pub struct AtomRegistry {
    synth: FlatSynth<f64>,
    inner: Mutex<Inner>,
}

impl std::fmt::Debug for AtomRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AtomRegistry").field("atoms", &self.len()).field("k_max", &self.synth.k_max()).finish()
    }
}

impl AtomRegistry {
    pub fn new(seq: &WeightSequence<f64>, k_max: usize) -> Result<Self> {
        Ok(AtomRegistry { synth: FlatSynth::new(seq, k_max)?, inner: Mutex::new(Inner::default()) })
    }

    pub fn shared(seq: &WeightSequence<f64>, k_max: usize) -> Result<Arc<Self>> {
        Self::new(seq, k_max).map(Arc::new)
    }

    fn lock(&self) -> MutexGuard<'_, Inner> {
        self.inner.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn sequence(&self) -> &WeightSequence<f64> {
        self.synth.sequence()
    }

    pub fn k_max(&self) -> usize {
        self.synth.k_max()
    }

    /// Cached `s_{Δ,i}`.
    pub fn transition(&self, delta: &Dyadic, i: u32) -> Result<Arc<TransitionFunction<f64>>> {
        let key = (delta.clone(), i);
        if let Some(t) = self.lock().transitions.get(&key) {
            return Ok(t.clone());
        }
        let d = delta.to_f64();
        if Dyadic::from_f64(d)? != *delta {
            return Err(Error::Dyadic(format!("Δ = {delta} is not an exact f64")));
        }
        let t = Arc::new(make_transition_with(&self.synth, d, i)?);
        Ok(self.lock().transitions.entry(key).or_insert(t).clone())
    }

    /// `y(Δ, i)`.
    pub fn end_value(&self, delta: &Dyadic, i: u32) -> Result<f64> {
        Ok(end_value(&*self.transition(delta, i)?))
    }

    /// Insert-if-absent; returns the enumeration index.
    pub fn admit(&self, key: AtomKey) -> Result<usize> {
        if let Some(&idx) = self.lock().index.get(&key) {
            return Ok(idx);
        }
        let atom = Arc::new(TransitionAtom::new(key.clone(), self.transition(&key.delta, key.i)?)?);
        let mut inner = self.lock();
        if let Some(&idx) = inner.index.get(&key) {
            return Ok(idx);
        }
        let idx = inner.atoms.len();
        inner.atoms.push(atom);
        inner.index.insert(key, idx);
        Ok(idx)
    }

    pub fn get(&self, idx: usize) -> Option<Arc<TransitionAtom>> {
        self.lock().atoms.get(idx).cloned()
    }

    pub fn index_of(&self, key: &AtomKey) -> Option<usize> {
        self.lock().index.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.lock().atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn transitions_cached(&self) -> usize {
        self.lock().transitions.len()
    }

    /// Snapshot of all atoms in enumeration order.
    pub fn atoms(&self) -> Vec<Arc<TransitionAtom>> {
        self.lock().atoms.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_if_absent() {
        let reg = AtomRegistry::new(&WeightSequence::gevrey(2.0, 20).unwrap(), 8).unwrap();
        let delta = Dyadic::pow2(-1);
        let y = Dyadic::from_f64(reg.end_value(&delta, 1).unwrap()).unwrap();
        let key = |q: i64| AtomKey { p: Dyadic::zero(), q: Dyadic::from_int(q), delta: delta.clone(), gamma: y.clone(), i: 1 };
        assert_eq!(reg.admit(key(0)).unwrap(), 0);
        assert_eq!(reg.admit(key(1)).unwrap(), 1);
        assert_eq!(reg.admit(key(0)).unwrap(), 0);
        assert_eq!(reg.len(), 2);
        assert_eq!(reg.transitions_cached(), 1);
        assert_eq!(reg.get(1).unwrap().key(), &key(1));
    }

    #[test]
    fn concurrent_admission_is_consistent() {
        let reg = AtomRegistry::shared(&WeightSequence::gevrey(2.0, 20).unwrap(), 8).unwrap();
        let delta = Dyadic::pow2(-2);
        let y = Dyadic::from_f64(reg.end_value(&delta, 2).unwrap()).unwrap();
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let reg = reg.clone();
                let (delta, y) = (delta.clone(), y.clone());
                std::thread::spawn(move || {
                    (0..20)
                        .map(|q| {
                            reg.admit(AtomKey { p: Dyadic::zero(), q: Dyadic::from_int(q), delta: delta.clone(), gamma: y.clone(), i: 2 })
                                .unwrap()
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        let results: Vec<Vec<usize>> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        assert!(results.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(reg.len(), 20);
    }
}
