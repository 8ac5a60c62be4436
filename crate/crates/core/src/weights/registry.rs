//! Named weight families loaded from JSON.
//!
//! ```json
//! [{ "name": "gevrey2", "kind": "gevrey", "params": { "s": 2.0 }, "K": 64 }]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{WeightKind, WeightSequence};
use crate::error::{Error, Result};
use crate::scalar::Real;

const BUILTIN: &str = include_str!("../../data/weights.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightEntry {
    pub name: String,
    pub kind: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(rename = "K")]
    pub max_index: usize,
}

impl WeightEntry {
    fn param(&self, key: &str) -> Result<f64> {
        self.params
            .get(key)
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::Registry(format!("entry '{}' needs numeric param '{key}'", self.name)))
    }

    pub fn kind_tag(&self) -> Result<WeightKind> {
        Ok(match self.kind.as_str() {
            "factorial" => WeightKind::Factorial,
            "gevrey" => WeightKind::Gevrey { s: self.param("s")? },
            "power" => WeightKind::Power { c: self.param("c")? },
            "custom" => WeightKind::Custom,
            other => return Err(Error::Registry(format!("unknown kind '{other}' in entry '{}'", self.name))),
        })
    }

    pub fn to_sequence<F: Real>(&self) -> Result<WeightSequence<F>> {
        self.to_sequence_with(self.max_index)
    }

    /// Materializes the entry with a different `K` (closed forms only grow).
    pub fn to_sequence_with<F: Real>(&self, max_index: usize) -> Result<WeightSequence<F>> {
        match self.kind_tag()? {
            WeightKind::Factorial => WeightSequence::factorial(max_index),
            WeightKind::Gevrey { s } => WeightSequence::gevrey(s, max_index),
            WeightKind::Power { c } => WeightSequence::power(c, max_index),
            WeightKind::Custom => {
                let prefix = self
                    .params
                    .get("prefix")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Registry(format!("custom entry '{}' needs 'prefix'", self.name)))?;
                let values = prefix
                    .iter()
                    .map(|v| v.as_f64().map(F::lit))
                    .collect::<Option<Vec<F>>>()
                    .ok_or_else(|| Error::Registry(format!("non-numeric prefix in '{}'", self.name)))?;
                let seq = WeightSequence::custom(values)?;
                if max_index == seq.max_index() {
                    Ok(seq)
                } else {
                    seq.with_max_index(max_index)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightRegistry {
    entries: Vec<WeightEntry>,
}

impl WeightRegistry {
    pub fn builtin() -> Self {
        Self::from_json(BUILTIN).expect("bundled registry parses")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let entries: Vec<WeightEntry> =
            serde_json::from_str(text).map_err(|e| Error::Registry(format!("bad registry JSON: {e}")))?;
        for (i, e) in entries.iter().enumerate() {
            e.kind_tag()?;
            if entries[..i].iter().any(|o| o.name == e.name) {
                return Err(Error::Registry(format!("duplicate name '{}'", e.name)));
            }
        }
        Ok(WeightRegistry { entries })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Registry(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn entries(&self) -> &[WeightEntry] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Result<&WeightEntry> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::Registry(format!("no weight family named '{name}'")))
    }
}
