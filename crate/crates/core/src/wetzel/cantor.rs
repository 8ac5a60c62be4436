//! Level-`m` approximation of the middle-thirds Cantor set, with endpoints
//! stored as integer numerators over `3^m`.

use serde::Serialize;

use crate::error::{Error, Result};

pub const MAX_LEVEL: u32 = 12;

/// A removed open interval `(lo, hi) / 3^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Gap {
    pub lo: u64,
    pub hi: u64,
    /// Construction stage `1..=m`; the gap has length `3^{-stage}`.
    pub stage: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CantorApprox {
    level: u32,
    denom: u64,
    /// `2^{m+1}` sorted endpoint numerators; interval `s` is
    /// `[endpoints[2s], endpoints[2s+1]]`.
    endpoints: Vec<u64>,
    gaps: Vec<Gap>,
}

impl CantorApprox {
    pub fn new(level: u32) -> Result<Self> {
        if level > MAX_LEVEL {
            return Err(Error::InvalidArgument(format!("level {level} exceeds {MAX_LEVEL}")));
        }
        let denom = 3u64.pow(level);
        let mut lefts = vec![0u64];
        for stage in 1..=level {
            let step = 2 * 3u64.pow(level - stage);
            lefts = lefts.iter().flat_map(|&a| [a, a + step]).collect();
        }
        let endpoints: Vec<u64> = lefts.iter().flat_map(|&a| [a, a + 1]).collect();
        let gaps = endpoints[1..endpoints.len() - 1]
            .chunks(2)
            .map(|w| {
                let len = w[1] - w[0];
                let mut stage = level;
                let mut l = len;
                while l > 1 {
                    l /= 3;
                    stage -= 1;
                }
                Gap { lo: w[0], hi: w[1], stage }
            })
            .collect();
        Ok(CantorApprox { level, denom, endpoints, gaps })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// `3^m`
    pub fn denominator(&self) -> u64 {
        self.denom
    }

    pub fn endpoints(&self) -> &[u64] {
        &self.endpoints
    }

    pub fn gaps(&self) -> &[Gap] {
        &self.gaps
    }

    pub fn to_f64(&self, numerator: u64) -> f64 {
        numerator as f64 / self.denom as f64
    }

    /// Index of the endpoint nearest `x` if it rounds to `x`.
    pub fn endpoint_index(&self, x: f64) -> Option<usize> {
        self.endpoints.iter().position(|&e| self.to_f64(e) == x)
    }
}
