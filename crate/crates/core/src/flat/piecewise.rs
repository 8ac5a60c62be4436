//! Compactly supported piecewise polynomials with exact box averaging and
//! central differencing.
//!
//! Each piece stores ascending coefficients in the local variable
//! `s = u - breaks[m]`, so pieces near the left end of the support stay
//! accurate even when their values are tiny.

use crate::scalar::Real;

#[derive(Debug, Clone)]
pub(crate) struct PiecewisePoly<F> {
    breaks: Vec<F>,
    coeffs: Vec<F>,
    stride: usize,
}

#[inline]
fn horner<F: Real>(c: &[F], s: F) -> F {
    c.iter().rev().fold(F::zero(), |acc, &a| acc * s + a)
}

/// Coefficients of `p(v + delta)` in `v`.
fn taylor_shift<F: Real>(c: &[F], delta: F) -> Vec<F> {
    let mut a = c.to_vec();
    if delta == F::zero() {
        return a;
    }
    let n = a.len();
    for k in 0..n.saturating_sub(1) {
        for j in (k..n - 1).rev() {
            a[j] = a[j] + delta * a[j + 1];
        }
    }
    a
}

impl<F: Real> PiecewisePoly<F> {
    /// Indicator of `[lo, hi]`.
    pub fn indicator(lo: F, hi: F) -> Self {
        PiecewisePoly { breaks: vec![lo, hi], coeffs: vec![F::one()], stride: 1 }
    }

    pub fn pieces(&self) -> usize {
        self.breaks.len() - 1
    }

    pub fn support(&self) -> (F, F) {
        (self.breaks[0], self.breaks[self.breaks.len() - 1])
    }

    #[cfg(test)]
    pub fn degree(&self) -> usize {
        self.stride - 1
    }

    fn piece(&self, m: usize) -> &[F] {
        &self.coeffs[m * self.stride..(m + 1) * self.stride]
    }

    /// Index of the piece containing `u`, or `None` outside the support.
    fn locate(&self, u: F) -> Option<usize> {
        let (lo, hi) = self.support();
        if !(u >= lo && u <= hi) {
            return None;
        }
        let idx = self.breaks.partition_point(|&b| b <= u);
        Some(idx.saturating_sub(1).min(self.pieces() - 1))
    }

    pub fn eval(&self, u: F) -> F {
        match self.locate(u) {
            Some(m) => horner(self.piece(m), u - self.breaks[m]),
            None => F::zero(),
        }
    }

    /// Coefficients of `self(x0 + v)` valid while `x0 + v` stays inside one
    /// piece; `outside_right` is the value to the right of the support.
    fn shifted(&self, x0: F, outside_right: F) -> Vec<F> {
        let (lo, hi) = self.support();
        if x0 < lo {
            return vec![F::zero()];
        }
        if x0 >= hi {
            return vec![outside_right];
        }
        let m = self.locate(x0).expect("inside support");
        taylor_shift(self.piece(m), x0 - self.breaks[m])
    }

    /// Antiderivative vanishing at the left end of the support; constant
    /// (the total integral) to the right of it.
    pub fn antiderivative(&self) -> (Self, F) {
        let stride = self.stride + 1;
        let mut coeffs = Vec::with_capacity(self.pieces() * stride);
        let mut acc = F::zero();
        for m in 0..self.pieces() {
            let c = self.piece(m);
            let mut p = Vec::with_capacity(stride);
            p.push(acc);
            for (d, &a) in c.iter().enumerate() {
                p.push(a / F::from_usize_lossy(d + 1));
            }
            let len = self.breaks[m + 1] - self.breaks[m];
            let mut p_no_const = p.clone();
            p_no_const[0] = F::zero();
            acc = acc + horner(&p_no_const, len);
            coeffs.extend(p);
        }
        (PiecewisePoly { breaks: self.breaks.clone(), coeffs, stride }, acc)
    }

    fn merged_breaks(&self, half: F) -> Vec<F> {
        let mut b: Vec<F> = self
            .breaks
            .iter()
            .flat_map(|&t| [t - half, t + half])
            .collect();
        b.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
        b.dedup();
        b
    }

    /// Generic `u ↦ h(u + a/2) − h(u − a/2)` over the merged breakpoints.
    fn shifted_difference(h: &Self, tail: F, a: F, scale: F, base: &Self) -> Self {
        let half = a / F::lit(2.0);
        let breaks = base.merged_breaks(half);
        let stride = h.stride;
        let mut coeffs = Vec::with_capacity((breaks.len() - 1) * stride);
        for w in breaks.windows(2) {
            let tau = w[0];
            let plus = h.shifted(tau + half, tail);
            let minus = h.shifted(tau - half, tail);
            for d in 0..stride {
                let p = plus.get(d).copied().unwrap_or(F::zero());
                let q = minus.get(d).copied().unwrap_or(F::zero());
                coeffs.push((p - q) * scale);
            }
        }
        PiecewisePoly { breaks, coeffs, stride }
    }

    /// Convolution with the unit-mass box of width `a`.
    pub fn box_average(&self, a: F) -> Self {
        let (anti, total) = self.antiderivative();
        Self::shifted_difference(&anti, total, a, F::one() / a, self)
    }

    /// `u ↦ f(u + a/2) − f(u − a/2)` (no division by `a`).
    pub fn central_difference(&self, a: F) -> Self {
        Self::shifted_difference(self, F::zero(), a, F::one(), self)
    }
}
