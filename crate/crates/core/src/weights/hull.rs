//! Lower convex hull of points `(k, y_k)` with strictly increasing integer
//! abscissae.

use crate::scalar::Real;

#[inline]
fn cross<F: Real>(o: (usize, F), a: (usize, F), b: (usize, F)) -> F {
    let ax = F::from_usize_lossy(a.0 - o.0);
    let bx = F::from_usize_lossy(b.0 - o.0);
    ax * (b.1 - o.1) - (a.1 - o.1) * bx
}

/// Monotone chain over points already sorted by abscissa. Returns the indices
/// of hull vertices; collinear interior points are dropped, so only segment
/// endpoints are kept.
pub(crate) fn lower_hull<F: Real>(ys: &[F]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(ys.len().min(1024));
    for (k, &y) in ys.iter().enumerate() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            if cross((a, ys[a]), (b, ys[b]), (k, y)) <= F::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    hull
}

/// Piecewise-linear interpolation of `ys` between consecutive `vertices`.
/// Values at vertices are copied, not recomputed.
pub(crate) fn interpolate<F: Real>(ys: &[F], vertices: &[usize]) -> Vec<F> {
    let mut out = vec![F::zero(); ys.len()];
    if vertices.is_empty() {
        return out;
    }
    for w in vertices.windows(2) {
        let (i, j) = (w[0], w[1]);
        let span = F::from_usize_lossy(j - i);
        out[i] = ys[i];
        for (k, slot) in out.iter_mut().enumerate().take(j).skip(i + 1) {
            let t = F::from_usize_lossy(k - i);
            *slot = ys[i] + (ys[j] - ys[i]) * t / span;
        }
    }
    let last = *vertices.last().unwrap();
    out[last] = ys[last];
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drops_collinear_points() {
        let ys = [0.0f64, 1.0, 2.0, 3.0];
        assert_eq!(lower_hull(&ys), vec![0, 3]);
    }

    #[test]
    fn removes_bump() {
        let ys = [0.0f64, 10f64.ln(), 0.0];
        assert_eq!(lower_hull(&ys), vec![0, 2]);
        assert_eq!(interpolate(&ys, &[0, 2]), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn keeps_strictly_convex() {
        let ys: Vec<f64> = (0..20).map(|k| (k * k) as f64).collect();
        assert_eq!(lower_hull(&ys), (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn single_and_pair() {
        assert_eq!(lower_hull(&[1.0f64]), vec![0]);
        assert_eq!(lower_hull(&[1.0f64, -1.0]), vec![0, 1]);
    }
}
