//! Interpolation uniqueness and the pigeonhole bound: a family of degree-`n`
//! polynomials taking at most `m` values at each of `n + 1` columns has at
//! most `m^{n+1}` members.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Field;

/// Agreement tolerance at witnesses for inexact fields.
pub const VALUE_TOL: f64 = 1e-10;
/// Coefficient tolerance for inexact fields.
pub const COEFF_TOL: f64 = 1e-8;

/// Ascending coefficients with trailing zeros removed.
pub fn normalize<F: Field>(mut c: Vec<F>) -> Vec<F> {
    while c.last().is_some_and(|a| a.is_zero()) {
        c.pop();
    }
    c
}

pub fn degree<F: Field>(c: &[F]) -> Option<usize> {
    c.iter().rposition(|a| !a.is_zero())
}

pub fn eval<F: Field>(c: &[F], x: &F) -> F {
    c.iter().rev().fold(F::zero(), |acc, a| acc * x.clone() + a.clone())
}

fn check_distinct<F: Field>(xs: &[F]) -> Result<()> {
    for i in 0..xs.len() {
        for j in 0..i {
            if xs[i] == xs[j] {
                return Err(Error::DuplicateAbscissa(xs[i].to_f64_lossy()));
            }
        }
    }
    Ok(())
}

/// `w_j = 1 / Π_{k≠j} (x_j − x_k)`
pub fn barycentric_weights<F: Field>(xs: &[F]) -> Result<Vec<F>> {
    check_distinct(xs)?;
    Ok((0..xs.len())
        .map(|j| {
            let prod = (0..xs.len()).filter(|&k| k != j).fold(F::one(), |p, k| p * (xs[j].clone() - xs[k].clone()));
            F::one() / prod
        })
        .collect())
}

/// Second-form barycentric evaluation of the interpolant through `points`.
pub fn barycentric_eval<F: Field>(points: &[(F, F)], weights: &[F], x: &F) -> F {
    let mut num = F::zero();
    let mut den = F::zero();
    for ((xj, yj), wj) in points.iter().zip(weights) {
        if x == xj {
            return yj.clone();
        }
        let t = wj.clone() / (x.clone() - xj.clone());
        num = num + t.clone() * yj.clone();
        den = den + t;
    }
    num / den
}

/// Coefficients of the unique polynomial of degree `≤ n` through `n + 1`
/// points: `Σ_j y_j w_j ℓ(x) / (x − x_j)` with `ℓ` the node polynomial.
pub fn lagrange_interpolate<F: Field>(points: &[(F, F)]) -> Result<Vec<F>> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("need at least one point".into()));
    }
    let xs: Vec<F> = points.iter().map(|p| p.0.clone()).collect();
    let w = barycentric_weights(&xs)?;
    let n = points.len();
    // ℓ(x) = Π (x − x_k), ascending
    let mut node = vec![F::one()];
    for xk in &xs {
        let mut next = vec![F::zero(); node.len() + 1];
        for (d, a) in node.iter().enumerate() {
            next[d + 1] = next[d + 1].clone() + a.clone();
            next[d] = next[d].clone() - a.clone() * xk.clone();
        }
        node = next;
    }
    let mut coeffs = vec![F::zero(); n];
    for (j, (xj, yj)) in points.iter().enumerate() {
        // synthetic division ℓ(x) / (x − x_j)
        let mut q = vec![F::zero(); n];
        let mut carry = F::zero();
        for d in (1..=n).rev() {
            carry = node[d].clone() + carry * xj.clone();
            q[d - 1] = carry.clone();
        }
        let scale = yj.clone() * w[j].clone();
        for (c, qd) in coeffs.iter_mut().zip(q) {
            *c = c.clone() + scale.clone() * qd;
        }
    }
    Ok(coeffs)
}

/// Whether `f` and `g` agree at the `n + 1` witnesses. Agreement with
/// differing coefficients contradicts interpolation uniqueness and is an
/// error.
pub fn uniqueness_check<F: Field>(f: &[F], g: &[F], witnesses: &[F]) -> Result<bool> {
    check_distinct(witnesses)?;
    let bound = witnesses.len().saturating_sub(1);
    for p in [f, g] {
        if let Some(d) = degree(p).filter(|&d| d > bound) {
            return Err(Error::DegreeTooLarge { degree: d, bound });
        }
    }
    let agree = witnesses.iter().all(|x| eval(f, x).near(&eval(g, x), VALUE_TOL));
    if !agree {
        return Ok(false);
    }
    let len = f.len().max(g.len());
    let coeff = |p: &[F], d: usize| p.get(d).cloned().unwrap_or_else(F::zero);
    if let Some(d) = (0..len).find(|&d| !coeff(f, d).near(&coeff(g, d), COEFF_TOL)) {
        return Err(Error::UniquenessViolated(format!(
            "values agree at {} witnesses but coefficient {d} differs ({} vs {})",
            witnesses.len(),
            coeff(f, d).to_f64_lossy(),
            coeff(g, d).to_f64_lossy()
        )));
    }
    Ok(true)
}

/// Pairwise distinct polynomials of degree `≤ n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFamily<F> {
    degree_bound: usize,
    members: Vec<Vec<F>>,
}

impl<F: Field> PolyFamily<F> {
    pub fn new(degree_bound: usize, members: Vec<Vec<F>>) -> Result<Self> {
        let members: Vec<Vec<F>> = members.into_iter().map(normalize).collect();
        for m in &members {
            if let Some(d) = degree(m).filter(|&d| d > degree_bound) {
                return Err(Error::DegreeTooLarge { degree: d, bound: degree_bound });
            }
        }
        for i in 0..members.len() {
            if members[..i].contains(&members[i]) {
                return Err(Error::InvalidArgument(format!("member {i} duplicates an earlier member")));
            }
        }
        Ok(PolyFamily { degree_bound, members })
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn members(&self) -> &[Vec<F>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RefinementChain {
    /// `|G_0| = |family|, |G_1|, …, |G_{n+1}|`
    pub sizes: Vec<usize>,
    /// Largest number of distinct values at any column.
    pub max_values_per_column: usize,
    /// `m^{n+1}`
    pub bound: u128,
    /// Index of the sole member of `G_{n+1}`.
    pub survivor: usize,
}

fn classes<F: Field>(members: &[usize], family: &PolyFamily<F>, x: &F) -> Vec<Vec<usize>> {
    let mut out: Vec<(F, Vec<usize>)> = Vec::new();
    for &i in members {
        let v = eval(&family.members[i], x);
        match out.iter_mut().find(|(w, _)| w.near(&v, VALUE_TOL)) {
            Some((_, c)) => c.push(i),
            None => out.push((v, vec![i])),
        }
    }
    out.into_iter().map(|(_, c)| c).collect()
}

/// `G_j` = largest value class of `G_{j−1}` at column `x_j`.
pub fn pigeonhole_refine<F: Field>(family: &PolyFamily<F>, columns: &[F], m: usize) -> Result<RefinementChain> {
    let n = family.degree_bound;
    if columns.len() != n + 1 {
        return Err(Error::InvalidArgument(format!("need {} columns, got {}", n + 1, columns.len())));
    }
    check_distinct(columns)?;
    if columns.iter().any(|x| x.is_zero()) {
        return Err(Error::Precondition("columns must be nonzero".into()));
    }
    if family.is_empty() || m == 0 {
        return Err(Error::Precondition("need a nonempty family and m ≥ 1".into()));
    }
    let all: Vec<usize> = (0..family.len()).collect();
    let mut max_values = 0;
    for (j, x) in columns.iter().enumerate() {
        let c = classes(&all, family, x).len();
        if c > m {
            return Err(Error::Precondition(format!("column {} carries {c} > m = {m} values", j + 1)));
        }
        max_values = max_values.max(c);
    }
    let mut current = all;
    let mut sizes = vec![current.len()];
    for x in columns {
        let prev = current.len();
        current = classes(&current, family, x).into_iter().max_by_key(|c| c.len()).expect("nonempty class set");
        if current.len() * m < prev {
            return Err(Error::Precondition(format!("class of size {} below |G|/m = {prev}/{m}", current.len())));
        }
        sizes.push(current.len());
    }
    if current.len() != 1 {
        return Err(Error::UniquenessViolated(format!("{} members agree at all {} columns", current.len(), n + 1)));
    }
    let bound = (m as u128).checked_pow(n as u32 + 1).unwrap_or(u128::MAX);
    if family.len() as u128 > bound {
        return Err(Error::UniquenessViolated(format!("family of {} exceeds m^(n+1) = {bound}", family.len())));
    }
    Ok(RefinementChain { sizes, max_values_per_column: max_values, bound, survivor: current[0] })
}

/// Largest family of lines `a + b x`, `a, b ∈ [−c, c]` integers, taking at
/// most `m` values at each of two columns.
pub fn exhaustive_line_search(coef_bound: i64, columns: (i64, i64), m: usize) -> usize {
    let lines: Vec<(i64, i64)> = (-coef_bound..=coef_bound)
        .flat_map(|a| (-coef_bound..=coef_bound).map(move |b| (a + b * columns.0, a + b * columns.1)))
        .collect();
    let values = |f: fn(&(i64, i64)) -> i64| {
        let mut v: Vec<i64> = lines.iter().map(f).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let v1 = values(|l| l.0);
    let v2 = values(|l| l.1);
    let s1 = subsets(&v1, m);
    let s2 = subsets(&v2, m);
    let mut best = 0;
    for a in &s1 {
        let pool: Vec<i64> = lines.iter().filter(|l| a.contains(&l.0)).map(|l| l.1).collect();
        if pool.len() <= best {
            continue;
        }
        for b in &s2 {
            best = best.max(pool.iter().filter(|y| b.contains(y)).count());
        }
    }
    best
}

fn subsets(v: &[i64], m: usize) -> Vec<Vec<i64>> {
    let k = m.min(v.len());
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| v[i]).collect());
        let Some(pos) = (0..k).rev().find(|&i| idx[i] != i + v.len() - k) else {
            return out;
        };
        idx[pos] += 1;
        for i in pos + 1..k {
            idx[i] = idx[i - 1] + 1;
        }
    }
}

pub type PolyFamilyQ = PolyFamily<BigRational>;

fn small_rational<R: Rng>(rng: &mut R) -> BigRational {
    BigRational::new(BigInt::from(rng.gen_range(-20i64..=20)), BigInt::from(rng.gen_range(1i64..=6)))
}

/// A family built from `size` distinct value tuples, each coordinate drawn
/// from `m` prescribed values per column, interpolated exactly. Returns the
/// family and its columns.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize, m: usize, size: usize) -> Result<(PolyFamilyQ, Vec<BigRational>)> {
    let mut columns: Vec<BigRational> = Vec::new();
    while columns.len() < n + 1 {
        let x = BigRational::from_integer(BigInt::from(rng.gen_range(1i64..=4 * (n as i64 + 1))))
            * if rng.gen_bool(0.5) { BigRational::from_integer(1.into()) } else { BigRational::from_integer((-1).into()) };
        if !columns.contains(&x) {
            columns.push(x);
        }
    }
    let mut values: Vec<Vec<BigRational>> = Vec::new();
    for _ in 0..=n {
        let mut col: Vec<BigRational> = Vec::new();
        while col.len() < m {
            let v = small_rational(rng);
            if !col.contains(&v) {
                col.push(v);
            }
        }
        values.push(col);
    }
    let total = (m as u128).pow(n as u32 + 1);
    let size = (size as u128).min(total) as usize;
    let mut tuples: Vec<u128> = Vec::with_capacity(size);
    while tuples.len() < size {
        let t = rng.gen_range(0..total);
        if !tuples.contains(&t) {
            tuples.push(t);
        }
    }
    let members = tuples
        .into_iter()
        .map(|mut t| {
            let pts: Vec<(BigRational, BigRational)> = (0..=n)
                .map(|j| {
                    let v = values[j][(t % m as u128) as usize].clone();
                    t /= m as u128;
                    (columns[j].clone(), v)
                })
                .collect();
            lagrange_interpolate(&pts)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((PolyFamily::new(n, members)?, columns))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;
    use proptest::prelude::{any, prop, prop_assert, prop_assert_eq, proptest, ProptestConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn interpolation_examples() {
        assert_eq!(normalize(lagrange_interpolate(&[(0.0, 0.0), (1.0, 1.0)]).unwrap()), vec![0.0, 1.0]);
        let c = lagrange_interpolate(&[(q(0, 1), q(1, 1)), (q(1, 1), q(1, 1)), (q(2, 1), q(1, 1))]).unwrap();
        assert_eq!(normalize(c), vec![q(1, 1)]);
        assert!(matches!(lagrange_interpolate(&[(1.0, 0.0), (1.0, 2.0)]), Err(Error::DuplicateAbscissa(_))));
    }

    #[test]
    fn rational64_interpolation_is_exact() {
        let p = [Rational64::new(1, 2), Rational64::new(-3, 1), Rational64::new(2, 3)];
        let pts: Vec<_> = [-2i64, 1, 5].iter().map(|&x| {
            let x = Rational64::from_integer(x);
            (x, eval(&p, &x))
        }).collect();
        assert_eq!(lagrange_interpolate(&pts).unwrap(), p.to_vec());
    }

    #[test]
    fn random_quartic_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let p: Vec<f64> = (0..5).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let mut xs: Vec<f64> = (0..5).map(|_| rng.gen_range(-2.0..2.0)).collect();
            xs.sort_by(f64::total_cmp);
            if xs.windows(2).any(|w| w[1] - w[0] < 0.05) {
                continue;
            }
            let pts: Vec<_> = xs.iter().map(|&x| (x, eval(&p, &x))).collect();
            let c = lagrange_interpolate(&pts).unwrap();
            for (a, b) in c.iter().zip(&p) {
                assert!((a - b).abs() < 1e-8);
            }
            let w = barycentric_weights(&xs).unwrap();
            assert!((barycentric_eval(&pts, &w, &0.123) - eval(&p, &0.123)).abs() < 1e-9);
        }
    }

    #[test]
    fn uniqueness_examples() {
        let f = vec![1.0, 2.0, 3.0];
        assert!(uniqueness_check(&f, &f, &[0.0, 1.0, 2.0]).unwrap());
        // distinct lines meeting once do not agree at two witnesses
        assert!(!uniqueness_check(&[0.0, 1.0], &[2.0, -1.0], &[0.0, 1.0]).unwrap());
        // clustered witnesses: two quadratics agreeing to 1e-10 there
        let g = vec![0.0, 0.0, 1e-4];
        assert!(matches!(uniqueness_check(&[0.0], &g, &[0.0, 1e-6, 2e-6]), Err(Error::UniquenessViolated(_))));
        assert!(matches!(uniqueness_check(&[0.0, 0.0, 0.0, 1.0], &[0.0], &[0.0, 1.0]), Err(Error::DegreeTooLarge { .. })));
    }

    #[test]
    fn integer_lines_never_agree_twice() {
        let lines: Vec<[i64; 2]> = (-5..=5).flat_map(|a| (-5..=5).map(move |b| [a, b])).collect();
        let w = [q(1, 1), q(2, 1)];
        for f in &lines {
            for g in &lines {
                let to_q = |l: &[i64; 2]| vec![q(l[0], 1), q(l[1], 1)];
                assert_eq!(uniqueness_check(&to_q(f), &to_q(g), &w).unwrap(), f == g);
            }
        }
    }

    #[test]
    fn exhaustive_small_box() {
        assert_eq!(exhaustive_line_search(5, (1, 2), 2), 4);
        assert_eq!(exhaustive_line_search(2, (1, 2), 1), 1);
    }

    #[test]
    fn refinement_examples() {
        let single = PolyFamily::new(1, vec![vec![q(1, 1), q(2, 1)]]).unwrap();
        let r = pigeonhole_refine(&single, &[q(1, 1), q(2, 1)], 1).unwrap();
        assert_eq!(r.sizes, vec![1, 1, 1]);
        // 5 lines at 2 columns cannot take ≤ 2 values at each
        let lines = vec![vec![q(0, 1)], vec![q(1, 1)], vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(-1, 1)], vec![q(2, 1)]];
        let fam = PolyFamily::new(1, lines).unwrap();
        assert!(matches!(pigeonhole_refine(&fam, &[q(1, 1), q(2, 1)], 2), Err(Error::Precondition(_))));
        assert!(pigeonhole_refine(&fam, &[q(0, 1), q(2, 1)], 5).is_err());
        assert!(PolyFamily::new(1, vec![vec![q(0, 1), q(0, 1), q(1, 1)]]).is_err());
    }

    #[test]
    fn engineered_quadratics() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (fam, cols) = random_instance(&mut rng, 2, 4, 50).unwrap();
        assert_eq!(fam.len(), 50);
        let r = pigeonhole_refine(&fam, &cols, 4).unwrap();
        assert_eq!(*r.sizes.last().unwrap(), 1);
        assert!(r.sizes.windows(2).all(|w| w[1] <= w[0] && w[1] * 4 >= w[0]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn round_trip_exact(coeffs in prop::collection::vec(-50i64..50, 1..6), shift in -5i64..5) {
            let p: Vec<BigRational> = coeffs.iter().map(|&c| q(c, 3)).collect();
            let pts: Vec<_> = (0..p.len() as i64).map(|i| {
                let x = q(i + shift, 2);
                let y = eval(&p, &x);
                (x, y)
            }).collect();
            prop_assert_eq!(lagrange_interpolate(&pts).unwrap(), p);
        }

        #[test]
        fn random_families_refine_to_singletons(seed in any::<u64>(), n in 1usize..4, m in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let size = rng.gen_range(1..=m.pow(n as u32 + 1));
            let (fam, cols) = random_instance(&mut rng, n, m, size).unwrap();
            let r = pigeonhole_refine(&fam, &cols, m).unwrap();
            prop_assert_eq!(*r.sizes.last().unwrap(), 1);
            prop_assert!(fam.len() as u128 <= r.bound);
        }
    }
}
