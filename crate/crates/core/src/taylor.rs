//! Piecewise power-series solution of the differential-difference equation.
//!
//! On each unit interval `[k, k+1]` the level-`n` solution is stored as a
//! truncated series in `z ∈ [-1, 1]` with `s = k + 1/2 + z/2`. Moving one
//! interval to the right uses
//!
//! ```text
//! (k+1+t) f_n(k+1+t) = (k+1) f_n(k+1) - ∫_0^t f_{n-1}(k+x) dx,
//! ```
//!
//! which on series becomes a two-term coefficient recurrence. Crossing to the
//! next level needs one anchor value, obtained by integrating the finished
//! level exactly term by term.

use crate::error::{domain, Result, SieveError};

/// Default truncation degree (31 coefficients per table).
pub const DEFAULT_ORDER: usize = 30;
/// Default deepest level for the series path.
pub const DEFAULT_N_MAX: usize = 25;

/// Truncated series for `f_n` on `[k, k+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorTable {
    n: usize,
    k: usize,
    coeffs: Vec<f64>,
}

impl TaylorTable {
    pub fn new(n: usize, k: usize, coeffs: Vec<f64>) -> Result<Self> {
        if n == 0 || k == 0 || coeffs.is_empty() {
            return Err(SieveError::InvalidParameter(format!(
                "table needs n >= 1, k >= 1 and at least one coefficient (n = {n}, k = {k})"
            )));
        }
        Ok(Self { n, k, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn center(&self) -> f64 {
        self.k as f64 + 0.5
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Series value at `z`.
    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &b| acc * z + b)
    }

    /// Series value at `s = center + z/2`.
    pub fn eval_at(&self, s: f64) -> f64 {
        self.eval(2.0 * (s - self.center()))
    }

    /// `∫_{-1}^{z} series(w) dw`.
    pub fn integral_from_left(&self, z: f64) -> f64 {
        antiderivative(&self.coeffs, z) - antiderivative(&self.coeffs, -1.0)
    }

    /// `∫_k^{k+1} f_n(s) ds`, i.e. half the series integral over `[-1, 1]`.
    pub fn integral_over_interval(&self) -> f64 {
        // Odd powers vanish on the symmetric interval.
        let even: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| i % 2 == 0)
            .map(|(i, &b)| 2.0 * b / (i + 1) as f64)
            .sum();
        0.5 * even
    }
}

fn antiderivative(coeffs: &[f64], z: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .rev()
        .fold(0.0, |acc, (i, &b)| acc * z + b / (i + 1) as f64)
        * z
}

/// Series of `a/s` about `k + 1/2`: `b_i = (a/c) (-1/(2c))^i`.
fn reciprocal_table(n: usize, k: usize, a: f64, order: usize) -> TaylorTable {
    let c = k as f64 + 0.5;
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut term = a / c;
    for _ in 0..=order {
        coeffs.push(term);
        term *= -1.0 / (2.0 * c);
    }
    TaylorTable { n, k, coeffs }
}

/// Series of `f_1(s) = 3/s - 1` on `[k, k+1]`, `k ∈ {1, 2}`.
pub fn base_f1_table(k: usize, order: usize) -> Result<TaylorTable> {
    if k != 1 && k != 2 {
        return Err(SieveError::InvalidParameter(format!(
            "f_1 tables exist only for k = 1, 2, got {k}"
        )));
    }
    let mut t = reciprocal_table(1, k, 3.0, order);
    t.coeffs[0] -= 1.0;
    Ok(t)
}

/// Table for `(n, k+1)` from the value `f_n(k+1)` and the level-`(n-1)` table on `[k, k+1]`.
pub fn extend_from_value(n: usize, value_at_right: f64, lower: &TaylorTable) -> Result<TaylorTable> {
    if lower.n + 1 != n {
        return Err(SieveError::Mismatch(format!(
            "lower table is level {}, expected {}",
            lower.n,
            n.saturating_sub(1)
        )));
    }
    let k = lower.k;
    let kf = (k + 1) as f64;
    let center = kf + 0.5;
    let order = lower.order();
    let l = &lower.coeffs;
    // (c + z/2) B(z) = (k+1) f_n(k+1) - (1/2) ∫_{-1}^{z} L(w) dw
    let left = antiderivative(l, -1.0);
    let mut b = Vec::with_capacity(order + 1);
    b.push((kf * value_at_right + 0.5 * left) / center);
    for i in 1..=order {
        let next = -0.5 * (l[i - 1] / i as f64 + b[i - 1]) / center;
        b.push(next);
    }
    Ok(TaylorTable {
        n,
        k: k + 1,
        coeffs: b,
    })
}

/// Table for `(n, k+1)` from the tables `(n, k)` and `(n-1, k)`.
pub fn extend_interval(prev: &TaylorTable, lower: &TaylorTable) -> Result<TaylorTable> {
    if prev.k != lower.k {
        return Err(SieveError::Mismatch(format!(
            "tables cover different intervals: k = {} vs {}",
            prev.k, lower.k
        )));
    }
    if prev.n < 2 {
        return Err(SieveError::InvalidParameter(
            "extension needs level n >= 2".into(),
        ));
    }
    if prev.order() != lower.order() {
        return Err(SieveError::Mismatch(format!(
            "order mismatch: {} vs {}",
            prev.order(),
            lower.order()
        )));
    }
    extend_from_value(prev.n, prev.eval(1.0), lower)
}

#[derive(Debug, Clone, PartialEq)]
struct Level {
    n: usize,
    first_k: usize,
    tables: Vec<TaylorTable>,
    anchor: f64,
}

impl Level {
    fn table(&self, k: usize) -> Option<&TaylorTable> {
        k.checked_sub(self.first_k).and_then(|i| self.tables.get(i))
    }
}

/// All tables for levels `1..=n_max`.
///
/// Odd levels carry tables for `k = 1..=n+1`; even levels, which live on
/// `s >= 2`, for `k = 2..=n+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorFamily {
    order: usize,
    levels: Vec<Level>,
}

impl TaylorFamily {
    pub fn n_max(&self) -> usize {
        self.levels.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn table(&self, n: usize, k: usize) -> Option<&TaylorTable> {
        self.level(n).and_then(|l| l.table(k))
    }

    /// Tables of level `n`, left to right.
    pub fn tables(&self, n: usize) -> &[TaylorTable] {
        self.level(n).map(|l| l.tables.as_slice()).unwrap_or(&[])
    }

    /// `f_n(1)` for odd `n`, `f_n(2)` for even `n`.
    pub fn boundary_value(&self, n: usize) -> Option<f64> {
        self.level(n).map(|l| l.anchor)
    }

    fn level(&self, n: usize) -> Option<&Level> {
        n.checked_sub(1).and_then(|i| self.levels.get(i))
    }

    /// Anchor for level `n + 1` from the finished level `n`.
    ///
    /// For even `n` this is `f_{n+1}(1) = 3 f_{n+1}(3) = ∫_2^{n+2} f_n`, and the
    /// `[1,2]`, `[2,3]` tables of `3 f_{n+1}(3)/s` are materialized. For odd
    /// `n` it is `f_{n+1}(2) = (1/2) ∫_1^{n+2} f_n`.
    pub fn cross_boundary(&mut self, n: usize) -> Result<f64> {
        let level = self
            .level(n)
            .ok_or_else(|| SieveError::InvalidParameter(format!("level {n} not built")))?;
        if self.levels.len() != n {
            return Err(SieveError::InvalidParameter(format!(
                "level {} already exists",
                n + 1
            )));
        }
        if level.tables.len() != n + 2 - level.first_k {
            return Err(SieveError::Mismatch(format!("level {n} is incomplete")));
        }
        let total: f64 = level.tables.iter().map(|t| t.integral_over_interval()).sum();
        if n % 2 == 0 {
            let anchor = total;
            let tables = vec![
                reciprocal_table(n + 1, 1, anchor, self.order),
                reciprocal_table(n + 1, 2, anchor, self.order),
            ];
            self.levels.push(Level {
                n: n + 1,
                first_k: 1,
                tables,
                anchor,
            });
            Ok(anchor)
        } else {
            let anchor = 0.5 * total;
            self.levels.push(Level {
                n: n + 1,
                first_k: 2,
                tables: Vec::new(),
                anchor,
            });
            Ok(anchor)
        }
    }

    fn extend_top(&mut self) -> Result<()> {
        let n = self.levels.len();
        let (below, top) = self.levels.split_at_mut(n - 1);
        let lower = &below[n - 2];
        let top = &mut top[0];
        if top.tables.is_empty() {
            // Even level: the first table starts from f_n(2).
            let first = extend_from_value(n, top.anchor, lower.table(1).expect("odd level has k = 1"))?;
            top.tables.push(first);
        }
        while top.first_k + top.tables.len() <= n + 1 {
            let prev = top.tables.last().expect("nonempty");
            let low = lower.table(prev.k).ok_or_else(|| {
                SieveError::Mismatch(format!("level {} lacks interval k = {}", n - 1, prev.k))
            })?;
            let next = extend_interval(prev, low)?;
            top.tables.push(next);
        }
        Ok(())
    }

    /// `f_n(s)` from the tables. Odd levels are `3 f_n(3)/s` on `[1, 3]`.
    pub fn eval_fn(&self, n: usize, s: f64) -> Result<f64> {
        let level = self.level(n).ok_or_else(|| {
            SieveError::InvalidParameter(format!("level {n} outside 1..={}", self.n_max()))
        })?;
        if !(s >= 1.0) || s.is_nan() {
            return Err(domain("f_n", s, "s >= 1"));
        }
        if n % 2 == 0 && s < 2.0 {
            return Err(domain("f_n (even n)", s, "s >= 2"));
        }
        if s >= (n + 2) as f64 {
            return Ok(0.0);
        }
        if n % 2 == 1 && n > 1 && s < 3.0 {
            return Ok(level.anchor / s);
        }
        let k = (s.floor() as usize).clamp(level.first_k, n + 1);
        let table = level.table(k).expect("level complete");
        Ok(table.eval_at(s).max(0.0))
    }
}

/// Build every level up to `n_max` with series of degree `order`.
pub fn build_family(n_max: usize, order: usize) -> Result<TaylorFamily> {
    if n_max < 1 {
        return Err(SieveError::InvalidParameter("n_max must be >= 1".into()));
    }
    if order < 4 {
        return Err(SieveError::InvalidParameter(format!(
            "series order must be >= 4, got {order}"
        )));
    }
    let mut family = TaylorFamily {
        order,
        levels: vec![Level {
            n: 1,
            first_k: 1,
            tables: vec![base_f1_table(1, order)?, base_f1_table(2, order)?],
            anchor: 2.0,
        }],
    };
    for n in 1..n_max {
        family.cross_boundary(n)?;
        family.extend_top()?;
    }
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{f1_unchecked, f2_unchecked, LN_3};
    use crate::quadrature::adaptive_integrate;
    use proptest::prelude::*;

    #[test]
    fn base_tables() {
        let t1 = base_f1_table(1, DEFAULT_ORDER).unwrap();
        assert!((t1.coeffs()[0] - 1.0).abs() < 1e-15);
        assert!((t1.eval(1.0) - 0.5).abs() < 1e-13);
        let t2 = base_f1_table(2, DEFAULT_ORDER).unwrap();
        assert!(t2.eval(1.0).abs() < 1e-12);
        for i in 0..=20 {
            let s = 1.0 + i as f64 / 10.0;
            let t = if s <= 2.0 { &t1 } else { &t2 };
            assert!((t.eval_at(s) - f1_unchecked(s)).abs() < 1e-13, "s = {s}");
        }
        assert!(base_f1_table(3, DEFAULT_ORDER).is_err());
        assert!(base_f1_table(0, DEFAULT_ORDER).is_err());
    }

    #[test]
    fn integrals_are_exact_on_polynomials() {
        let t = TaylorTable::new(1, 1, vec![1.0, 2.0, 3.0]).unwrap();
        // ∫_{-1}^{1} (1 + 2z + 3z^2) dz = 4, halved for ds.
        assert!((t.integral_over_interval() - 2.0).abs() < 1e-15);
        assert!((t.integral_from_left(1.0) - 4.0).abs() < 1e-15);
        assert!((t.integral_from_left(0.0) - (1.0 - 1.0 + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn first_anchor_is_f2_at_two() {
        let fam = build_family(2, DEFAULT_ORDER).unwrap();
        let expected = (3.0 * LN_3 - 2.0) / 2.0;
        assert!((fam.boundary_value(2).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn level_two_matches_closed_form() {
        let fam = build_family(2, DEFAULT_ORDER).unwrap();
        for i in 0..200 {
            let s = 2.0 + 2.0 * i as f64 / 199.0;
            let v = fam.eval_fn(2, s).unwrap();
            assert!((v - f2_unchecked(s)).abs() < 1e-9, "s = {s}: {v}");
        }
        assert!((fam.eval_fn(2, 3.3).unwrap() - f2_unchecked(3.3)).abs() < 1e-9);
    }

    #[test]
    fn family_shape() {
        let fam = build_family(1, DEFAULT_ORDER).unwrap();
        assert_eq!(fam.tables(1).len(), 2);
        assert!(fam.table(1, 1).is_some() && fam.table(1, 2).is_some());
        let fam = build_family(6, DEFAULT_ORDER).unwrap();
        for n in 1..=6 {
            let ks: Vec<usize> = fam.tables(n).iter().map(|t| t.k()).collect();
            let first = if n % 2 == 1 { 1 } else { 2 };
            assert_eq!(ks, (first..=n + 1).collect::<Vec<_>>(), "level {n}");
        }
    }

    #[test]
    fn continuity_and_support() {
        let fam = build_family(12, DEFAULT_ORDER).unwrap();
        for n in 1..=12 {
            let tables = fam.tables(n);
            for w in tables.windows(2) {
                let (l, r) = (w[0].eval(1.0), w[1].eval(-1.0));
                assert!((l - r).abs() < 1e-10, "n = {n}, k = {}: {l} vs {r}", w[0].k());
            }
            let last = tables.last().unwrap();
            assert!(last.eval(1.0).abs() < 1e-9, "n = {n}: {}", last.eval(1.0));
        }
    }

    #[test]
    fn truncation_tail_is_small() {
        let fam = build_family(10, DEFAULT_ORDER).unwrap();
        for n in 1..=10 {
            for t in fam.tables(n) {
                let max = t.coeffs().iter().fold(0.0f64, |m, b| m.max(b.abs()));
                let tail = t.coeffs()[t.order()].abs();
                assert!(tail <= 1e-14 * max, "n = {n}, k = {}: {tail:e} vs {max:e}", t.k());
            }
        }
    }

    #[test]
    fn odd_levels_constant_below_three() {
        let fam = build_family(7, DEFAULT_ORDER).unwrap();
        for n in [3, 5, 7] {
            let a = 3.0 * fam.eval_fn(n, 3.0).unwrap();
            for i in 0..=20 {
                let s = 1.0 + i as f64 / 10.0;
                assert!((fam.eval_fn(n, s).unwrap() - a / s).abs() < 1e-10);
            }
            // the materialized tables agree with the rule
            let t = fam.table(n, 2).unwrap();
            assert!((t.eval_at(2.4) - a / 2.4).abs() < 1e-12);
        }
    }

    #[test]
    fn third_anchor_by_quadrature() {
        let fam = build_family(3, DEFAULT_ORDER).unwrap();
        let q = adaptive_integrate(|t| f2_unchecked(t - 1.0), 3.0, 5.0, 1e-13).unwrap();
        assert!((fam.boundary_value(3).unwrap() - q).abs() < 1e-8);
    }

    #[test]
    fn deep_levels_keep_invariants() {
        let fam = build_family(DEFAULT_N_MAX, DEFAULT_ORDER).unwrap();
        for n in 1..=DEFAULT_N_MAX {
            assert!(fam.boundary_value(n).unwrap() >= 0.0);
            let end = fam.tables(n).last().unwrap().eval(1.0);
            assert!(end.abs() < 1e-10, "n = {n}: {end:e}");
            let lo = if n % 2 == 0 { 2.0 } else { 1.0 };
            let hi = (n + 2) as f64;
            let mut last = f64::INFINITY;
            for i in 0..500 {
                let s = lo + (hi - lo) * i as f64 / 499.0;
                let v = fam.eval_fn(n, s).unwrap();
                assert!(v >= 0.0 && v <= last + 1e-12, "n = {n}, s = {s}");
                last = v;
            }
            for t in fam.tables(n) {
                let max = t.coeffs().iter().fold(0.0f64, |m, b| m.max(b.abs()));
                assert!(t.coeffs()[t.order()].abs() <= 1e-14 * max, "n = {n}, k = {}", t.k());
            }
        }
    }

    /// `d/dz [(c + z/2) B(z)]` as coefficients, dropping the truncated top term.
    fn product_derivative(t: &TaylorTable) -> Vec<f64> {
        let b = t.coeffs();
        let c = t.center();
        let mut p = vec![0.0; b.len() + 1];
        for (i, &bi) in b.iter().enumerate() {
            p[i] += c * bi;
            p[i + 1] += 0.5 * bi;
        }
        (1..b.len()).map(|i| i as f64 * p[i]).collect()
    }

    proptest! {
        #[test]
        fn recurrence_restates_the_equation(n in 2usize..=12, pick in 0usize..64) {
            let fam = build_family(12, DEFAULT_ORDER).unwrap();
            let tables = fam.tables(n);
            // skip tables fixed by the constant rule
            let derived: Vec<_> = tables.iter().filter(|t| n % 2 == 0 || t.k() >= 3).collect();
            let t = derived[pick % derived.len()];
            let lower = fam.table(n - 1, t.k() - 1).unwrap();
            let lhs = product_derivative(t);
            for (i, v) in lhs.iter().enumerate() {
                let rhs = -0.5 * lower.coeffs()[i];
                prop_assert!((v - rhs).abs() <= 1e-10, "n = {}, k = {}, i = {}: {} vs {}", n, t.k(), i, v, rhs);
            }
        }
    }

    #[test]
    fn eval_domain() {
        let fam = build_family(5, DEFAULT_ORDER).unwrap();
        assert!((fam.eval_fn(1, 1.7).unwrap() - (3.0 / 1.7 - 1.0)).abs() < 1e-13);
        assert_eq!(fam.eval_fn(5, 7.2).unwrap(), 0.0);
        assert!(fam.eval_fn(3, 0.9).is_err());
        assert!(fam.eval_fn(4, 1.5).is_err());
        assert!(fam.eval_fn(6, 3.0).is_err());
        assert!(fam.eval_fn(0, 3.0).is_err());
    }

    #[test]
    fn extension_rejects_mismatches() {
        let fam = build_family(3, DEFAULT_ORDER).unwrap();
        let a = fam.table(3, 3).unwrap();
        let b = fam.table(2, 2).unwrap();
        assert!(extend_interval(a, b).is_err());
        let short = TaylorTable::new(2, 3, vec![1.0; 5]).unwrap();
        assert!(extend_interval(a, &short).is_err());
        assert!(build_family(3, 3).is_err());
        assert!(build_family(0, 30).is_err());
    }
}
