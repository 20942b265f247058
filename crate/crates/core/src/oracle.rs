//! Slow reference evaluation of `f_n` by nested adaptive quadrature.
//!
//! Each level integrates the level below directly from the defining equation.
//! Values are memoized on a fixed node lattice and read back by cubic
//! interpolation whose stencil never straddles an integer, where the lower
//! levels have kinks.

use std::collections::HashMap;

use parking_lot::Mutex;

use crate::analytic::{f1_unchecked, ln_h};
use crate::error::{domain, Result, SieveError};
use crate::quadrature::try_integrate;
use crate::search::golden_max;

/// Deepest level the oracle supports.
pub const MAX_LEVEL: usize = 6;
/// Spacing of the memo lattice in `s`.
pub const NODE_STEP: f64 = 1e-4;
const NODES_PER_UNIT: i64 = 10_000;

/// Quadrature tolerance used when none is given.
pub fn default_tol(n: usize) -> f64 {
    if n <= 4 {
        1e-9
    } else {
        1e-7
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Key {
    /// `f_n` at lattice node `i`, i.e. `s = i * NODE_STEP`.
    Node(usize, i64),
    /// `∫_k^{k+1} f_{n-1}(t-1) dt`.
    Piece(usize, usize),
}

/// Memoized reference evaluator for levels `1..=6`.
///
/// The cache is shared behind a lock that is held only for lookups and
/// inserts, so concurrent callers may duplicate work but always agree.
#[derive(Debug)]
pub struct OracleCache {
    tol: f64,
    memo: Mutex<HashMap<Key, f64>>,
}

impl OracleCache {
    pub fn new(tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol < 1e-3) {
            return Err(SieveError::InvalidParameter(format!(
                "oracle tolerance must lie in (0, 1e-3), got {tol}"
            )));
        }
        Ok(Self {
            tol,
            memo: Mutex::new(HashMap::new()),
        })
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Number of memoized entries.
    pub fn len(&self) -> usize {
        self.memo.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `f_n(s)`.
    pub fn eval(&self, n: usize, s: f64) -> Result<f64> {
        check_level(n)?;
        if !(s >= 1.0) {
            return Err(domain("oracle f_n", s, "s >= 1"));
        }
        if n % 2 == 0 && s < 2.0 {
            return Err(domain("oracle f_n (even n)", s, "s >= 2"));
        }
        self.value(n, s)
    }

    fn value(&self, n: usize, s: f64) -> Result<f64> {
        let end = (n + 2) as f64;
        if s >= end {
            return Ok(0.0);
        }
        if n == 1 {
            return Ok(f1_unchecked(s));
        }
        if n % 2 == 1 && s <= 3.0 {
            return Ok(self.tail_from(n, 3)? / s);
        }
        if n >= 4 && n % 2 == 0 && s <= 4.0 {
            // f_{n-1}(t-1) = A/(t-1) on [2, 4]
            let a = self.tail_from(n - 1, 3)?;
            let four = 4.0 * self.node(n, 4 * NODES_PER_UNIT)?;
            return Ok((four + a * (3.0 / (s - 1.0)).ln()) / s);
        }
        self.interpolate(n, s)
    }

    /// `∫_k^{n+2} f_{n-1}(t-1) dt`, so `3 f_n(3)` for `k = 3`.
    fn tail_from(&self, n: usize, k: usize) -> Result<f64> {
        (k..n + 2).map(|j| self.piece(n, j)).sum()
    }

    fn piece(&self, n: usize, k: usize) -> Result<f64> {
        let key = Key::Piece(n, k);
        if let Some(&v) = self.memo.lock().get(&key) {
            return Ok(v);
        }
        let kf = k as f64;
        let v = self.integrate_lower(n, kf, kf + 1.0)?;
        self.memo.lock().insert(key, v);
        Ok(v)
    }

    fn integrate_lower(&self, n: usize, a: f64, b: f64) -> Result<f64> {
        let r = try_integrate(|t| self.value(n - 1, t - 1.0), a, b, self.tol)?;
        Ok(r.value)
    }

    /// `f_n` at lattice node `i`, computed from the defining equation.
    fn node(&self, n: usize, i: i64) -> Result<f64> {
        let key = Key::Node(n, i);
        if let Some(&v) = self.memo.lock().get(&key) {
            return Ok(v);
        }
        let s = i as f64 / NODES_PER_UNIT as f64;
        let v = if s >= (n + 2) as f64 {
            0.0
        } else {
            let next = s.floor() as usize + 1;
            let head = self.integrate_lower(n, s, next as f64)?;
            (head + self.tail_from(n, next)?) / s
        };
        self.memo.lock().insert(key, v);
        Ok(v)
    }

    fn interpolate(&self, n: usize, s: f64) -> Result<f64> {
        let x = s * NODES_PER_UNIT as f64;
        let i0 = x.floor() as i64;
        if (x - i0 as f64).abs() < 1e-9 {
            return self.node(n, i0);
        }
        // Keep the four-point stencil inside the unit interval holding s.
        let lo = s.floor() as i64 * NODES_PER_UNIT;
        let hi = lo + NODES_PER_UNIT;
        let start = (i0 - 1).clamp(lo, hi - 3);
        let mut acc = 0.0;
        for j in 0..4 {
            let xj = (start + j) as f64;
            let mut w = 1.0;
            for m in 0..4 {
                if m != j {
                    let xm = (start + m) as f64;
                    w *= (x - xm) / (xj - xm);
                }
            }
            acc += w * self.node(n, start + j)?;
        }
        Ok(acc.max(0.0))
    }
}

fn check_level(n: usize) -> Result<()> {
    if n == 0 || n > MAX_LEVEL {
        return Err(SieveError::InvalidParameter(format!(
            "oracle supports levels 1..={MAX_LEVEL}, got {n}"
        )));
    }
    Ok(())
}

/// One-shot `f_n(s)` with a fresh cache.
pub fn oracle_fn(n: usize, s: f64, tol: f64) -> Result<f64> {
    OracleCache::new(tol)?.eval(n, s)
}

/// Estimate of `sup_s (f_n(s) / (2 e^2 h(s)))^{1/(n-1)}` for `n` in `2..=6`.
///
/// Not a certified bound: a 1e-3 scan of the oracle followed by a local
/// golden-section refinement.
pub fn oracle_c_estimate(n: usize) -> Result<f64> {
    oracle_c_estimate_with(&OracleCache::new(default_tol(n))?, n)
}

/// As [`oracle_c_estimate`], reusing an existing cache.
pub fn oracle_c_estimate_with(cache: &OracleCache, n: usize) -> Result<f64> {
    check_level(n)?;
    if n < 2 {
        return Err(SieveError::InvalidParameter(
            "c estimate needs n >= 2".into(),
        ));
    }
    let lo = if n % 2 == 0 { 2.0 } else { 1.0 };
    let hi = (n + 2) as f64;
    let log_ratio = |s: f64| -> Result<f64> {
        let f = cache.eval(n, s)?;
        if f <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(f.ln() - std::f64::consts::LN_2 - 2.0 - ln_h(s))
    };
    let steps = ((hi - lo) * 1000.0).round() as usize;
    let mut best = (lo, f64::NEG_INFINITY);
    for i in 0..steps {
        let s = lo + i as f64 * 1e-3;
        let v = log_ratio(s)?;
        if v > best.1 {
            best = (s, v);
        }
    }
    let a = (best.0 - 1e-3).max(lo);
    let b = (best.0 + 1e-3).min(hi - 1e-9);
    let mut failure = None;
    let (_, refined) = golden_max(
        |s| match log_ratio(s) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NEG_INFINITY
            }
        },
        a,
        b,
        1e-10,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((refined.max(best.1) / (n - 1) as f64).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::f2_unchecked;

    #[test]
    fn level_one_is_closed_form() {
        let c = OracleCache::new(1e-10).unwrap();
        for i in 0..=40 {
            let s = 1.0 + i as f64 * 0.05;
            assert_eq!(c.eval(1, s).unwrap(), f1_unchecked(s));
        }
    }

    #[test]
    fn level_two_matches_closed_form() {
        let c = OracleCache::new(1e-10).unwrap();
        for i in 0..100 {
            let s = 2.0 + 2.5 * i as f64 / 99.0;
            let v = c.eval(2, s).unwrap();
            assert!((v - f2_unchecked(s)).abs() < 1e-9, "s = {s}: {v}");
        }
    }

    #[test]
    fn support_and_domain() {
        let c = OracleCache::new(1e-7).unwrap();
        assert_eq!(c.eval(5, 7.0).unwrap(), 0.0);
        assert_eq!(c.eval(3, 5.5).unwrap(), 0.0);
        assert!(c.eval(7, 3.0).is_err());
        assert!(c.eval(0, 3.0).is_err());
        assert!(c.eval(3, 0.5).is_err());
        assert!(c.eval(4, 1.5).is_err());
        assert!(OracleCache::new(0.0).is_err());
    }

    #[test]
    fn odd_level_constant_rule() {
        let c = OracleCache::new(1e-9).unwrap();
        let a = 3.0 * c.eval(3, 3.0).unwrap();
        for s in [1.0, 1.5, 2.25, 2.999] {
            assert!((s * c.eval(3, s).unwrap() - a).abs() < 1e-12);
        }
        // continuity just past the rule's edge
        assert!((c.eval(3, 3.0001).unwrap() - c.eval(3, 3.0).unwrap()).abs() < 1e-4);
    }

    #[test]
    fn nonincreasing() {
        let c = OracleCache::new(1e-8).unwrap();
        for n in 2..=4 {
            let lo = if n % 2 == 0 { 2.0 } else { 1.0 };
            let mut last = f64::INFINITY;
            let mut s = lo;
            while s < (n + 2) as f64 {
                let v = c.eval(n, s).unwrap();
                assert!(v <= last + 1e-10, "n = {n}, s = {s}");
                last = v;
                s += 0.01;
            }
        }
    }

    #[test]
    fn c2_estimate() {
        let c = oracle_c_estimate(2).unwrap();
        assert!((c - 0.33).abs() <= 0.01, "{c}");
        assert!(oracle_c_estimate(1).is_err());
        assert!(oracle_c_estimate(7).is_err());
    }
}
