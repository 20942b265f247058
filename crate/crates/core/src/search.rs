//! Scalar maximization: a dense scan followed by golden-section refinement.

/// Number of coarse scan cells.
pub const SCAN_CELLS: usize = 10_000;

/// Relative upward slack applied to every returned maximum.
pub const MAX_SLACK: f64 = 1e-9;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[inline]
pub(crate) fn nudge_up(v: f64, rel: f64) -> f64 {
    v + v.abs() * rel
}

/// Locate the maximum of `f` on `[a, b]`.
///
/// Returns `(argmax, max)` with the maximum nudged upward by [`MAX_SLACK`].
pub fn golden_max<F>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    assert!(a < b, "golden_max needs a < b");
    let width = (b - a) / SCAN_CELLS as f64;
    let point = |i: usize| if i == SCAN_CELLS { b } else { a + width * i as f64 };

    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=SCAN_CELLS {
        let v = f(point(i));
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let mut best_x = point(best_i);

    let mut lo = point(best_i.saturating_sub(1));
    let mut hi = point((best_i + 1).min(SCAN_CELLS));
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
        if x2 <= x1 {
            break;
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v > best {
            best = v;
            best_x = x;
        }
    }
    (best_x, nudge_up(best, MAX_SLACK))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola() {
        let (x, v) = golden_max(|s| -(s - 3.0) * (s - 3.0), 2.0, 4.0, 1e-10);
        assert!((x - 3.0).abs() < 1e-9);
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn off_grid_peak() {
        let peak = 2.718_281_828_459_045;
        let (x, v) = golden_max(|s| 1.0 - (s - peak).powi(2), 0.0, 10.0, 1e-10);
        assert!((x - peak).abs() < 1e-5);
        assert!(v >= 1.0 && v < 1.0 + 2e-9);
    }

    #[test]
    fn increasing_function_hits_endpoint() {
        let (x, v) = golden_max(|s: f64| s.exp() / s, 2.0, 3.0, 1e-12);
        assert_eq!(x, 3.0);
        let exact = 3f64.exp() / 3.0;
        assert!(v >= exact && v <= exact * (1.0 + 2e-9));
    }

    #[test]
    fn log_weighted_against_dense_scan() {
        let f = |s: f64| (3.0 / (s - 1.0)).ln() * s.exp() / s;
        let (_, v) = golden_max(f, 2.0, 3.0, 1e-12);
        let dense = (0..=1_000_000)
            .map(|i| f(2.0 + i as f64 * 1e-6))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(v >= dense);
        assert!((v - dense).abs() < 1e-8, "{v} vs {dense}");
    }
}
