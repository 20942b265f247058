//! Certified grid majorants for `s f_n(s)` and the constants `c_n`.
//!
//! Each level is an array `U[j] >= s_j f_n(s_j)` on the uniform grid
//! `s_j = start + 2j/m`, built by a backward upper Riemann sum of
//! `s f_n(s) = ∫_s^∞ f_{n-1}(t-1) dt`. The integrand is nonincreasing, so
//! left-endpoint rectangles dominate the integral; a multiplicative
//! inflation per step absorbs floating-point rounding.
//!
//! The constant `c_n` is the smallest value with
//! `f_n(s) <= 2 e^2 c_n^(n-1) h(s)` on the level's domain (`s >= 1` for odd
//! `n`, `s >= 2` for even `n`).

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use crate::analytic::{f2_unchecked, h_unchecked, ln_h, LN_3};
use crate::error::{Result, SieveError};
use crate::search::golden_max;

/// Default slack per recurrence step.
pub const DEFAULT_INFLATION: f64 = 1.0 + 1e-9;
/// Default grid density (points per two units of `s`).
pub const DEFAULT_M: usize = 1000;
/// Every certified constant must stay below this.
pub const C_CEILING: f64 = 0.9214;

const GOLDEN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(n: usize) -> Self {
        if n % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    /// Left end of the grid: 3 for odd levels, 2 for even ones.
    pub fn grid_start(self) -> f64 {
        match self {
            Parity::Odd => 3.0,
            Parity::Even => 2.0,
        }
    }
}

/// Certified upper bounds for `s f_n(s)` on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMajorant {
    n: usize,
    m: usize,
    inflation: f64,
    values: Vec<f64>,
}

impl GridMajorant {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parity(&self) -> Parity {
        Parity::of(self.n)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn inflation(&self) -> f64 {
        self.inflation
    }

    pub fn start(&self) -> f64 {
        self.parity().grid_start()
    }

    pub fn step(&self) -> f64 {
        2.0 / self.m as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Index of the last grid point, which sits at `s = n + 2`.
    pub fn last_index(&self) -> usize {
        self.values.len() - 1
    }

    /// Grid abscissa `start + 2j/m`.
    #[inline]
    pub fn point(&self, j: usize) -> f64 {
        self.start() + 2.0 * j as f64 / self.m as f64
    }

    /// Certified upper bound for `f_n(s)`, read off the nearest grid point at
    /// or below `s`. Odd levels are constant in `s f_n(s)` on `[1, 3]`.
    pub fn upper_bound_at(&self, s: f64) -> Result<f64> {
        let lower_limit = match self.parity() {
            Parity::Odd => 1.0,
            Parity::Even => 2.0,
        };
        if !(s >= lower_limit) || !s.is_finite() {
            return Err(crate::error::domain(
                "majorant evaluation",
                s,
                "s >= 1 (odd n) or s >= 2 (even n)",
            ));
        }
        if s >= (self.n + 2) as f64 {
            return Ok(0.0);
        }
        if s < self.start() {
            return Ok(self.values[0] / s);
        }
        let mut j = ((s - self.start()) * self.m as f64 / 2.0).floor() as usize;
        j = j.min(self.last_index());
        while j > 0 && self.point(j) > s {
            j -= 1;
        }
        Ok(self.values[j] / s)
    }
}

/// Where the level being built takes its integrand from.
#[derive(Debug, Clone, Copy)]
pub enum Predecessor<'a> {
    /// The closed form of `f_2` (only valid when building level 3).
    ClosedFormF2,
    Level(&'a GridMajorant),
}

pub(crate) fn check_grid(m: usize, inflation: f64) -> Result<()> {
    if m % 2 != 0 || m < 100 {
        return Err(SieveError::InvalidParameter(format!(
            "grid density m must be even and >= 100, got {m}"
        )));
    }
    if !(inflation >= 1.0) || !inflation.is_finite() {
        return Err(SieveError::InvalidParameter(format!(
            "inflation must be a finite factor >= 1, got {inflation}"
        )));
    }
    Ok(())
}

/// Build the level-`n` majorant from its predecessor.
pub fn build_majorant(
    n: usize,
    predecessor: Predecessor<'_>,
    m: usize,
    inflation: f64,
) -> Result<GridMajorant> {
    check_grid(m, inflation)?;
    if n < 3 {
        return Err(SieveError::InvalidParameter(format!(
            "grid majorants start at n = 3, got {n}"
        )));
    }
    let delta = 2.0 / m as f64;
    let mf = m as f64;
    let values = match (Parity::of(n), predecessor) {
        (Parity::Odd, pred) => {
            let last = (n - 1) * m / 2;
            let mut u = vec![0.0; last + 2];
            let integrand: Box<dyn Fn(usize) -> f64> = match pred {
                Predecessor::ClosedFormF2 if n == 3 => {
                    Box::new(move |j| f2_unchecked(2.0 + 2.0 * j as f64 / mf))
                }
                Predecessor::ClosedFormF2 => {
                    return Err(SieveError::Mismatch(format!(
                        "closed-form f_2 predecessor only feeds level 3, not {n}"
                    )))
                }
                Predecessor::Level(p) => {
                    check_predecessor(n, p, m)?;
                    if p.values.len() < last + 1 {
                        return Err(SieveError::Mismatch(format!(
                            "level {} grid too short for level {n}",
                            p.n
                        )));
                    }
                    let pv = &p.values;
                    Box::new(move |j| pv[j] / (2.0 + 2.0 * j as f64 / mf))
                }
            };
            for j in (0..=last).rev() {
                u[j] = (integrand(j) * delta + u[j + 1]) * inflation;
            }
            u.truncate(last + 1);
            u
        }
        (Parity::Even, Predecessor::ClosedFormF2) => {
            return Err(SieveError::Mismatch(format!(
                "even level {n} needs a grid predecessor"
            )))
        }
        (Parity::Even, Predecessor::Level(p)) => {
            check_predecessor(n, p, m)?;
            let last = n * m / 2;
            if p.values.len() < last - m + 1 {
                return Err(SieveError::Mismatch(format!(
                    "level {} grid too short for level {n}",
                    p.n
                )));
            }
            let mut u = vec![0.0; last + 2];
            for k in (m..=last).rev() {
                let i = k - m;
                let x = 3.0 + 2.0 * i as f64 / mf;
                u[k] = (p.values[i] / x * delta + u[k + 1]) * inflation;
            }
            // On [2, 4) the integrand is 3 f_{n-1}(3) / (t - 1), integrated exactly.
            let head = p.values[0];
            let tail = u[m];
            for k in (0..m).rev() {
                let t = 2.0 + 2.0 * k as f64 / mf;
                u[k] = (head * (LN_3 - (t - 1.0).ln()) + tail) * inflation;
            }
            u.truncate(last + 1);
            u
        }
    };
    Ok(GridMajorant {
        n,
        m,
        inflation,
        values,
    })
}

fn check_predecessor(n: usize, p: &GridMajorant, m: usize) -> Result<()> {
    if p.n + 1 != n {
        return Err(SieveError::Mismatch(format!(
            "predecessor is level {}, expected {}",
            p.n,
            n - 1
        )));
    }
    if p.m != m {
        return Err(SieveError::Mismatch(format!(
            "predecessor grid density {} differs from {m}",
            p.m
        )));
    }
    Ok(())
}

/// `ln` of the cell bound `f_n(s_j) / (2 e^2 h(s_{j+1}))` for a grid cell.
#[inline]
fn ln_cell_ratio(u: f64, s_lo: f64, s_hi: f64) -> f64 {
    u.ln() - s_lo.ln() - LN_2 - 2.0 - ln_h(s_hi)
}

fn ln_grid_max(maj: &GridMajorant, from: usize) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for j in from..maj.last_index() {
        let u = maj.values[j];
        if u > 0.0 {
            best = best.max(ln_cell_ratio(u, maj.point(j), maj.point(j + 1)));
        }
    }
    best
}

fn root_of(ln_b: f64, n: usize, inflation: f64) -> f64 {
    // One slack factor on B before the root.
    ((ln_b + inflation.ln()) / (n - 1) as f64).exp()
}

/// `c_n` for odd `n` from its majorant.
pub fn c_bound_odd(n: usize, maj: &GridMajorant) -> Result<f64> {
    if n % 2 == 0 || n < 3 || maj.n != n {
        return Err(SieveError::Mismatch(format!(
            "c_bound_odd called with n = {n} on a level-{} majorant",
            maj.n
        )));
    }
    // On [1, 3], s f_n(s) = 3 f_n(3) <= U[0] and the ratio peaks at s = 1.
    let small = (maj.values[0] / 2.0).ln();
    let ln_b = small.max(ln_grid_max(maj, 0));
    Ok(root_of(ln_b, n, maj.inflation))
}

/// `c_n` for even `n` from its majorant and the odd level below it.
pub fn c_bound_even(n: usize, maj: &GridMajorant, pred: &GridMajorant) -> Result<f64> {
    if n % 2 == 1 || n < 4 || maj.n != n || pred.n + 1 != n || pred.m != maj.m {
        return Err(SieveError::Mismatch(format!(
            "c_bound_even called with n = {n} on levels {} and {}",
            maj.n, pred.n
        )));
    }
    let m = maj.m;
    let head = pred.values[0];
    let tail = maj.values[m];
    let upper = |s: f64| (head * (3.0 / (s - 1.0)).ln() + tail) / s;
    let e2 = 2.0f64.exp();
    // h = e^-s on [2,3], 3 e^-s / s on [3,4].
    let (_, low) = golden_max(|s| upper(s) * s.exp() / (2.0 * e2), 2.0, 3.0, GOLDEN_TOL);
    let (_, mid) = golden_max(
        |s| upper(s) * s * s.exp() / (6.0 * e2),
        3.0,
        4.0,
        GOLDEN_TOL,
    );
    let ln_b = ln_grid_max(maj, m).max(low.ln()).max(mid.ln());
    Ok(root_of(ln_b, n, maj.inflation))
}

/// `c_2 = sup_{[2,4]} f_2(s) / (2 e^2 h(s))` from the closed form of `f_2`.
pub fn c2_bound() -> f64 {
    let e2 = 2.0f64.exp();
    let ratio = |s: f64| f2_unchecked(s) / (2.0 * e2 * h_unchecked(s));
    let (_, a) = golden_max(ratio, 2.0, 3.0, GOLDEN_TOL);
    let (_, b) = golden_max(ratio, 3.0, 4.0, GOLDEN_TOL);
    a.max(b)
}

/// Walks the levels 3, 4, 5, ... keeping only the two most recent alive.
#[derive(Debug, Clone)]
pub struct MajorantChain {
    m: usize,
    inflation: f64,
    previous: Option<GridMajorant>,
    current: Option<GridMajorant>,
}

impl MajorantChain {
    pub fn new(m: usize, inflation: f64) -> Result<Self> {
        check_grid(m, inflation)?;
        Ok(Self {
            m,
            inflation,
            previous: None,
            current: None,
        })
    }

    /// Build the next level and return it.
    pub fn advance(&mut self) -> Result<&GridMajorant> {
        let next = match &self.current {
            None => build_majorant(3, Predecessor::ClosedFormF2, self.m, self.inflation)?,
            Some(cur) => build_majorant(
                cur.n + 1,
                Predecessor::Level(cur),
                self.m,
                self.inflation,
            )?,
        };
        self.previous = self.current.replace(next);
        Ok(self.current.as_ref().expect("just set"))
    }

    /// Advance until the current level is `n`.
    pub fn advance_to(&mut self, n: usize) -> Result<&GridMajorant> {
        if n < 3 {
            return Err(SieveError::InvalidParameter(format!(
                "grid majorants start at n = 3, got {n}"
            )));
        }
        if self.current.as_ref().is_some_and(|c| c.n > n) {
            return Err(SieveError::InvalidParameter(format!(
                "chain already past level {n}"
            )));
        }
        while self.current.as_ref().map_or(true, |c| c.n < n) {
            self.advance()?;
        }
        Ok(self.current.as_ref().expect("advanced"))
    }

    pub fn current(&self) -> Option<&GridMajorant> {
        self.current.as_ref()
    }

    pub fn previous(&self) -> Option<&GridMajorant> {
        self.previous.as_ref()
    }

    /// `c_n` for the current level.
    pub fn current_c_bound(&self) -> Result<f64> {
        let cur = self
            .current
            .as_ref()
            .ok_or_else(|| SieveError::Internal("chain not started".into()))?;
        match cur.parity() {
            Parity::Odd => c_bound_odd(cur.n, cur),
            Parity::Even => {
                let prev = self
                    .previous
                    .as_ref()
                    .ok_or_else(|| SieveError::Internal("missing odd predecessor".into()))?;
                c_bound_even(cur.n, cur, prev)
            }
        }
    }
}

/// Certified `c_n` for `2 <= n <= n_max`; `c_1 = 1` by convention.
#[derive(Debug, Clone, PartialEq)]
pub struct CnTable {
    entries: BTreeMap<usize, f64>,
    m: usize,
    inflation: f64,
}

impl CnTable {
    /// Assemble a table from externally supplied values (e.g. published decimals).
    pub fn from_entries(entries: BTreeMap<usize, f64>, m: usize, inflation: f64) -> Result<Self> {
        let expected = 2..2 + entries.len();
        if entries.is_empty() || !entries.keys().copied().eq(expected) {
            return Err(SieveError::InvalidParameter(
                "c_n entries must cover 2..=n_max contiguously".into(),
            ));
        }
        Ok(Self {
            entries,
            m,
            inflation,
        })
    }

    pub fn n_max(&self) -> usize {
        *self.entries.keys().next_back().expect("nonempty")
    }

    /// `c_n`, with `c_1 = 1`.
    pub fn get(&self, n: usize) -> Option<f64> {
        if n == 1 {
            Some(1.0)
        } else {
            self.entries.get(&n).copied()
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().map(|(&n, &c)| (n, c))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn inflation(&self) -> f64 {
        self.inflation
    }
}

pub fn build_cn_table(n_max: usize, m: usize, inflation: f64) -> Result<CnTable> {
    if n_max < 2 {
        return Err(SieveError::InvalidParameter(format!(
            "n_max must be >= 2, got {n_max}"
        )));
    }
    let mut chain = MajorantChain::new(m, inflation)?;
    let mut entries = BTreeMap::new();
    entries.insert(2, c2_bound());
    for n in 3..=n_max {
        chain.advance_to(n)?;
        entries.insert(n, chain.current_c_bound()?);
    }
    for (&n, &c) in &entries {
        if !(c > 0.0 && c <= C_CEILING) {
            return Err(SieveError::Internal(format!(
                "certified c_{n} = {c} violates the ceiling {C_CEILING}"
            )));
        }
    }
    Ok(CnTable {
        entries,
        m,
        inflation,
    })
}

/// Round an upper bound up to `decimals` places.
///
/// A value within `1e-9` display units of a boundary counts as on it, so
/// binary noise in a decimal like `0.33` does not bump it to `0.34`.
pub fn round_up(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    (x * scale - 1e-9).ceil() / scale
}
