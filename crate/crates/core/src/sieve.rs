//! Constants of the explicit linear sieve: the `tau_n` recursion, the odd and
//! even sums `F_1`, `f_1` with geometric tails, and the Jurkat-Richert
//! correction terms.

use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

use crate::analytic::{h_unchecked, GAMMA_CEILING};
use crate::error::{domain, Result, SieveError};
use crate::majorant::CnTable;

/// Ratio slack tolerated when checking that `tau_{n+1}/tau_n` is nonincreasing.
const RATIO_SLACK: f64 = 1e-12;

/// Sieve parameter `eps = K - 1`, kept as an exact rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Eps(Rational64);

impl Eps {
    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(SieveError::InvalidParameter("eps denominator is zero".into()));
        }
        Self::from_ratio(Rational64::new(numer, denom))
    }

    pub fn from_ratio(r: Rational64) -> Result<Self> {
        if r <= Rational64::zero() || r >= Rational64::from_integer(1) {
            return Err(SieveError::InvalidParameter(format!(
                "eps must satisfy 0 < eps < 1, got {r}"
            )));
        }
        Ok(Self(r))
    }

    /// `1/q`.
    pub fn reciprocal_of(q: i64) -> Result<Self> {
        Self::new(1, q)
    }

    pub fn ratio(self) -> Rational64 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0.to_f64().expect("finite rational")
    }

    /// `1/eps` when it is an integer.
    pub fn inverse_integer(self) -> Option<i64> {
        let inv = self.0.recip();
        inv.is_integer().then(|| inv.to_integer())
    }
}

impl fmt::Display for Eps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Eps {
    type Err = SieveError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| SieveError::InvalidParameter(format!("cannot parse eps '{s}'")))
        };
        match s.split_once('/') {
            Some((p, q)) => Self::new(parse(p)?, parse(q)?),
            None => Self::new(parse(s)?, 1),
        }
    }
}

/// `gamma + (4e/3 + gamma) eps`, the limiting growth ratio of `tau_n`.
pub fn ratio_limit(gamma: f64, eps: Eps) -> f64 {
    gamma + (4.0 * E / 3.0 + gamma) * eps.to_f64()
}

/// The sequence `tau_1, ..., tau_N` for one value of `eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauSequence {
    eps: Eps,
    values: Vec<f64>,
    gamma_used: f64,
    ratio_limit: f64,
    inflation: f64,
}

impl TauSequence {
    pub fn eps(&self) -> Eps {
        self.eps
    }

    /// `tau_n` for `1 <= n <= N`.
    pub fn get(&self, n: usize) -> Option<f64> {
        n.checked_sub(1).and_then(|i| self.values.get(i)).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values indexed from `n = 1`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn gamma_used(&self) -> f64 {
        self.gamma_used
    }

    pub fn ratio_limit(&self) -> f64 {
        self.ratio_limit
    }

    pub fn inflation(&self) -> f64 {
        self.inflation
    }

    /// `tau_{n+1} / tau_n`.
    pub fn ratio(&self, n: usize) -> Option<f64> {
        Some(self.get(n + 1)? / self.get(n)?)
    }
}

/// Run the recursion with the published `gamma = 0.9214`.
pub fn tau_sequence(eps: Eps, cn: &CnTable, n: usize) -> Result<TauSequence> {
    tau_sequence_with(eps, cn, n, GAMMA_CEILING, cn.inflation())
}

/// `tau_1 = 3`, and for `n >= 2`
/// `tau_n = tau_{n-1} (gamma + (4e/3 + gamma) eps) + (8e/3) c_{n-1}^{n-2} + 2 c_n^{n-1}`,
/// each step inflated by `inflation`.
pub fn tau_sequence_with(
    eps: Eps,
    cn: &CnTable,
    n: usize,
    gamma: f64,
    inflation: f64,
) -> Result<TauSequence> {
    if n == 0 || n > cn.n_max() {
        return Err(SieveError::InvalidParameter(format!(
            "tau length {n} must lie in 1..={}",
            cn.n_max()
        )));
    }
    let limit = ratio_limit(gamma, eps);
    if limit >= 1.0 {
        return Err(SieveError::Divergent {
            eps: eps.to_string(),
            ratio_limit: limit,
        });
    }
    let c = |k: usize| cn.get(k).expect("range checked");
    let mut values = Vec::with_capacity(n);
    values.push(3.0);
    for k in 2..=n {
        let prev = values[k - 2];
        let forcing =
            8.0 * E / 3.0 * c(k - 1).powi(k as i32 - 2) + 2.0 * c(k).powi(k as i32 - 1);
        values.push((prev * limit + forcing) * inflation);
    }
    Ok(TauSequence {
        eps,
        values,
        gamma_used: gamma,
        ratio_limit: limit,
        inflation,
    })
}

/// Upper bounds for `F_1 = Σ_{n odd} tau_n` and `f_1 = Σ_{n even} tau_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SieveBounds {
    pub big_f1: f64,
    pub small_f1: f64,
    pub k1: usize,
    pub k2: usize,
    pub tail_ratio_odd: f64,
    pub tail_ratio_even: f64,
    /// Share of each bound contributed by its geometric tail.
    pub tail_share_odd: f64,
    pub tail_share_even: f64,
}

struct Partial {
    total: f64,
    ratio: f64,
    tail_share: f64,
}

fn partial_with_tail(tau: &TauSequence, k: usize, parity: usize) -> Result<Partial> {
    let n = tau.len();
    if k % 2 != parity || k == 0 {
        return Err(SieveError::InvalidParameter(format!(
            "cutoff {k} has the wrong parity"
        )));
    }
    if k + 2 > n {
        return Err(SieveError::InvalidParameter(format!(
            "cutoff {k} needs tau up to {}, have {n}",
            k + 2
        )));
    }
    let r = tau.ratio(k + 1).expect("in range");
    if !(r < 1.0) {
        return Err(SieveError::TailInvalid(format!(
            "tau_{}/tau_{} = {r} >= 1",
            k + 2,
            k + 1
        )));
    }
    // The tail bound needs every later ratio to stay below r.
    for j in k + 1..n - 1 {
        let (a, b) = (tau.ratio(j).expect("range"), tau.ratio(j + 1).expect("range"));
        if b > a * (1.0 + RATIO_SLACK) {
            return Err(SieveError::TailInvalid(format!(
                "ratio tau_{{n+1}}/tau_n increases at n = {j}: {a} -> {b}"
            )));
        }
    }
    let r = (k + 1..n).filter_map(|j| tau.ratio(j)).fold(r, f64::max);
    let head: f64 = (1..=k)
        .filter(|i| i % 2 == parity)
        .map(|i| tau.get(i).expect("range"))
        .sum();
    // τ_{k+1} (r + r^3 + r^5 + ...)
    let tail = tau.get(k + 1).expect("range") * r / (1.0 - r * r);
    let total = (head + tail) * tau.inflation();
    Ok(Partial {
        total,
        ratio: r,
        tail_share: tail / (head + tail),
    })
}

/// Bound `F_1` with odd cutoff `k1` and `f_1` with even cutoff `k2`.
pub fn f1_big_f1_bounds(tau: &TauSequence, k1: usize, k2: usize) -> Result<SieveBounds> {
    let odd = partial_with_tail(tau, k1, 1)?;
    let even = partial_with_tail(tau, k2, 0)?;
    Ok(SieveBounds {
        big_f1: odd.total,
        small_f1: even.total,
        k1,
        k2,
        tail_ratio_odd: odd.ratio,
        tail_ratio_even: even.ratio,
        tail_share_odd: odd.tail_share,
        tail_share_even: even.tail_share,
    })
}

/// Largest cutoff of the given parity whose tail is valid.
fn auto_cutoff(tau: &TauSequence, parity: usize) -> Result<usize> {
    let n = tau.len();
    if n < 4 {
        return Err(SieveError::InvalidParameter(format!(
            "tau sequence too short for tail bounds: {n}"
        )));
    }
    let mut k = n - 2;
    if k % 2 != parity {
        k -= 1;
    }
    let mut last_err = None;
    while k >= 1 {
        match partial_with_tail(tau, k, parity) {
            Ok(_) => return Ok(k),
            Err(e) => last_err = Some(e),
        }
        if k < 2 {
            break;
        }
        k -= 2;
    }
    Err(last_err.unwrap_or_else(|| SieveError::TailInvalid("no valid cutoff".into())))
}

/// Bounds with cutoffs picked automatically: the largest valid ones.
pub fn auto_bounds(tau: &TauSequence) -> Result<SieveBounds> {
    let k1 = auto_cutoff(tau, 1)?;
    let k2 = auto_cutoff(tau, 0)?;
    f1_big_f1_bounds(tau, k1, k2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSide {
    Upper,
    Lower,
}

/// `eps * F_1 * e^2 * h(s)` (upper) or `eps * f_1 * e^2 * h(s)` (lower).
pub fn jr_correction(eps: Eps, s: f64, side: BoundSide, bounds: &SieveBounds) -> Result<f64> {
    if !(s >= 1.0) {
        return Err(domain("JR correction", s, "s >= 1"));
    }
    let sum = match side {
        BoundSide::Upper => bounds.big_f1,
        BoundSide::Lower => bounds.small_f1,
    };
    Ok(eps.to_f64() * sum * E * E * h_unchecked(s))
}

/// `sup_s eps * B * e^2 h(s) = eps * B` exactly, for an integer bound `B`.
pub fn jr_sup_constant(eps: Eps, integer_bound: i64) -> Rational64 {
    eps.ratio() * Rational64::from_integer(integer_bound)
}

/// One row of the eps scan.
#[derive(Debug, Clone, PartialEq)]
pub enum ScanRow {
    Converged { eps: Eps, bounds: SieveBounds },
    Divergent { eps: Eps, ratio_limit: f64 },
}

impl ScanRow {
    pub fn eps(&self) -> Eps {
        match self {
            ScanRow::Converged { eps, .. } | ScanRow::Divergent { eps, .. } => *eps,
        }
    }
}

/// Run the tau recursion and tail bounds for each `eps`.
///
/// Divergent rows are reported as such; a convergent row whose tail cannot
/// be validated is an error.
pub fn eps_scan(eps_list: &[Eps], cn: &CnTable) -> Result<Vec<ScanRow>> {
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        match tau_sequence(eps, cn, cn.n_max()) {
            Ok(tau) => {
                let bounds = auto_bounds(&tau)?;
                rows.push(ScanRow::Converged { eps, bounds });
            }
            Err(SieveError::Divergent { ratio_limit, .. }) => {
                rows.push(ScanRow::Divergent { eps, ratio_limit })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}

/// Smallest integer `q` with `gamma + (4e/3 + gamma)/q < 1`, i.e. the
/// largest `eps = 1/q` for which the recursion converges.
pub fn convergence_threshold() -> Result<Eps> {
    convergence_threshold_for(GAMMA_CEILING)
}

pub fn convergence_threshold_for(gamma: f64) -> Result<Eps> {
    if !(gamma < 1.0) {
        return Err(SieveError::InvalidParameter(format!(
            "gamma {gamma} >= 1 admits no threshold"
        )));
    }
    let a = 4.0 * E / 3.0 + gamma;
    let mut q = (a / (1.0 - gamma)).floor().max(1.0) as i64;
    while gamma + a / q as f64 >= 1.0 {
        q += 1;
    }
    while q > 1 && gamma + a / ((q - 1) as f64) < 1.0 {
        q -= 1;
    }
    Eps::reciprocal_of(q)
}
