//! Closed-form pieces: the comparison function `h`, its shifted tail
//! integral `H`, the first two levels `f_1`, `f_2`, and the exponential
//! integral needed to write `H` without quadrature.

use std::f64::consts::E;

use crate::error::{domain, Result, SieveError};

/// Published ceiling for the majorant constant; used as-is in the tau recursion.
pub const GAMMA_CEILING: f64 = 0.9214;

/// `ln 3`.
pub const LN_3: f64 = 1.098_612_288_668_109_7;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `h(s)`: `e^-2` on `[1,2]`, `e^-s` on `[2,3]`, `3 e^-s / s` for `s >= 3`.
pub fn eval_h(s: f64) -> Result<f64> {
    if !(s >= 1.0) {
        return Err(domain("h", s, "s >= 1"));
    }
    Ok(h_unchecked(s))
}

#[inline]
pub(crate) fn h_unchecked(s: f64) -> f64 {
    if s <= 2.0 {
        (-2.0f64).exp()
    } else if s <= 3.0 {
        (-s).exp()
    } else {
        3.0 * (-s).exp() / s
    }
}

/// `ln h(s)`, usable where `h` itself underflows.
#[inline]
pub(crate) fn ln_h(s: f64) -> f64 {
    if s <= 2.0 {
        -2.0
    } else if s <= 3.0 {
        -s
    } else {
        LN_3 - s - s.ln()
    }
}

/// Exponential integral `E1(x) = ∫_x^∞ e^-u / u du` for `x > 0`.
///
/// Power series below 1, modified Lentz continued fraction above.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("E1", x, "0 < x < inf"));
    }
    if x < 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            let kf = k as f64;
            term *= -x / kf;
            let contrib = -term / kf;
            sum += contrib;
            if contrib.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        Ok(-EULER_GAMMA - x.ln() + sum)
    } else {
        const TINY: f64 = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut acc = d;
        for i in 1..1000 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let delta = c * d;
            acc *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                return Ok(acc * (-x).exp());
            }
        }
        Err(SieveError::Internal(format!(
            "E1 continued fraction did not converge at x = {x}"
        )))
    }
}

/// `H(s) = ∫_s^∞ h(t-1) dt` for `s >= 2`, in closed form.
pub fn eval_big_h(s: f64) -> Result<f64> {
    if !(s >= 2.0) {
        return Err(domain("H", s, "s >= 2"));
    }
    if s >= 4.0 {
        Ok(3.0 * exp_integral_e1(s - 1.0)?)
    } else if s >= 3.0 {
        Ok((1.0 - s).exp() - (-3.0f64).exp() + 3.0 * exp_integral_e1(3.0)?)
    } else {
        Ok((3.0 - s) * (-2.0f64).exp() + eval_big_h(3.0)?)
    }
}

/// The constants built from `H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticConstants {
    /// `e^2 H(2) / 2`.
    pub alpha: f64,
    /// `e^2 H(3)`, the sharp majorant constant.
    pub gamma: f64,
    /// `H(3)`.
    pub h3: f64,
    /// `H(2)`.
    pub h2: f64,
}

pub fn constants() -> Result<AnalyticConstants> {
    let e2 = E * E;
    let h2 = eval_big_h(2.0)?;
    let h3 = eval_big_h(3.0)?;
    let alpha = e2 * h2 / 2.0;
    let gamma = e2 * h3;
    if gamma > GAMMA_CEILING {
        return Err(SieveError::Internal(format!(
            "computed gamma {gamma} exceeds the ceiling {GAMMA_CEILING}"
        )));
    }
    Ok(AnalyticConstants {
        alpha,
        gamma,
        h3,
        h2,
    })
}

/// `f_1(s) = 3/s - 1` on `[1,3]`, zero beyond.
pub fn eval_f1(s: f64) -> Result<f64> {
    if !(s >= 1.0) {
        return Err(domain("f_1", s, "s >= 1"));
    }
    Ok(f1_unchecked(s))
}

#[inline]
pub(crate) fn f1_unchecked(s: f64) -> f64 {
    if s >= 3.0 {
        0.0
    } else {
        3.0 / s - 1.0
    }
}

/// `f_2(s) = (s - 3 ln(s-1) + 3 ln 3 - 4) / s` on `[2,4]`, zero beyond.
pub fn eval_f2(s: f64) -> Result<f64> {
    if !(s >= 2.0) {
        return Err(domain("f_2", s, "s >= 2"));
    }
    Ok(f2_unchecked(s))
}

#[inline]
pub(crate) fn f2_unchecked(s: f64) -> f64 {
    if s >= 4.0 {
        0.0
    } else {
        // Clamp the cancellation residue near s = 4.
        ((s - 3.0 * (s - 1.0).ln() + 3.0 * LN_3 - 4.0) / s).max(0.0)
    }
}
