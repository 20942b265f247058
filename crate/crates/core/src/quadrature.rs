//! Globally adaptive Gauss-Kronrod (7, 15) integration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Result, SieveError};

/// Upper limit on the number of live panels before giving up.
pub const MAX_PANELS: usize = 1_000_000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub panels: usize,
}

/// One Kronrod panel: returns `(K15, |K15 - G7|)`.
fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = f(center - dx)? + f(center + dx)?;
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).abs()))
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    seq: u64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // Largest error first; ties go to the older panel.
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Integrate a fallible integrand over `[a, b]` to absolute tolerance `tol`.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops below `tol`. Panel order is fully deterministic.
pub fn try_integrate<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Integral>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a <= b) || !a.is_finite() || !b.is_finite() {
        return Err(SieveError::InvalidParameter(format!(
            "integration bounds must satisfy a <= b, got [{a}, {b}]"
        )));
    }
    if !(tol > 0.0) {
        return Err(SieveError::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
            panels: 0,
        });
    }

    let (value, error) = gk15(&mut f, a, b)?;
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    heap.push(Panel {
        a,
        b,
        value,
        error,
        seq,
    });
    let mut total_error = error;
    // Panels too narrow to split further; their error is frozen.
    let mut frozen_error = 0.0;

    while total_error > tol {
        if heap.len() >= MAX_PANELS {
            return Err(SieveError::NonConvergence {
                a,
                b,
                panels: heap.len(),
                estimate: total_error,
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 1e-15 * (b - a) {
            frozen_error += worst.error;
            if frozen_error > tol {
                return Err(SieveError::NonConvergence {
                    a,
                    b,
                    panels: heap.len() + 1,
                    estimate: total_error,
                });
            }
            continue;
        }
        let (lv, le) = gk15(&mut f, worst.a, mid)?;
        let (rv, re) = gk15(&mut f, mid, worst.b)?;
        total_error += le + re - worst.error;
        for (pa, pb, v, e) in [(worst.a, mid, lv, le), (mid, worst.b, rv, re)] {
            seq += 1;
            heap.push(Panel {
                a: pa,
                b: pb,
                value: v,
                error: e,
                seq,
            });
        }
        if heap.is_empty() {
            break;
        }
    }

    // Re-sum in order so the value does not depend on heap history.
    let panels = heap.len();
    let mut parts: Vec<Panel> = heap.into_vec();
    parts.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = parts.iter().map(|p| p.value).sum::<f64>();
    let abs_error = parts.iter().map(|p| p.error).sum::<f64>() + frozen_error;
    Ok(Integral {
        value,
        abs_error,
        panels,
    })
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_integrate<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    try_integrate(|x| Ok(f(x)), a, b, tol).map(|r| r.value)
}
