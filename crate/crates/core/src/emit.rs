//! Table drivers behind the command-line front end.

use crate::analytic::{constants, GAMMA_CEILING};
use crate::config::RunConfig;
use crate::error::{Result, SieveError};
use crate::majorant::{build_cn_table, round_up, CnTable, MajorantChain, Parity};
use crate::oracle::{default_tol, OracleCache};
use crate::sieve::{
    auto_bounds, convergence_threshold, eps_scan, jr_correction, jr_sup_constant, tau_sequence, BoundSide, Eps,
    ScanRow, SieveBounds, TauSequence,
};
use crate::table::{Cell, Provenance, TableArtifact, TableKind};
use crate::taylor::build_family;

/// Integer bounds for `F_1` and `f_1` at `eps = 1/200` quoted alongside the computed ones.
pub const REFERENCE_BIG_F1: i64 = 164;
pub const REFERENCE_SMALL_F1: i64 = 162;

fn artifact(kind: TableKind, columns: Vec<&'static str>, rows: Vec<Vec<Cell>>, config: &RunConfig) -> Result<TableArtifact> {
    let t = TableArtifact {
        kind,
        columns,
        rows,
        provenance: Provenance::new(config),
    };
    t.validate()?;
    Ok(t)
}

pub fn cn_table(config: &RunConfig) -> Result<CnTable> {
    config.validate()?;
    build_cn_table(config.n_max, config.m, config.inflation)
}

/// Round a `tau_n` bound up to the granularity of the published table:
/// whole numbers from 1 upward, powers of ten below.
pub fn round_tau(x: f64) -> f64 {
    if x >= 1.0 {
        (x - 1e-9).ceil()
    } else if x > 0.0 {
        10f64.powi((x.log10() - 1e-9).ceil() as i32)
    } else {
        0.0
    }
}

pub fn cmd_table_cn(config: &RunConfig) -> Result<TableArtifact> {
    let cn = cn_table(config)?;
    cn_artifact(config, &cn)
}

pub fn cn_artifact(config: &RunConfig, cn: &CnTable) -> Result<TableArtifact> {
    let rows = cn
        .iter()
        .map(|(n, c)| vec![Cell::Int(n as i64), Cell::Real(c), Cell::Rounded(round_up(c, 2))])
        .collect();
    artifact(TableKind::Cn, vec!["n", "c_n", "c_n_rounded_up"], rows, config)
}

pub fn tau_for(config: &RunConfig, cn: &CnTable) -> Result<TauSequence> {
    tau_sequence(config.eps, cn, config.n_max.min(cn.n_max()))
}

pub fn cmd_table_tau(config: &RunConfig) -> Result<TableArtifact> {
    let cn = cn_table(config)?;
    let tau = tau_for(config, &cn)?;
    tau_artifact(config, &tau)
}

pub fn tau_artifact(config: &RunConfig, tau: &TauSequence) -> Result<TableArtifact> {
    let rows = tau
        .values()
        .iter()
        .enumerate()
        .map(|(i, &t)| vec![Cell::Int(i as i64 + 1), Cell::Real(t), Cell::Rounded(round_tau(t))])
        .collect();
    artifact(TableKind::Tau, vec!["n", "tau_n", "tau_n_rounded_up"], rows, config)
}

/// Parse a list like `63..249`, `80,99,143` or `62..65,80` into `1/q` values.
pub fn parse_eps_list(spec: &str) -> Result<Vec<i64>> {
    let bad = || SieveError::InvalidParameter(format!("bad eps list {spec:?}"));
    let mut qs = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            qs.extend(a..=b);
        } else {
            qs.push(part.parse().map_err(|_| bad())?);
        }
    }
    if qs.is_empty() || qs.iter().any(|&q| q < 2) {
        return Err(bad());
    }
    qs.sort_unstable();
    qs.dedup();
    Ok(qs)
}

pub fn cmd_eps_scan(config: &RunConfig, qs: &[i64]) -> Result<TableArtifact> {
    let cn = cn_table(config)?;
    eps_scan_artifact(config, &cn, qs)
}

pub fn eps_scan_artifact(config: &RunConfig, cn: &CnTable, qs: &[i64]) -> Result<TableArtifact> {
    let mut sorted = qs.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let list = sorted
        .iter()
        .map(|&q| Eps::reciprocal_of(q))
        .collect::<Result<Vec<_>>>()?;
    let rows = eps_scan(&list, cn)?
        .into_iter()
        .zip(&sorted)
        .map(|(row, &q)| match row {
            ScanRow::Converged { bounds, .. } => vec![
                Cell::Int(q),
                Cell::Real(bounds.small_f1),
                Cell::Real(bounds.big_f1),
                Cell::Rounded(round_up(bounds.small_f1, 0)),
                Cell::Rounded(round_up(bounds.big_f1, 0)),
                Cell::Flag(true),
            ],
            ScanRow::Divergent { .. } => vec![
                Cell::Int(q),
                Cell::Text("divergent".into()),
                Cell::Text("divergent".into()),
                Cell::Text("".into()),
                Cell::Text("".into()),
                Cell::Flag(false),
            ],
        })
        .collect();
    artifact(
        TableKind::EpsScan,
        vec!["inv_eps", "f1", "F1", "f1_rounded_up", "F1_rounded_up", "converged"],
        rows,
        config,
    )
}

/// Computed `F_1`, `f_1` bounds at the configured `eps`.
pub fn sieve_bounds(config: &RunConfig, cn: &CnTable) -> Result<SieveBounds> {
    auto_bounds(&tau_for(config, cn)?)
}

pub fn cmd_constants(config: &RunConfig) -> Result<TableArtifact> {
    let cn = cn_table(config)?;
    constants_artifact(config, &cn)
}

pub fn constants_artifact(config: &RunConfig, cn: &CnTable) -> Result<TableArtifact> {
    let k = constants()?;
    let threshold = convergence_threshold()?;
    let q = threshold.inverse_integer().expect("threshold is 1/q");
    let bounds = sieve_bounds(config, cn)?;
    let eps = config.eps;
    let ratio = |r: num_rational::Rational64| *r.numer() as f64 / *r.denom() as f64;
    let jr_up_ref = jr_sup_constant(eps, REFERENCE_BIG_F1);
    let jr_low_ref = jr_sup_constant(eps, REFERENCE_SMALL_F1);
    let big = round_up(bounds.big_f1, 0) as i64;
    let small = round_up(bounds.small_f1, 0) as i64;
    let jr_up = jr_sup_constant(eps, big);
    let jr_low = jr_sup_constant(eps, small);

    let row = |name: &str, value: Cell, display: String, note: &str| {
        vec![Cell::Text(name.into()), value, Cell::Text(display), Cell::Text(note.into())]
    };
    let rows = vec![
        row("alpha", Cell::Real(k.alpha), format!("{:.5}", k.alpha), "e^2 H(2) / 2"),
        row("gamma", Cell::Real(k.gamma), format!("{:.5}", k.gamma), "e^2 H(3)"),
        row("gamma_ceiling", Cell::Real(GAMMA_CEILING), GAMMA_CEILING.to_string(), "ceiling used for c_n and tau"),
        row("H2", Cell::Real(k.h2), format!("{:.7}", k.h2), "H(2)"),
        row("H3", Cell::Real(k.h3), format!("{:.7}", k.h3), "H(3)"),
        row("threshold_inv_eps", Cell::Int(q), q.to_string(), "smallest q with convergent tau for eps = 1/q"),
        row("F1_bound", Cell::Real(bounds.big_f1), big.to_string(), "computed at configured eps"),
        row("f1_bound", Cell::Real(bounds.small_f1), small.to_string(), "computed at configured eps"),
        row("jr_upper", Cell::Real(ratio(jr_up_ref)), jr_up_ref.to_string(), "eps * 164"),
        row("jr_lower", Cell::Real(ratio(jr_low_ref)), jr_low_ref.to_string(), "eps * 162"),
        row("jr_upper_computed", Cell::Real(ratio(jr_up)), jr_up.to_string(), "eps * ceil(F1_bound)"),
        row("jr_lower_computed", Cell::Real(ratio(jr_low)), jr_low.to_string(), "eps * ceil(f1_bound)"),
    ];
    artifact(TableKind::Constants, vec!["name", "value", "display", "note"], rows, config)
}

/// Correction terms `eps * B * e^2 h(s)` at one `s`, for the computed bounds
/// and for the reference integers.
pub fn cmd_constants_jr(config: &RunConfig, s: f64) -> Result<TableArtifact> {
    let cn = cn_table(config)?;
    jr_artifact(config, &cn, s)
}

pub fn jr_artifact(config: &RunConfig, cn: &CnTable, s: f64) -> Result<TableArtifact> {
    let bounds = sieve_bounds(config, cn)?;
    let reference = SieveBounds {
        big_f1: REFERENCE_BIG_F1 as f64,
        small_f1: REFERENCE_SMALL_F1 as f64,
        ..bounds
    };
    let eps = config.eps;
    let mut rows = Vec::new();
    for (name, b, side) in [
        ("jr_upper", &reference, BoundSide::Upper),
        ("jr_lower", &reference, BoundSide::Lower),
        ("jr_upper_computed", &bounds, BoundSide::Upper),
        ("jr_lower_computed", &bounds, BoundSide::Lower),
    ] {
        let v = jr_correction(eps, s, side, b)?;
        rows.push(vec![
            Cell::Text(name.into()),
            Cell::Real(v),
            Cell::Text(format!("{:.2}", round_up(v, 2))),
            Cell::Text(format!("eps = {eps}, s = {s}")),
        ]);
    }
    artifact(TableKind::Constants, vec!["name", "value", "display", "note"], rows, config)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMethod {
    Taylor,
    Oracle,
    Majorant,
}

impl std::str::FromStr for EvalMethod {
    type Err = SieveError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "taylor" => Ok(EvalMethod::Taylor),
            "oracle" => Ok(EvalMethod::Oracle),
            "majorant" => Ok(EvalMethod::Majorant),
            other => Err(SieveError::InvalidParameter(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub n: usize,
    pub s: f64,
    pub method: EvalMethod,
    pub value: f64,
    pub detail: String,
}

impl std::fmt::Display for EvalReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "s = {}", self.s)?;
        writeln!(f, "method = {:?}", self.method)?;
        writeln!(f, "value = {}", crate::table::full_precision(self.value))?;
        writeln!(f, "detail = {}", self.detail)
    }
}

/// `f_n(s)` by the requested method; the majorant method gives a certified upper bound.
pub fn cmd_eval(config: &RunConfig, n: usize, s: f64, method: EvalMethod) -> Result<EvalReport> {
    config.validate()?;
    if n == 0 {
        return Err(SieveError::InvalidParameter("n must be >= 1".into()));
    }
    let (value, detail) = match method {
        EvalMethod::Taylor => {
            let fam = build_family(n, config.taylor_order)?;
            (fam.eval_fn(n, s)?, format!("series degree {}", config.taylor_order))
        }
        EvalMethod::Oracle => {
            let tol = config.oracle_tol.unwrap_or_else(|| default_tol(n));
            let cache = OracleCache::new(tol)?;
            (cache.eval(n, s)?, format!("quadrature tol {tol:e}"))
        }
        EvalMethod::Majorant => {
            let v = match n {
                1 => crate::analytic::eval_f1(s)?,
                2 => crate::analytic::eval_f2(s)?,
                _ => {
                    let mut chain = MajorantChain::new(config.m, config.inflation)?;
                    chain.advance_to(n)?.upper_bound_at(s)?
                }
            };
            let parity = match Parity::of(n) {
                Parity::Odd => "odd",
                Parity::Even => "even",
            };
            (v, format!("grid m = {}, {parity} level, bound at grid point <= s", config.m))
        }
    };
    Ok(EvalReport {
        n,
        s,
        method,
        value,
        detail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        RunConfig {
            n_max: 20,
            ..RunConfig::default()
        }
    }

    #[test]
    fn tau_rounding() {
        assert_eq!(round_tau(3.0), 3.0);
        assert_eq!(round_tau(10.73), 11.0);
        assert_eq!(round_tau(0.889), 1.0);
        assert_eq!(round_tau(0.0841), 0.1);
        assert_eq!(round_tau(4.08e-10), 1e-9);
        assert_eq!(round_tau(0.01), 0.01);
    }

    #[test]
    fn eps_lists() {
        assert_eq!(parse_eps_list("63..66").unwrap(), vec![63, 64, 65, 66]);
        assert_eq!(parse_eps_list("99, 80,80,143").unwrap(), vec![80, 99, 143]);
        assert!(parse_eps_list("9..3").is_err());
        assert!(parse_eps_list("x").is_err());
        assert!(parse_eps_list("1").is_err());
        assert!(parse_eps_list("").is_err());
    }

    #[test]
    fn cn_rows() {
        let t = cmd_table_cn(&small()).unwrap();
        assert_eq!(t.rows.len(), 19);
        assert_eq!(t.row(2).unwrap()[2], Cell::Rounded(0.33));
        assert_eq!(t.row(7).unwrap()[2], Cell::Rounded(0.57));
    }

    #[test]
    fn eval_methods_agree_at_level_one() {
        let cfg = small();
        for method in [EvalMethod::Taylor, EvalMethod::Oracle, EvalMethod::Majorant] {
            let r = cmd_eval(&cfg, 1, 2.0, method).unwrap();
            assert!((r.value - 0.5).abs() < 1e-12, "{method:?}");
        }
        let t = cmd_eval(&cfg, 2, 3.0, EvalMethod::Taylor).unwrap();
        assert!((t.value - crate::analytic::eval_f2(3.0).unwrap()).abs() < 1e-9);
        let m = cmd_eval(&cfg, 4, 6.01, EvalMethod::Majorant).unwrap();
        assert_eq!(m.value, 0.0);
        assert!(cmd_eval(&cfg, 4, 1.5, EvalMethod::Taylor).is_err());
        assert!(cmd_eval(&cfg, 7, 3.0, EvalMethod::Oracle).is_err());
    }

    #[test]
    fn scan_flags_divergence() {
        let cfg = RunConfig {
            n_max: 60,
            ..RunConfig::default()
        };
        let t = cmd_eps_scan(&cfg, &[57, 62]).unwrap();
        assert_eq!(t.row(57).unwrap()[5], Cell::Flag(false));
        assert_eq!(t.row(62).unwrap()[5], Cell::Flag(true));
    }
}
