//! Run configuration: numeric policy shared by every table driver.
//!
//! The on-disk form is flat `key = value` text. Blank lines and lines
//! starting with `#` are ignored.

use std::fmt;
use std::str::FromStr;

use crate::error::{Result, SieveError};
use crate::majorant::{DEFAULT_INFLATION, DEFAULT_M};
use crate::sieve::Eps;
use crate::taylor::DEFAULT_ORDER;

/// Default deepest level for the certified pipeline.
pub const DEFAULT_PIPELINE_N_MAX: usize = 450;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Markdown,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Markdown => "markdown",
        })
    }
}

impl FromStr for OutputFormat {
    type Err = SieveError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            other => Err(SieveError::InvalidParameter(format!(
                "unknown output format {other:?} (expected csv or markdown)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub m: usize,
    pub inflation: f64,
    pub taylor_order: usize,
    pub n_max: usize,
    pub eps: Eps,
    /// Oracle quadrature tolerance; `None` picks the per-level default.
    pub oracle_tol: Option<f64>,
    pub output_format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            m: DEFAULT_M,
            inflation: DEFAULT_INFLATION,
            taylor_order: DEFAULT_ORDER,
            n_max: DEFAULT_PIPELINE_N_MAX,
            eps: Eps::reciprocal_of(200).expect("1/200 is valid"),
            oracle_tol: None,
            output_format: OutputFormat::Csv,
        }
    }
}

const KEYS: [&str; 7] = [
    "m",
    "inflation",
    "taylor_order",
    "n_max",
    "eps",
    "oracle_tol",
    "output_format",
];

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m % 2 != 0 || self.m < 100 {
            return Err(SieveError::InvalidParameter(format!(
                "m must be even and >= 100, got {}",
                self.m
            )));
        }
        if self.n_max < 2 {
            return Err(SieveError::InvalidParameter(format!(
                "n_max must be >= 2, got {}",
                self.n_max
            )));
        }
        if !(self.inflation >= 1.0 && self.inflation.is_finite()) {
            return Err(SieveError::InvalidParameter(format!(
                "inflation must be finite and >= 1, got {}",
                self.inflation
            )));
        }
        if self.taylor_order < 4 {
            return Err(SieveError::InvalidParameter(format!(
                "taylor_order must be >= 4, got {}",
                self.taylor_order
            )));
        }
        if let Some(tol) = self.oracle_tol {
            if !(tol > 0.0 && tol < 1e-3) {
                return Err(SieveError::InvalidParameter(format!(
                    "oracle_tol must lie in (0, 1e-3), got {tol}"
                )));
            }
        }
        Ok(())
    }

    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let bad = |what: &str| {
            SieveError::InvalidParameter(format!("bad value {value:?} for {what}"))
        };
        match key.trim() {
            "m" => self.m = value.parse().map_err(|_| bad("m"))?,
            "inflation" => self.inflation = value.parse().map_err(|_| bad("inflation"))?,
            "taylor_order" => {
                self.taylor_order = value.parse().map_err(|_| bad("taylor_order"))?
            }
            "n_max" => self.n_max = value.parse().map_err(|_| bad("n_max"))?,
            "eps" => self.eps = value.parse()?,
            "oracle_tol" => {
                self.oracle_tol = if value == "auto" {
                    None
                } else {
                    Some(value.parse().map_err(|_| bad("oracle_tol"))?)
                }
            }
            "output_format" => self.output_format = value.parse()?,
            other => {
                return Err(SieveError::InvalidParameter(format!(
                    "unknown config key {other:?} (known: {})",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Overlay settings from config text onto `self`.
    pub fn merge_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                SieveError::InvalidParameter(format!(
                    "config line {}: expected key = value, got {line:?}",
                    lineno + 1
                ))
            })?;
            self.set(key, value)?;
        }
        Ok(())
    }

    /// Parse config text on top of the defaults, then validate.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.merge_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Flat `key = value` form, one key per line, in a fixed order.
    pub fn emit(&self) -> String {
        let tol = match self.oracle_tol {
            Some(t) => t.to_string(),
            None => "auto".to_string(),
        };
        let values = [
            self.m.to_string(),
            self.inflation.to_string(),
            self.taylor_order.to_string(),
            self.n_max.to_string(),
            self.eps.to_string(),
            tol,
            self.output_format.to_string(),
        ];
        KEYS.iter()
            .zip(values)
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.m, 1000);
        assert_eq!(cfg.n_max, 450);
        assert_eq!(cfg.taylor_order, 30);
        assert_eq!(cfg.eps.to_string(), "1/200");
        assert_eq!(RunConfig::parse("").unwrap(), cfg);
    }

    #[test]
    fn parses_comments_and_overrides() {
        let cfg = RunConfig::parse(
            "# policy\n\nm = 200\n  eps = 1/80 \noutput_format = markdown\noracle_tol = 1e-8\n",
        )
        .unwrap();
        assert_eq!(cfg.m, 200);
        assert_eq!(cfg.eps, Eps::reciprocal_of(80).unwrap());
        assert_eq!(cfg.output_format, OutputFormat::Markdown);
        assert_eq!(cfg.oracle_tol, Some(1e-8));
    }

    #[test]
    fn rejects_invalid() {
        for text in [
            "m = 999",
            "m = 50",
            "n_max = 1",
            "eps = 1",
            "eps = 0/3",
            "inflation = 0.9",
            "taylor_order = 3",
            "oracle_tol = 0",
            "colour = red",
            "m 1000",
            "output_format = json",
        ] {
            assert!(RunConfig::parse(text).is_err(), "{text:?} accepted");
        }
    }

    fn arb_config() -> impl Strategy<Value = RunConfig> {
        (
            50usize..5000,
            0.0f64..1e-6,
            4usize..60,
            2usize..2000,
            (1i64..50, 51i64..100_000),
            proptest::option::of(1e-14f64..1e-4),
            any::<bool>(),
        )
            .prop_map(|(half_m, infl, order, n_max, (p, q), tol, md)| RunConfig {
                m: 2 * half_m,
                inflation: 1.0 + infl,
                taylor_order: order,
                n_max,
                eps: Eps::new(p, q).unwrap(),
                oracle_tol: tol,
                output_format: if md { OutputFormat::Markdown } else { OutputFormat::Csv },
            })
    }

    proptest! {
        #[test]
        fn emit_parse_round_trip(cfg in arb_config()) {
            let text = cfg.emit();
            let back = RunConfig::parse(&text).unwrap();
            prop_assert_eq!(&back, &cfg);
            prop_assert_eq!(back.emit(), text);
        }
    }
}
