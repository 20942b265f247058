//! Table artifacts and their CSV / Markdown renderings.

use std::fmt::Write as _;

use crate::config::{OutputFormat, RunConfig};
use crate::error::{Result, SieveError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Cn,
    Tau,
    EpsScan,
    Constants,
}

impl TableKind {
    pub fn name(self) -> &'static str {
        match self {
            TableKind::Cn => "cn",
            TableKind::Tau => "tau",
            TableKind::EpsScan => "eps_scan",
            TableKind::Constants => "constants",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    /// Display value, printed in shortest form.
    Rounded(f64),
    Text(String),
    Flag(bool),
}

impl Cell {
    pub fn as_real(&self) -> Option<f64> {
        match *self {
            Cell::Real(v) | Cell::Rounded(v) => Some(v),
            Cell::Int(v) => Some(v as f64),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => full_precision(*v),
            Cell::Rounded(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
        }
    }
}

/// Plain decimal with 17 significant digits.
pub fn full_precision(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (16 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Where an artifact came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub config: RunConfig,
    pub version: &'static str,
}

impl Provenance {
    pub fn new(config: &RunConfig) -> Self {
        Self {
            config: config.clone(),
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

const CONFIG_MARK: &str = "config: ";

#[derive(Debug, Clone, PartialEq)]
pub struct TableArtifact {
    pub kind: TableKind,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub provenance: Provenance,
}

impl TableArtifact {
    /// Check shape, and for keyed tables that the first column is strictly increasing.
    pub fn validate(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return Err(SieveError::Internal(format!(
                    "{} row {i} has {} cells for {} columns",
                    self.kind.name(),
                    row.len(),
                    self.columns.len()
                )));
            }
        }
        if self.kind == TableKind::Constants {
            let mut names: Vec<_> = self.rows.iter().map(|r| r[0].render()).collect();
            names.sort();
            if names.windows(2).any(|w| w[0] == w[1]) {
                return Err(SieveError::Internal("duplicate constant name".into()));
            }
            return Ok(());
        }
        let keys: Vec<f64> = self
            .rows
            .iter()
            .map(|r| r[0].as_real().ok_or_else(|| SieveError::Internal("non-numeric key".into())))
            .collect::<Result<_>>()?;
        if keys.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SieveError::Internal(format!(
                "{} keys not strictly increasing",
                self.kind.name()
            )));
        }
        Ok(())
    }

    /// Row whose first cell equals `key`.
    pub fn row(&self, key: i64) -> Option<&[Cell]> {
        self.rows
            .iter()
            .find(|r| matches!(r[0], Cell::Int(k) if k == key))
            .map(|r| r.as_slice())
    }

    /// Row of a constants table by name.
    pub fn named(&self, name: &str) -> Option<&[Cell]> {
        self.rows
            .iter()
            .find(|r| matches!(&r[0], Cell::Text(s) if s == name))
            .map(|r| r.as_slice())
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Markdown => self.to_markdown(),
        }
    }

    fn provenance_lines(&self) -> Vec<String> {
        let mut lines = vec![format!(
            "sievekernel {} table {}",
            self.provenance.version,
            self.kind.name()
        )];
        lines.extend(
            self.provenance
                .config
                .emit()
                .lines()
                .map(|l| format!("{CONFIG_MARK}{l}")),
        );
        lines
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in self.provenance_lines() {
            let _ = writeln!(out, "# {line}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| csv_field(&c.render())).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        for line in self.provenance_lines() {
            let _ = writeln!(out, "<!-- {line} -->");
        }
        let _ = writeln!(out, "| {} |", self.columns.join(" | "));
        let rule: Vec<&str> = self.columns.iter().map(|_| "---").collect();
        let _ = writeln!(out, "| {} |", rule.join(" | "));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.render().replace('|', "\\|")).collect();
            let _ = writeln!(out, "| {} |", cells.join(" | "));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Recover the config snapshot embedded in a rendered artifact.
pub fn config_from_artifact(text: &str) -> Result<RunConfig> {
    let mut body = String::new();
    for line in text.lines() {
        let inner = line
            .strip_prefix("# ")
            .or_else(|| line.strip_prefix("<!-- ").and_then(|l| l.strip_suffix(" -->")));
        if let Some(setting) = inner.and_then(|l| l.strip_prefix(CONFIG_MARK)) {
            body.push_str(setting);
            body.push('\n');
        }
    }
    if body.is_empty() {
        return Err(SieveError::InvalidParameter(
            "no config snapshot found in artifact".into(),
        ));
    }
    RunConfig::parse(&body)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TableArtifact {
        TableArtifact {
            kind: TableKind::Cn,
            columns: vec!["n", "c_n", "c_n_rounded"],
            rows: vec![
                vec![Cell::Int(2), Cell::Real(0.324), Cell::Rounded(0.33)],
                vec![Cell::Int(3), Cell::Real(0.383_000_1), Cell::Rounded(0.39)],
            ],
            provenance: Provenance::new(&RunConfig::default()),
        }
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(full_precision(0.1), "0.10000000000000001");
        assert_eq!(full_precision(155.5), "155.50000000000000");
        let tiny = full_precision(1.25e-10);
        assert!(tiny.starts_with("0.000000000125"));
        assert_eq!(tiny.len(), 2 + 26);
        assert_eq!(tiny.parse::<f64>().unwrap(), 1.25e-10);
        assert_eq!(full_precision(0.0), "0");
        assert_eq!(full_precision(-2.0), "-2.0000000000000000");
    }

    #[test]
    fn csv_layout() {
        let t = sample();
        t.validate().unwrap();
        let csv = t.to_csv();
        let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body[0], "n,c_n,c_n_rounded");
        assert_eq!(body[1], "2,0.32400000000000001,0.33");
        assert_eq!(body.len(), 3);
        assert_eq!(csv, t.to_csv());
    }

    #[test]
    fn markdown_layout() {
        let md = sample().to_markdown();
        assert!(md.contains("| n | c_n | c_n_rounded |"));
        assert!(md.contains("| --- | --- | --- |"));
    }

    #[test]
    fn snapshot_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.m = 400;
        cfg.eps = "1/99".parse().unwrap();
        let mut t = sample();
        t.provenance = Provenance::new(&cfg);
        assert_eq!(config_from_artifact(&t.to_csv()).unwrap(), cfg);
        assert_eq!(config_from_artifact(&t.to_markdown()).unwrap(), cfg);
        assert!(config_from_artifact("n,c\n2,0.3\n").is_err());
    }

    #[test]
    fn validation_catches_disorder() {
        let mut t = sample();
        t.rows.swap(0, 1);
        assert!(t.validate().is_err());
        let mut t = sample();
        t.rows[1][0] = Cell::Int(2);
        assert!(t.validate().is_err());
        let mut t = sample();
        t.rows[0].pop();
        assert!(t.validate().is_err());
    }

    #[test]
    fn quoting() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("plain"), "plain");
    }
}
