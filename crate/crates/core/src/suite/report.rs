use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{OutputFormat, RunConfig};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    pub expected_failure: bool,
}

impl CheckRecord {
    /// Builds a record from raw residuals. A non-finite maximum always fails.
    pub fn from_residuals(name: &str, residuals: &[f64], threshold: f64, expected_failure: bool) -> Self {
        let mut max: f64 = 0.0;
        for &v in residuals {
            if v.is_nan() || v > max {
                max = v;
            }
            if max.is_nan() {
                break;
            }
        }
        let mean = if residuals.is_empty() {
            0.0
        } else {
            residuals.iter().sum::<f64>() / residuals.len() as f64
        };
        let verdict = if max.is_finite() && ((max <= threshold) != expected_failure) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            name: name.to_string(),
            samples: residuals.len(),
            max_residual: max,
            mean_residual: mean,
            threshold,
            verdict,
            expected_failure,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub config: RunConfig,
    pub versions: BTreeMap<String, String>,
    pub wall_time_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub meta: Meta,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckRecord::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn find(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    /// The same report with the wall time cleared, for comparisons.
    pub fn without_timing(&self) -> Self {
        let mut out = self.clone();
        out.meta.wall_time_ms = 0;
        out
    }
}

fn sci(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v:.3e}")
    }
}

fn table(report: &Report) -> String {
    let header = ["check", "samples", "max", "mean", "threshold", "verdict"];
    let rows: Vec<[String; 6]> = report
        .checks
        .iter()
        .map(|c| {
            let verdict = match (c.verdict, c.expected_failure) {
                (Verdict::Pass, false) => "pass",
                (Verdict::Pass, true) => "pass (expected failure)",
                (Verdict::Fail, false) => "FAIL",
                (Verdict::Fail, true) => "FAIL (expected failure)",
            };
            [
                c.name.clone(),
                c.samples.to_string(),
                sci(c.max_residual),
                sci(c.mean_residual),
                sci(c.threshold),
                verdict.to_string(),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let cfg = &report.meta.config;
    let _ = writeln!(
        out,
        "loop={} seed={} samples={} radius={} tol={} diff={}",
        cfg.loop_kind, cfg.seed, cfg.samples, cfg.radius, cfg.tol, cfg.diff
    );
    let line = |cells: &[&str]| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
            // left-align text columns, right-align numbers
            if i == 0 || i == 5 {
                let _ = write!(s, "{cell:<w$}");
            } else {
                let _ = write!(s, "{cell:>w$}");
            }
            if i + 1 < cells.len() {
                s.push_str("  ");
            }
        }
        s.trim_end().to_string()
    };
    let _ = writeln!(out, "{}", line(&header));
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    let _ = writeln!(out, "{}", line(&rule.iter().map(String::as_str).collect::<Vec<_>>()));
    for row in &rows {
        let _ = writeln!(out, "{}", line(&row.iter().map(String::as_str).collect::<Vec<_>>()));
    }
    let failed = report.failures().count();
    let _ = writeln!(
        out,
        "{} checks, {} failed: {}",
        report.checks.len(),
        failed,
        if failed == 0 { "PASS" } else { "FAIL" }
    );
    out
}

pub fn emit_report(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Table => table(report),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        Report {
            meta: Meta {
                config: RunConfig::default(),
                versions: BTreeMap::from([("moufang-core".to_string(), "0".to_string())]),
                wall_time_ms: 3,
            },
            checks: vec![
                CheckRecord::from_residuals("a.one", &[1e-14, 3e-14], 1e-12, false),
                CheckRecord::from_residuals("b.two", &[0.7], 0.5, true),
            ],
        }
    }

    #[test]
    fn verdict_rule() {
        assert!(CheckRecord::from_residuals("x", &[1e-13], 1e-12, false).passed());
        assert!(!CheckRecord::from_residuals("x", &[1e-11], 1e-12, false).passed());
        assert!(CheckRecord::from_residuals("x", &[1.0], 0.5, true).passed());
        assert!(!CheckRecord::from_residuals("x", &[0.1], 0.5, true).passed());
        assert!(!CheckRecord::from_residuals("x", &[0.0, f64::NAN], 0.5, true).passed());
        assert!(!CheckRecord::from_residuals("x", &[f64::NAN, 0.0], 0.5, false).passed());
        let r = CheckRecord::from_residuals("x", &[1.0, 3.0], 5.0, false);
        assert_eq!((r.samples, r.max_residual, r.mean_residual), (2, 3.0, 2.0));
    }

    #[test]
    fn json_round_trip_and_key_order() {
        let r = sample();
        let text = emit_report(&r, OutputFormat::Json);
        assert_eq!(Report::from_json(&text).unwrap(), r);
        let meta = text.find("\"meta\"").unwrap();
        let checks = text.rfind("\"checks\"").unwrap();
        assert!(meta < checks);
        let keys = ["\"name\"", "\"samples\"", "\"max_residual\"", "\"mean_residual\"", "\"threshold\"", "\"verdict\"", "\"expected_failure\""];
        let pos: Vec<usize> = keys.iter().map(|k| text[checks..].find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn table_has_one_row_per_check() {
        let text = emit_report(&sample(), OutputFormat::Table);
        assert_eq!(text.lines().filter(|l| l.starts_with("a.one") || l.starts_with("b.two")).count(), 2);
        assert!(text.contains("pass (expected failure)"));
        assert!(text.trim_end().ends_with("PASS"));
    }
}
