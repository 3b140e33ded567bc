//! Seeded verification runs: configuration, check execution, reports and
//! data export. Shared by the command-line tool and the browser demo.

mod checks;
mod export;
mod report;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chart::TIGHT_RADIUS;
use crate::error::{Error, Result};

pub use checks::run_suite;
pub use export::{export_mul_table, export_structure_constants, export_structure_functions, ExportKind, StructureFunctionsExport};
pub use report::{emit_report, CheckRecord, Meta, Report, Verdict};

/// Largest admissible sampling radius.
pub const MAX_RADIUS: f64 = 0.7;

/// Reference tolerance: per-check thresholds are quoted at this value of
/// `tol` and scale linearly with it.
pub const REFERENCE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoopKind {
    Circle,
    Quaternion,
    Octonion,
}

impl LoopKind {
    pub fn level(self) -> u32 {
        match self {
            Self::Circle => 1,
            Self::Quaternion => 2,
            Self::Octonion => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Moufang,
    Malcev,
    Birep,
    Gle,
    LieCartan,
    Corollary,
    Yamaguti,
    Closure,
    Dimension,
}

impl CheckKind {
    pub const ALL: [CheckKind; 9] = [
        Self::Moufang,
        Self::Malcev,
        Self::Birep,
        Self::Gle,
        Self::LieCartan,
        Self::Corollary,
        Self::Yamaguti,
        Self::Closure,
        Self::Dimension,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Moufang => "moufang",
            Self::Malcev => "malcev",
            Self::Birep => "birep",
            Self::Gle => "gle",
            Self::LieCartan => "lie-cartan",
            Self::Corollary => "corollary",
            Self::Yamaguti => "yamaguti",
            Self::Closure => "closure",
            Self::Dimension => "dimension",
        }
    }

    /// Whether the check differentiates the chart or the birepresentation.
    pub fn uses_derivatives(self) -> bool {
        !matches!(self, Self::Moufang | Self::Birep)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiffMode {
    Jet,
    Fd,
    #[default]
    Both,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Json,
    Table,
}

macro_rules! kebab_parse {
    ($($ty:ty),*) => {$(
        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                serde_json::from_value(serde_json::Value::String(s.trim().to_ascii_lowercase()))
                    .map_err(|_| Error::Config(format!("unknown {} `{s}`", stringify!($ty))))
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                match serde_json::to_value(self) {
                    Ok(serde_json::Value::String(s)) => f.write_str(&s),
                    _ => Err(fmt::Error),
                }
            }
        }
    )*};
}

kebab_parse!(LoopKind, CheckKind, DiffMode, OutputFormat);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "loop")]
    pub loop_kind: LoopKind,
    pub checks: Vec<CheckKind>,
    pub samples: usize,
    pub seed: u64,
    pub radius: f64,
    pub tol: f64,
    pub diff: DiffMode,
    pub format: OutputFormat,
    pub exhaustive_basis: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            loop_kind: LoopKind::Octonion,
            checks: CheckKind::ALL.to_vec(),
            samples: 50,
            seed: 42,
            radius: crate::chart::DEFAULT_RADIUS,
            tol: REFERENCE_TOL,
            diff: DiffMode::Both,
            format: OutputFormat::Json,
            exhaustive_basis: false,
        }
    }
}

impl RunConfig {
    pub fn new(loop_kind: LoopKind) -> Self {
        Self {
            loop_kind,
            ..Self::default()
        }
    }

    pub fn with_checks(mut self, checks: &[CheckKind]) -> Self {
        self.checks = checks.to_vec();
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius <= MAX_RADIUS) {
            return Err(Error::Config(format!(
                "radius {} not in (0, {MAX_RADIUS}]",
                self.radius
            )));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config(format!("tol {} must be positive", self.tol)));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be positive".into()));
        }
        Ok(())
    }

    /// Selected checks in canonical order, without duplicates.
    pub fn selected(&self) -> Vec<CheckKind> {
        CheckKind::ALL
            .into_iter()
            .filter(|c| self.checks.contains(c))
            .collect()
    }

    /// Sampling radius for the generalized Lie equations and the generalized
    /// Lie-Cartan relations.
    pub fn tight_radius(&self) -> f64 {
        self.radius.min(TIGHT_RADIUS)
    }

    /// `pinned * tol / REFERENCE_TOL`
    pub fn scaled(&self, pinned: f64) -> f64 {
        pinned * (self.tol / REFERENCE_TOL)
    }
}
