//! Monte Carlo harness: replica orchestration, estimates with standard
//! errors, and deterministic CSV/JSON rendering.
//!
//! Reproducibility contract: every random draw derives from the master seed
//! through [`crate::seeds::derive_seed`], replicas are reduced in index
//! order, and the CSV rendering contains no timing, so rerunning a config
//! reproduces the CSV byte for byte (wall time lives in the JSON only).

mod martingale;
mod maxdeg;
mod outbreak;
mod recurrence;
mod report;

pub use martingale::MartingaleParams;
pub use maxdeg::MaxDegreeParams;
pub use outbreak::OutbreakParams;
pub use recurrence::{RecurrenceParams, VertexPick};
pub use report::ConditionsParams;

use std::fmt::Write as _;
use std::time::Instant;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::edgestep::{EdgeStepFunction, StepIndexConvention};
use crate::error::Result;

/// A full experiment description; `kind` carries the per-experiment grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub function: EdgeStepFunction,
    #[serde(default)]
    pub convention: StepIndexConvention,
    pub replicas: u64,
    pub master_seed: u64,
    pub kind: ExperimentKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentKind {
    Martingale(MartingaleParams),
    MaxDegree(MaxDegreeParams),
    Outbreak(OutbreakParams),
    Recurrence(RecurrenceParams),
    Conditions(ConditionsParams),
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Martingale(_) => "martingale",
            ExperimentKind::MaxDegree(_) => "maxdeg",
            ExperimentKind::Outbreak(_) => "outbreak",
            ExperimentKind::Recurrence(_) => "recurrence",
            ExperimentKind::Conditions(_) => "conditions",
        }
    }
}

/// One value in a result cell.
#[derive(Debug, Clone, PartialEq)]
pub enum CellValue {
    UInt(u64),
    /// `None` renders as `inf` (used for never-reached stopping times).
    OptRound(Option<u32>),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl CellValue {
    fn render(&self, out: &mut String) {
        match self {
            CellValue::UInt(v) => {
                let _ = write!(out, "{v}");
            }
            CellValue::OptRound(Some(v)) => {
                let _ = write!(out, "{v}");
            }
            CellValue::OptRound(None) => out.push_str("inf"),
            CellValue::Float(v) => {
                let _ = write!(out, "{v}");
            }
            CellValue::Bool(v) => {
                let _ = write!(out, "{v}");
            }
            CellValue::Text(v) => out.push_str(v),
        }
    }
}

impl Serialize for CellValue {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CellValue::UInt(v) => ser.serialize_u64(*v),
            CellValue::OptRound(v) => v.serialize(ser),
            CellValue::Float(v) => ser.serialize_f64(*v),
            CellValue::Bool(v) => ser.serialize_bool(*v),
            CellValue::Text(v) => ser.serialize_str(v),
        }
    }
}

/// One row of an experiment result: ordered named columns.
#[derive(Debug, Clone)]
pub struct Cell {
    pub columns: Vec<(String, CellValue)>,
}

impl Cell {
    pub fn new() -> Self {
        Self { columns: Vec::new() }
    }

    pub fn push(&mut self, key: &str, value: CellValue) -> &mut Self {
        self.columns.push((key.to_string(), value));
        self
    }

    pub fn get(&self, key: &str) -> Option<&CellValue> {
        self.columns
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v)
    }

    /// Convenience for tests: the value as f64 if numeric.
    pub fn number(&self, key: &str) -> Option<f64> {
        match self.get(key)? {
            CellValue::UInt(v) => Some(*v as f64),
            CellValue::Float(v) => Some(*v),
            CellValue::OptRound(Some(v)) => Some(*v as f64),
            CellValue::OptRound(None) => Some(f64::INFINITY),
            _ => None,
        }
    }
}

impl Default for Cell {
    fn default() -> Self {
        Self::new()
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = ser.serialize_map(Some(self.columns.len()))?;
        for (k, v) in &self.columns {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// A named JSON side document produced by an experiment (per-replica
/// certificates, for instance). Written as its own file by the CLI.
#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub name: String,
    pub value: serde_json::Value,
}

/// Replica-indexed estimates plus provenance.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub format_version: u32,
    pub config: ExperimentConfig,
    pub cells: Vec<Cell>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub artifacts: Vec<Artifact>,
    /// Wall time of the run; excluded from the CSV rendering so reruns are
    /// byte-identical.
    pub wall_time_secs: f64,
}

impl ExperimentResult {
    /// One row per cell, with the config echoed in `#` comment lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# format_version = 1\n");
        let config = serde_json::to_string(&self.config).expect("config serializes");
        let _ = writeln!(out, "# config = {config}");
        if let Some(first) = self.cells.first() {
            let header: Vec<&str> = first.columns.iter().map(|(k, _)| k.as_str()).collect();
            out.push_str(&header.join(","));
            out.push('\n');
            for cell in &self.cells {
                let mut line = String::new();
                for (idx, (_, v)) in cell.columns.iter().enumerate() {
                    if idx > 0 {
                        line.push(',');
                    }
                    v.render(&mut line);
                }
                out.push_str(&line);
                out.push('\n');
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Dispatches a config to its experiment runner.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let start = Instant::now();
    let (cells, artifacts) = match &cfg.kind {
        ExperimentKind::Martingale(p) => (martingale::run(cfg, p)?, Vec::new()),
        ExperimentKind::MaxDegree(p) => (maxdeg::run(cfg, p)?, Vec::new()),
        ExperimentKind::Outbreak(p) => outbreak::run(cfg, p)?,
        ExperimentKind::Recurrence(p) => (recurrence::run(cfg, p)?, Vec::new()),
        ExperimentKind::Conditions(p) => (report::run(cfg, p)?, Vec::new()),
    };
    Ok(ExperimentResult {
        format_version: 1,
        config: cfg.clone(),
        cells,
        artifacts,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}
