use crate::error::{Error, Result};
use crate::qpce::Interpretation;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Parameters shared by every subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub shots: u64,
    pub seed: u64,
    pub tau: f64,
    pub eta: f64,
    pub precision_bits: usize,
    pub interpretation: Interpretation,
    pub trials: usize,
    pub output: OutputFormat,
    pub rho: Option<PathBuf>,
    pub circuit: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            shots: 8192,
            seed: 0,
            tau: 0.8,
            eta: 1.0,
            precision_bits: 2,
            interpretation: Interpretation::Subtractive,
            trials: 200,
            output: OutputFormat::Json,
            rho: None,
            circuit: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::validation("shots must be at least 1"));
        }
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return Err(Error::validation("tau must be ≥ 0"));
        }
        if self.trials == 0 {
            return Err(Error::validation("trials must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// A CSV-ready table.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        String::from_utf8(bytes).map_err(|e| Error::validation(e.to_string()))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers()?.iter().map(String::from).collect();
        let rows = r
            .records()
            .map(|rec| Ok(rec?.iter().map(String::from).collect()))
            .collect::<Result<_>>()?;
        Ok(Self { header, rows })
    }
}

/// One document per run: config echo, results, checks and tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub subcommand: String,
    pub config: ExperimentConfig,
    pub results: serde_json::Value,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub tables: BTreeMap<String, Table>,
}

impl Report {
    pub fn new(subcommand: &str, config: &ExperimentConfig) -> Self {
        Self {
            subcommand: subcommand.into(),
            config: config.clone(),
            results: serde_json::Value::Null,
            checks: Vec::new(),
            warnings: Vec::new(),
            tables: BTreeMap::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes `<subcommand>.json` or one `<subcommand>-<table>.csv` per table;
    /// returns the paths written.
    pub fn write(&self, dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        match format {
            OutputFormat::Json => {
                let p = dir.join(format!("{}.json", self.subcommand));
                std::fs::write(&p, self.to_json()?)?;
                written.push(p);
            }
            OutputFormat::Csv => {
                for (name, t) in &self.tables {
                    let p = dir.join(format!("{}-{name}.csv", self.subcommand));
                    std::fs::write(&p, t.to_csv()?)?;
                    written.push(p);
                }
            }
        }
        Ok(written)
    }
}

pub(crate) fn fmt(x: f64) -> String {
    format!("{x:.6}")
}
