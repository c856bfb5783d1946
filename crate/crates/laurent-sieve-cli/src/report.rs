//! Report documents, check records and witness tables.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::config::CommandConfig;
use crate::CliError;

pub const SCHEMA: u32 = 1;

/// One verified statement: `lhs` compared against `rhs` within `tolerance`.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub pass: bool,
    pub lhs: Value,
    pub rhs: Value,
    pub tolerance: Value,
    /// Milliseconds, only with `--timings`.
    pub runtime: Option<f64>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub detail: Value,
}

/// Body of a record before naming and timing.
#[derive(Debug, Clone)]
pub struct Check {
    pub pass: bool,
    pub lhs: Value,
    pub rhs: Value,
    pub tolerance: Value,
    pub detail: Value,
}

impl Check {
    pub fn new(pass: bool, lhs: impl Serialize, rhs: impl Serialize, tolerance: impl Serialize) -> Check {
        Check { pass, lhs: to_value(lhs), rhs: to_value(rhs), tolerance: to_value(tolerance), detail: Value::Null }
    }
    /// Exact comparison `lhs == rhs`.
    pub fn eq<T: Serialize + PartialEq>(lhs: T, rhs: T) -> Check {
        Check::new(lhs == rhs, &lhs, &rhs, "exact")
    }
    /// `lhs <= rhs`.
    pub fn le(lhs: f64, rhs: f64, tolerance: impl Serialize) -> Check {
        Check::new(lhs <= rhs, lhs, rhs, tolerance)
    }
    pub fn detail(mut self, d: impl Serialize) -> Check {
        self.detail = to_value(d);
        self
    }
}

pub fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).unwrap_or_else(|e| Value::String(format!("unserializable: {e}")))
}

/// CSV row: `N, pi, norm_dist_exponent, exponent_ratio`.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct WitnessRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub pi: String,
    pub norm_dist_exponent: i64,
    pub exponent_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDoc {
    pub schema: u32,
    pub version: String,
    pub command: CommandConfig,
    pub seed: u64,
    pub pass: bool,
    pub records: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<WitnessRow>,
}

/// Accumulates records while a command runs.
pub struct Recorder {
    timings: bool,
    records: Vec<CheckRecord>,
    witnesses: Vec<WitnessRow>,
}

impl Recorder {
    pub fn new(timings: bool) -> Recorder {
        Recorder { timings, records: Vec::new(), witnesses: Vec::new() }
    }

    /// Runs `f` and files its outcome under `name`; errors become failing records.
    pub fn check(&mut self, name: impl Into<String>, f: impl FnOnce() -> Result<Check, String>) {
        let start = Instant::now();
        let out = f();
        let ms = start.elapsed().as_secs_f64() * 1e3;
        let c = out.unwrap_or_else(|e| Check::new(false, Value::Null, Value::Null, Value::Null).detail(serde_json::json!({ "error": e })));
        self.push(name.into(), c, ms);
    }

    pub fn push(&mut self, name: String, c: Check, ms: f64) {
        self.records.push(CheckRecord {
            name,
            pass: c.pass,
            lhs: c.lhs,
            rhs: c.rhs,
            tolerance: c.tolerance,
            runtime: self.timings.then_some(ms),
            detail: c.detail,
        });
    }

    pub fn witnesses(&mut self, rows: impl IntoIterator<Item = WitnessRow>) {
        self.witnesses.extend(rows);
    }

    /// Sorted, with an explicit failure when nothing was checked.
    pub fn finish(mut self, config: &CommandConfig) -> ReportDoc {
        if self.records.is_empty() {
            self.push("no-checks".into(), Check::new(false, 0, 1, "at least one check").detail("the configuration selected nothing to verify"), 0.0);
        }
        self.records.sort_by(|a, b| a.name.cmp(&b.name));
        ReportDoc {
            schema: SCHEMA,
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: config.clone(),
            seed: config.seed,
            pass: self.records.iter().all(|r| r.pass),
            records: self.records,
            witnesses: self.witnesses,
        }
    }
}

impl ReportDoc {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn write_json(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    pub fn witness_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.witnesses.is_empty() {
            w.write_record(["N", "pi", "norm_dist_exponent", "exponent_ratio"]).map_err(|e| CliError::Io(e.to_string()))?;
        }
        for row in &self.witnesses {
            w.serialize(row).map_err(|e| CliError::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.witness_csv()?).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}
