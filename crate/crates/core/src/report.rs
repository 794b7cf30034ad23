//! CSV emission, named check collection, and the machine-readable run
//! manifest.

use crate::Result;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

/// One named scalar series with run metadata (rows of (label, values)).
#[derive(Debug, Clone, Default)]
pub struct ExperimentRecord {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ExperimentRecord {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        ExperimentRecord {
            name: name.to_string(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

/// Format a float with 17 significant digits in scientific notation so that
/// round-tripping is exact.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Write a record as CSV: mandatory header row, '.' decimal separator,
/// scientific notation with 17 significant digits.
pub fn write_csv(record: &ExperimentRecord, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut out = String::new();
    out.push_str(
        &record.columns.iter().map(|c| csv_quote(c)).collect::<Vec<_>>().join(","),
    );
    out.push('\n');
    for row in &record.rows {
        out.push_str(&row.iter().map(|&x| fmt_f64(x)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    atomic_write(path, out.as_bytes())
}

/// A single named pass/fail check with its residual and threshold.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub residual: f64,
    pub threshold: f64,
}

/// Collects checks for one scenario run.
#[derive(Debug, Default)]
pub struct CheckSet {
    pub checks: Vec<Check>,
}

impl CheckSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// residual <= threshold passes.
    pub fn check_upper(&mut self, name: &str, residual: f64, threshold: f64) -> bool {
        let pass = residual.is_finite() && residual <= threshold;
        self.checks.push(Check { name: name.to_string(), pass, residual, threshold });
        pass
    }

    /// Boolean check; residual recorded as 0/1.
    pub fn check_bool(&mut self, name: &str, ok: bool) -> bool {
        self.checks.push(Check {
            name: name.to_string(),
            pass: ok,
            residual: if ok { 0.0 } else { 1.0 },
            threshold: 0.5,
        });
        ok
    }

    /// value must lie in [lo, hi].
    pub fn check_range(&mut self, name: &str, value: f64, lo: f64, hi: f64) -> bool {
        let pass = value.is_finite() && value >= lo && value <= hi;
        // Residual: signed distance outside the interval.
        let residual = if value < lo {
            lo - value
        } else if value > hi {
            value - hi
        } else {
            0.0
        };
        self.checks.push(Check { name: name.to_string(), pass, residual, threshold: 0.0 });
        pass
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn worst(&self) -> Option<&Check> {
        self.checks
            .iter()
            .max_by(|a, b| {
                let ra = a.residual / a.threshold.max(1e-300);
                let rb = b.residual / b.threshold.max(1e-300);
                ra.partial_cmp(&rb).unwrap()
            })
    }

    /// Pass/fail table as a record (residuals and thresholds).
    pub fn to_record(&self, name: &str) -> ExperimentRecord {
        let mut rec = ExperimentRecord::new(name, &["check_index", "pass", "residual", "threshold"]);
        for (i, c) in self.checks.iter().enumerate() {
            rec.push(vec![i as f64, if c.pass { 1.0 } else { 0.0 }, c.residual, c.threshold]);
        }
        rec
    }
}

/// Run manifest: config echo, versions, timing, per-check outcomes.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub scenario: String,
    pub version: String,
    pub seed: u64,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub config: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub all_pass: bool,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(scenario: &str, seed: u64, config: BTreeMap<String, String>) -> Self {
        RunManifest {
            scenario: scenario.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            started_unix_ms: now_ms(),
            finished_unix_ms: 0,
            config,
            checks: Vec::new(),
            all_pass: false,
            outputs: Vec::new(),
        }
    }

    pub fn finish(&mut self, checks: Vec<Check>) {
        self.all_pass = checks.iter().all(|c| c.pass);
        self.checks = checks;
        self.finished_unix_ms = now_ms();
    }

    /// Serialize and write atomically (temp file + rename).
    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| crate::Error::Internal(format!("manifest serialization: {e}")))?;
        atomic_write(path, json.as_bytes())
    }
}

fn now_ms() -> u128 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp: PathBuf = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}
