//! Report rows and their CSV/JSON serializations.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::CliError;

pub const CSV_COLUMNS: [&str; 12] = [
    "mode",
    "p",
    "n",
    "exact_num",
    "exact_den",
    "exact_decimal",
    "empirical",
    "stderr",
    "trials",
    "seed",
    "runtime_ms",
    "extra",
];

/// One row per `(p, n)` point, or per enumerated object in isotropic mode.
///
/// Decimal fields are pre-rendered to 12 significant digits so the CSV and
/// JSON carry identical text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub mode: String,
    pub p: u32,
    pub n: usize,
    pub exact_num: Option<u128>,
    pub exact_den: Option<u128>,
    pub exact_decimal: Option<String>,
    pub empirical: Option<String>,
    pub stderr: Option<String>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub runtime_ms: Option<u64>,
    /// `key=value` pairs separated by `;`.
    pub extra: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    /// UTC, ISO-8601.
    pub timestamp: String,
    pub rng: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub rows: Vec<ReportRow>,
    pub metadata: Metadata,
}

/// `key=value;key=value`.
#[derive(Debug, Default)]
pub struct Extra(Vec<String>);

impl Extra {
    pub fn push(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.0.push(format!("{key}={value}"));
        self
    }

    pub fn finish(&self) -> String {
        self.0.join(";")
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

/// CSV text for the report. `runtime_ms` is left empty unless the config asks
/// for it, so equal configs give byte-identical files.
pub fn render_csv(report: &ExperimentReport) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS)?;
    for r in &report.rows {
        let runtime = if report.config.record_runtime {
            opt(&r.runtime_ms)
        } else {
            String::new()
        };
        w.write_record([
            r.mode.clone(),
            r.p.to_string(),
            r.n.to_string(),
            opt(&r.exact_num),
            opt(&r.exact_den),
            opt(&r.exact_decimal),
            opt(&r.empirical),
            opt(&r.stderr),
            opt(&r.trials),
            opt(&r.seed),
            runtime,
            r.extra.clone(),
        ])?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

pub fn render_json(report: &ExperimentReport) -> serde_json::Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(report)?;
    out.push(b'\n');
    Ok(out)
}

/// Writes to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("output: '{}' has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        CliError::io(path, e)
    })
}

pub fn emit_csv(report: &ExperimentReport) -> Result<std::path::PathBuf, CliError> {
    let path = report.config.csv_path();
    let bytes = render_csv(report).map_err(|e| CliError::io(&path, std::io::Error::other(e)))?;
    write_atomic(&path, &bytes)?;
    Ok(path)
}

pub fn emit_json(report: &ExperimentReport) -> Result<std::path::PathBuf, CliError> {
    let path = report.config.json_path();
    let bytes = render_json(report).map_err(|e| CliError::io(&path, std::io::Error::other(e)))?;
    write_atomic(&path, &bytes)?;
    Ok(path)
}
