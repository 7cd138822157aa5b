//! CSV tables and JSON sidecars.
//!
//! Numbers are written as `{:.16e}` (17 significant digits), so a CSV value
//! parses back to the identical f64. Rows end in LF.

use std::fs;
use std::path::{Path, PathBuf};

use decohere_core::{DerivedScales, DimensionlessGroups, Scenario, Source, Variant, Warning};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub const TOOL: &str = "decohere";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// In-memory CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        // Writing into a Vec cannot fail.
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_file(path, &self.to_bytes())
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// RFC 3339 UTC time of the run; honours `SOURCE_DATE_EPOCH`.
pub fn timestamp() -> String {
    use chrono::{DateTime, SecondsFormat, Utc};
    let when = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| DateTime::<Utc>::from_timestamp(secs, 0))
        .unwrap_or_else(Utc::now);
    when.to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// Metadata written next to every CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    /// Effective configuration, command-line overrides applied.
    pub config: RunConfig,
    pub input_mode: String,
    pub source: Option<Source>,
    pub variant: Variant,
    pub scenario: Scenario,
    pub derived_scales: Option<DerivedScales>,
    pub groups: DimensionlessGroups,
    /// t_L/τ_D.
    pub t_ratio: f64,
    pub warnings: Vec<Warning>,
    pub outputs: Vec<String>,
    pub report: serde_json::Value,
    pub timestamp: String,
}

impl Sidecar {
    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("sidecar serializes");
        out.push(b'\n');
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_file(path, &self.to_json())
    }

    pub fn read(path: &Path) -> std::result::Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
        serde_json::from_str(&text).map_err(|e| e.to_string())
    }
}

/// Output file names under `dir` for a run labelled `name`.
pub fn paths(dir: &Path, name: &str, suffix: &str) -> (PathBuf, PathBuf) {
    let stem = if suffix.is_empty() {
        name.to_string()
    } else {
        format!("{name}_{suffix}")
    };
    (dir.join(format!("{stem}.csv")), dir.join(format!("{stem}.json")))
}

pub fn file_name(p: &Path) -> String {
    p.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip_exactly() {
        for v in [0.1, 1.0 / 3.0, 6.02214076e23, -1.602176634e-19, 0.0, 5e-324] {
            let s = num(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(num(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn table_uses_lf_and_quotes_commas() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec![num(1.5), "x, y".into()]);
        let s = String::from_utf8(t.to_bytes()).unwrap();
        assert_eq!(s, "a,b\n1.5000000000000000e0,\"x, y\"\n");
    }

    #[test]
    fn fixed_epoch_timestamp() {
        std::env::set_var("SOURCE_DATE_EPOCH", "0");
        assert_eq!(timestamp(), "1970-01-01T00:00:00Z");
        std::env::remove_var("SOURCE_DATE_EPOCH");
    }
}
