//! Report bundles: `report.json`, the echoed config, CSV tables and
//! two-column curves. Everything written here is a pure function of the
//! resolved config; wall-clock time lives in a separate `timing.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::Config;
use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// A two-column series such as `n` against `(1/n) ln|W_n|`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub name: String,
    pub x: String,
    pub y: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct Bundle {
    pub config: Config,
    pub results: Value,
    pub provenance: Value,
    pub tables: Vec<Table>,
    pub curves: Vec<Curve>,
}

/// JSON has no infinities; those are written as strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

/// Shortest round-trip form, with an exponent outside `[1e-4, 1e16)`.
pub fn fmt(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !x.is_finite() || (1e-4..1e16).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

impl Bundle {
    pub fn report(&self) -> Value {
        let mut artifacts: Vec<&str> = vec!["report.json", "config.toml"];
        artifacts.extend(self.tables.iter().map(|t| t.name.as_str()));
        artifacts.extend(self.curves.iter().map(|c| c.name.as_str()));
        json!({
            "schema_version": SCHEMA_VERSION,
            "scenario": self.config.scenario.map(|s| s.to_string()),
            "config": serde_json::to_value(&self.config).expect("config serializes"),
            "results": self.results,
            "provenance": self.provenance,
            "artifacts": artifacts,
        })
    }

    /// Writes every artifact into `out` and returns their paths.
    pub fn write(&self, out: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
        let mut written = Vec::new();
        let mut report = serde_json::to_string_pretty(&self.report()).expect("report serializes");
        report.push('\n');
        written.push(write_file(out, "report.json", report.as_bytes())?);
        written.push(write_file(out, "config.toml", self.config.to_toml().as_bytes())?);
        for t in &self.tables {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&t.header).map_err(csv_err)?;
            for row in &t.rows {
                w.write_record(row).map_err(csv_err)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Other(e.to_string()))?;
            written.push(write_file(out, &t.name, &bytes)?);
        }
        if !self.curves.is_empty() {
            written.extend(emit_plotdata(self, out)?);
        }
        Ok(written)
    }
}

/// One two-column CSV per curve in the bundle.
pub fn emit_plotdata(bundle: &Bundle, out: &Path) -> Result<Vec<PathBuf>> {
    if bundle.curves.is_empty() {
        return Err(CliError::usage("bundle has no series to plot"));
    }
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let mut written = Vec::new();
    for c in &bundle.curves {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([&c.x, &c.y]).map_err(csv_err)?;
        for (x, y) in &c.points {
            w.write_record([fmt(*x), fmt(*y)]).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Other(e.to_string()))?;
        written.push(write_file(out, &c.name, &bytes)?);
    }
    Ok(written)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Other(e.to_string())
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

pub fn write_timing(out: &Path, seconds: f64) -> Result<PathBuf> {
    let text = format!("{}\n", json!({ "wall_clock_seconds": seconds }));
    write_file(out, "timing.json", text.as_bytes())
}
