//! Tables, reports and run manifests.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::args::Format;
use crate::error::{CliError, CliResult};

pub const TOOL: &str = "gtr";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Fails with exit code 3 on the first non-finite number.
    pub fn check_finite(&self) -> CliResult<()> {
        for (i, row) in self.rows.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                if let Cell::Num(v) = cell {
                    if !v.is_finite() {
                        return Err(CliError::numerical(format!(
                            "non-finite result: column '{}' row {} is {v}",
                            self.columns[c], i
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => format_float(*v),
                    Cell::Text(t) => t.clone(),
                })
                .collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

/// 17 significant digits; parses back to the same `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    h.finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn timestamp(t: SystemTime) -> String {
    humantime::format_rfc3339_millis(t).to_string()
}

/// Provenance record for one run. The digest covers the results only, so
/// repeated runs with equal inputs share it.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub started: String,
    pub finished: String,
    pub output_digest: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<OutputFile>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
}

/// What a command produced, before it is written anywhere.
pub struct Emission {
    pub command: String,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub started: SystemTime,
    pub body: Body,
}

pub enum Body {
    Table(Table),
    Report(Map<String, Value>),
}

impl Emission {
    pub fn manifest(&self, digest: String, outputs: Vec<OutputFile>) -> RunManifest {
        RunManifest {
            tool: TOOL,
            version: VERSION,
            command: self.command.clone(),
            parameters: self.parameters.clone(),
            seed: self.seed,
            started: timestamp(self.started),
            finished: timestamp(SystemTime::now()),
            output_digest: format!("sha256:{digest}"),
            outputs,
        }
    }
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(&format!("cannot write {}", path.display()), e))
}

fn write_stdout(bytes: &[u8]) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(bytes)
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io("cannot write stdout", e))
}

fn to_json_pretty(v: &impl Serialize) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(v).expect("serializable output");
    bytes.push(b'\n');
    bytes
}

fn check_finite_value(v: &Value, path: &str) -> CliResult<()> {
    match v {
        Value::Null => Err(CliError::numerical(format!("non-finite result: {path}"))),
        Value::Array(a) => a
            .iter()
            .enumerate()
            .try_for_each(|(i, x)| check_finite_value(x, &format!("{path}[{i}]"))),
        Value::Object(m) => m
            .iter()
            .try_for_each(|(k, x)| check_finite_value(x, &format!("{path}.{k}"))),
        _ => Ok(()),
    }
}

/// Writes the emission to `out` (or stdout) in `format`. Reports are always
/// JSON. CSV written to a file gets a `<out>.manifest.json` sidecar; JSON
/// embeds its manifest.
pub fn emit(em: Emission, format: Format, out: Option<&Path>) -> CliResult<()> {
    let bytes = match &em.body {
        Body::Table(table) => {
            table.check_finite()?;
            match format {
                Format::Csv => {
                    let csv = table.to_csv();
                    if let Some(path) = out {
                        write_file(path, csv.as_bytes())?;
                        let digest = sha256_hex(csv.as_bytes());
                        let manifest = em.manifest(
                            digest.clone(),
                            vec![OutputFile {
                                path: path.display().to_string(),
                                sha256: digest,
                            }],
                        );
                        write_file(&sidecar_path(path), &to_json_pretty(&manifest))?;
                        return Ok(());
                    }
                    csv.into_bytes()
                }
                Format::Json => {
                    let payload = json!({ "columns": table.columns, "rows": table.rows });
                    let digest = sha256_hex(&serde_json::to_vec(&payload).expect("serializable"));
                    let mut doc = Map::new();
                    doc.insert("manifest".into(), serde_json::to_value(em.manifest(digest, vec![])).unwrap());
                    doc.insert("columns".into(), payload["columns"].clone());
                    doc.insert("rows".into(), payload["rows"].clone());
                    to_json_pretty(&doc)
                }
            }
        }
        Body::Report(report) => {
            let value = Value::Object(report.clone());
            check_finite_value(&value, "report")?;
            let digest = sha256_hex(&serde_json::to_vec(&value).expect("serializable"));
            let mut doc = report.clone();
            doc.insert("manifest".into(), serde_json::to_value(em.manifest(digest, vec![])).unwrap());
            to_json_pretty(&doc)
        }
    };
    match out {
        Some(path) => write_file(path, &bytes),
        None => write_stdout(&bytes),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 5e-324, 1.7976931348623157e308, -2.5e-17, 0.0] {
            let s = format_float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
    }

    #[test]
    fn csv_shape_and_finiteness() {
        let mut t = Table::new(["x", "value", "method"]);
        t.push(vec![1.0.into(), 0.5.into(), "closed-form".into()]);
        let csv = t.to_csv();
        assert!(csv.starts_with("x,value,method\n"));
        assert!(csv.ends_with("closed-form\n"));
        assert!(!csv.contains('\r'));
        assert!(t.check_finite().is_ok());
        t.push(vec![2.0.into(), f64::NAN.into(), "quadrature".into()]);
        assert_eq!(t.check_finite().unwrap_err().code, crate::error::EXIT_NONCONVERGENCE);
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(sidecar_path(Path::new("a/b.csv")), PathBuf::from("a/b.csv.manifest.json"));
    }
}
