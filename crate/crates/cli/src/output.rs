//! Run identity and persistence.
//!
//! Every run writes three files into the output directory:
//! `<command>.csv` (or `.jsonl`) with one row per result, each carrying the
//! run id; `<command>.summary.json`; and `<command>.record.json`, which adds
//! the timestamp and wall time. The record is first written with
//! `"incomplete": true` so an interrupted run leaves a marker behind.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Hash of the command, its resolved parameters, the seed and the code
/// version.
pub fn run_id(command: &str, params: &Value, seed: u64, format: Format) -> String {
    let canonical = json!({
        "command": command,
        "params": params,
        "seed": seed,
        "format": format,
        "version": CODE_VERSION,
    });
    let digest = Sha256::digest(canonical.to_string().as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Shortest round-trip representation; scientific notation outside
/// `[1e-4, 1e15)`.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else if v == 0.0 || (1e-4..1e15).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn json_num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(num(v))
    }
}

pub struct RunContext {
    pub command: &'static str,
    pub run_id: String,
    pub out_dir: PathBuf,
    pub format: Format,
    params: Value,
    seed: u64,
    timestamp: String,
    started: Instant,
}

impl RunContext {
    pub fn start(
        command: &'static str,
        params: &impl Serialize,
        seed: u64,
        out_dir: &Path,
        format: Format,
    ) -> CliResult<Self> {
        let params = serde_json::to_value(params)?;
        std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
        let ctx = Self {
            command,
            run_id: run_id(command, &params, seed, format),
            out_dir: out_dir.to_path_buf(),
            format,
            params,
            seed,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            started: Instant::now(),
        };
        ctx.write_record(&Value::Null, &Value::Null, true, None)?;
        Ok(ctx)
    }

    pub fn path(&self, suffix: &str) -> PathBuf {
        self.out_dir.join(format!("{}.{suffix}", self.command))
    }

    pub fn rows(&self, header: &[&str]) -> CliResult<RowWriter> {
        let mut columns = vec!["run_id".to_string()];
        columns.extend(header.iter().map(|s| s.to_string()));
        let (path, inner) = match self.format {
            Format::Csv => {
                let path = self.path("csv");
                let mut w = csv::Writer::from_path(&path)?;
                w.write_record(&columns)?;
                w.flush().map_err(|e| CliError::io(&path, e))?;
                (path, Sink::Csv(w))
            }
            Format::Json => {
                let path = self.path("jsonl");
                let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
                (path, Sink::Json(BufWriter::new(file)))
            }
        };
        Ok(RowWriter {
            run_id: self.run_id.clone(),
            columns,
            path,
            inner,
        })
    }

    /// Writes the summary and the final record.
    pub fn finish(
        &self,
        summary: Map<String, Value>,
        diagnostics: Value,
        incomplete: bool,
        error: Option<String>,
    ) -> CliResult<()> {
        let mut doc = Map::new();
        doc.insert("schema".into(), json!(SCHEMA_VERSION));
        doc.insert("run_id".into(), json!(self.run_id));
        doc.insert("command".into(), json!(self.command));
        doc.insert("incomplete".into(), json!(incomplete));
        if let Some(e) = &error {
            doc.insert("error".into(), json!(e));
        }
        let results = Value::Object(summary.clone());
        doc.extend(summary);
        write_json(&self.path("summary.json"), &Value::Object(doc))?;
        self.write_record(&results, &diagnostics, incomplete, error)
    }

    fn write_record(&self, results: &Value, diagnostics: &Value, incomplete: bool, error: Option<String>) -> CliResult<()> {
        let record = json!({
            "schema": SCHEMA_VERSION,
            "run_id": self.run_id,
            "command": self.command,
            "code_version": CODE_VERSION,
            "timestamp": self.timestamp,
            "seed": self.seed,
            "config": self.params,
            "results": results,
            "diagnostics": diagnostics,
            "wall_time_s": self.started.elapsed().as_secs_f64(),
            "incomplete": incomplete,
            "error": error,
        });
        write_json(&self.path("record.json"), &record)
    }
}

fn write_json(path: &Path, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

enum Sink {
    Csv(csv::Writer<File>),
    Json(BufWriter<File>),
}

/// Single writer for the row file; every row is flushed as soon as it is
/// written.
pub struct RowWriter {
    run_id: String,
    columns: Vec<String>,
    path: PathBuf,
    inner: Sink,
}

impl RowWriter {
    pub fn write(&mut self, values: &[String]) -> CliResult<()> {
        if values.len() + 1 != self.columns.len() {
            return Err(CliError::Output(format!(
                "row has {} values for {} columns",
                values.len(),
                self.columns.len() - 1
            )));
        }
        let io = |e| CliError::io(&self.path, e);
        match &mut self.inner {
            Sink::Csv(w) => {
                w.write_field(&self.run_id)?;
                w.write_record(values)?;
                w.flush().map_err(io)
            }
            Sink::Json(w) => {
                let mut obj = Map::new();
                obj.insert("run_id".into(), json!(self.run_id));
                for (c, v) in self.columns[1..].iter().zip(values) {
                    obj.insert(c.clone(), json!(v));
                }
                serde_json::to_writer(&mut *w, &Value::Object(obj))?;
                w.write_all(b"\n").map_err(io)?;
                w.flush().map_err(io)
            }
        }
    }
}
