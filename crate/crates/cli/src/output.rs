//! Machine-readable output records.
//!
//! Every command writes records to stdout and nothing else there; logs go
//! to stderr.  JSON mode emits one compact object per line so suite
//! output streams; CSV mode emits one row per result field at 17
//! significant digits.  Records carry the crate version, the seed when
//! one was consumed, and an RFC 3339 timestamp — the only field allowed
//! to differ between identical invocations.

use std::collections::BTreeMap;
use std::time::SystemTime;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// A parameter echo: numeric where possible, text otherwise.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(u64),
    Num(f64),
    Text(String),
}

/// One named numeric result, with optional uncertainty and verdict.
#[derive(Debug, Clone, Serialize)]
pub struct ResultField {
    pub name: String,
    pub value: Option<f64>,
    pub stderr: Option<f64>,
    pub verdict: Option<String>,
}

impl ResultField {
    pub fn plain(name: &str, value: f64) -> Self {
        ResultField { name: name.to_string(), value: Some(value), stderr: None, verdict: None }
    }

    pub fn judged(name: &str, value: f64, verdict: &str) -> Self {
        ResultField {
            name: name.to_string(),
            value: Some(value),
            stderr: None,
            verdict: Some(verdict.to_string()),
        }
    }

    pub fn with_stderr(name: &str, value: f64, stderr: f64) -> Self {
        ResultField {
            name: name.to_string(),
            value: Some(value),
            stderr: Some(stderr),
            verdict: None,
        }
    }

    /// A result whose value does not exist, flagged through the verdict
    /// column (e.g. `overflow`).
    pub fn absent(name: &str, flag: &str) -> Self {
        ResultField {
            name: name.to_string(),
            value: None,
            stderr: None,
            verdict: Some(flag.to_string()),
        }
    }

    /// A field the method does not define (kept so rows stay uniform).
    pub fn null(name: &str) -> Self {
        ResultField { name: name.to_string(), value: None, stderr: None, verdict: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub version: String,
    pub seed: Option<u64>,
    pub timestamp: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    pub command: String,
    pub params: BTreeMap<String, ParamValue>,
    pub results: Vec<ResultField>,
    pub meta: Meta,
}

/// Builder that stamps metadata when the record is finished.
pub struct RecordBuilder {
    command: String,
    params: BTreeMap<String, ParamValue>,
    results: Vec<ResultField>,
}

impl RecordBuilder {
    pub fn new(command: &str) -> Self {
        RecordBuilder { command: command.to_string(), params: BTreeMap::new(), results: Vec::new() }
    }

    pub fn param_int(mut self, key: &str, value: u64) -> Self {
        self.params.insert(key.to_string(), ParamValue::Int(value));
        self
    }

    pub fn param_num(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), ParamValue::Num(value));
        self
    }

    pub fn param_text(mut self, key: &str, value: &str) -> Self {
        self.params.insert(key.to_string(), ParamValue::Text(value.to_string()));
        self
    }

    pub fn result(mut self, field: ResultField) -> Self {
        self.results.push(field);
        self
    }

    pub fn finish(self, seed: Option<u64>) -> OutputRecord {
        OutputRecord {
            command: self.command,
            params: self.params,
            results: self.results,
            meta: Meta {
                version: env!("CARGO_PKG_VERSION").to_string(),
                seed,
                timestamp: humantime::format_rfc3339_seconds(SystemTime::now()).to_string(),
            },
        }
    }
}

/// 17 significant digits: enough to round-trip any `f64`.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes one line to stdout, exiting quietly when the reader has closed
/// the pipe (e.g. `conc-bounds ... | head`).
pub fn write_line(line: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{line}").is_err() {
        std::process::exit(0);
    }
}

/// Writes records in the selected format, emitting the CSV header once.
pub struct Emitter {
    format: Format,
    csv_header_written: bool,
}

impl Emitter {
    pub fn new(format: Format) -> Self {
        Emitter { format, csv_header_written: false }
    }

    pub fn emit(&mut self, record: &OutputRecord) {
        match self.format {
            Format::Json => {
                write_line(&serde_json::to_string(record).expect("record serializes"));
            }
            Format::Csv => {
                if !self.csv_header_written {
                    write_line("command,name,value,stderr,verdict");
                    self.csv_header_written = true;
                }
                for r in &record.results {
                    write_line(&format!(
                        "{},{},{},{},{}",
                        record.command,
                        r.name,
                        r.value.map(sig17).unwrap_or_default(),
                        r.stderr.map(sig17).unwrap_or_default(),
                        r.verdict.clone().unwrap_or_default(),
                    ));
                }
            }
        }
    }
}
