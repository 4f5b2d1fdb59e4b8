//! Report rows and their CSV/JSON encodings.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use rieffel_core::grid::write_atomic;
use rieffel_core::{Error, Result};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Csv,
    Json,
}

impl Emit {
    fn extension(self) -> &'static str {
        match self {
            Emit::Csv => "csv",
            Emit::Json => "json",
        }
    }
}

/// A value that can be written as one CSV line.
pub trait CsvRow: Serialize {
    const HEADER: &'static str;
    fn csv(&self, out: &mut String);
}

fn float(v: f64) -> String {
    format!("{v:.17e}")
}

/// One gated (or informational, when `gate` is absent) measurement.
#[derive(Clone, Debug, Serialize)]
pub struct GateRow {
    pub name: String,
    pub value: f64,
    pub gate: Option<f64>,
    pub cases: usize,
    pub pass: bool,
}

impl GateRow {
    /// `value <= gate`.
    pub fn at_most(name: &str, value: f64, gate: f64, cases: usize) -> Self {
        GateRow {
            name: name.into(),
            value,
            gate: Some(gate),
            cases,
            pass: value <= gate,
        }
    }

    pub fn flag(name: &str, ok: bool, value: f64, cases: usize) -> Self {
        GateRow {
            name: name.into(),
            value,
            gate: None,
            cases,
            pass: ok,
        }
    }

    pub fn info(name: &str, value: f64, cases: usize) -> Self {
        GateRow::flag(name, true, value, cases)
    }
}

impl CsvRow for GateRow {
    const HEADER: &'static str = "name,value,gate,cases,pass";
    fn csv(&self, out: &mut String) {
        let gate = self.gate.map(float).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{},{}", self.name, float(self.value), gate, self.cases, self.pass);
    }
}

/// A sweep row labelled with the operator or function it belongs to.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub label: String,
    pub m: usize,
    pub residual: f64,
    #[serde(rename = "N")]
    pub points: usize,
}

impl CsvRow for SweepRow {
    const HEADER: &'static str = "label,m,residual,N";
    fn csv(&self, out: &mut String) {
        let _ = writeln!(out, "{},{},{},{}", self.label, self.m, float(self.residual), self.points);
    }
}

/// Outcome of one operator in the conjecture ensembles.
#[derive(Clone, Debug, Serialize)]
pub struct VerdictRow {
    pub ensemble: String,
    pub operator: String,
    pub kind: String,
    pub commutant_residual: f64,
    pub reconstruction_gap: Option<f64>,
    /// `||f' - f||_E` for left multiplications with a known symbol.
    pub symbol_error: Option<f64>,
    pub pass: bool,
}

impl CsvRow for VerdictRow {
    const HEADER: &'static str = "ensemble,operator,kind,commutant_residual,reconstruction_gap,symbol_error,pass";
    fn csv(&self, out: &mut String) {
        let opt = |v: Option<f64>| v.map(float).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            self.ensemble,
            self.operator,
            self.kind,
            float(self.commutant_residual),
            opt(self.reconstruction_gap),
            opt(self.symbol_error),
            self.pass
        );
    }
}

/// Writes report files into one directory and remembers their names.
pub struct Writer {
    dir: PathBuf,
    emit: Emit,
    written: Vec<String>,
}

impl Writer {
    pub fn new(dir: &Path, emit: Emit) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Writer {
            dir: dir.to_path_buf(),
            emit,
            written: Vec::new(),
        })
    }

    pub fn table<R: CsvRow>(&mut self, stem: &str, rows: &[R]) -> Result<()> {
        let body = match self.emit {
            Emit::Csv => {
                let mut s = format!("{}\n", R::HEADER);
                rows.iter().for_each(|r| r.csv(&mut s));
                s
            }
            Emit::Json => json_text(&rows),
        };
        self.write(&format!("{stem}.{}", self.emit.extension()), body.as_bytes())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write(name, json_text(value).as_bytes())
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&self.dir.join(name), bytes)?;
        log::info!("wrote {name}");
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }
}

fn json_text<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report values serialize");
    s.push('\n');
    s
}
