//! Result rows, their CSV/JSON forms, and the per-(algorithm, w) summary.
//!
//! CSV columns:
//!
//! ```text
//! input,w,algorithm,iterations,delta_sdr_db,sdr_db,consistent,wall_time_s,params
//! ```
//!
//! `params` lists the hyperparameters the algorithm reads as `name=value`
//! pairs separated by `;`. A failed cell has empty numeric fields,
//! `consistent = false` and `params = "error: <message>"`.
//!
//! The JSON report is `{"rows": [...], "summary": [...]}`; each summary entry
//! holds the mean ΔSDR over the successful rows sharing an algorithm, a word
//! length and an iteration preset.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use dequant::Algorithm;
use serde::{Deserialize, Serialize};

use crate::error::{io_err, Error, Result};

pub const CSV_HEADER: [&str; 9] = [
    "input",
    "w",
    "algorithm",
    "iterations",
    "delta_sdr_db",
    "sdr_db",
    "consistent",
    "wall_time_s",
    "params",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub input: String,
    pub w: u32,
    pub algorithm: Algorithm,
    /// Iteration preset of the cell.
    pub iterations: usize,
    pub delta_sdr_db: Option<f64>,
    pub sdr_db: Option<f64>,
    pub consistent: bool,
    pub wall_time_s: f64,
    pub params: String,
    /// Set when the cell failed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Slot for an externally computed perceptual score.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub odg: Option<f64>,
}

impl ResultRow {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }

    fn csv_record(&self) -> [String; 9] {
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        let params = match &self.error {
            Some(e) => format!("error: {e}"),
            None => self.params.clone(),
        };
        [
            self.input.clone(),
            self.w.to_string(),
            self.algorithm.to_string(),
            self.iterations.to_string(),
            opt(self.delta_sdr_db),
            opt(self.sdr_db),
            self.consistent.to_string(),
            self.wall_time_s.to_string(),
            params,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: Algorithm,
    pub w: u32,
    pub iterations: usize,
    /// Mean over successful rows; `None` when every row failed.
    pub mean_delta_sdr_db: Option<f64>,
    pub rows: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
}

impl Report {
    pub fn new(rows: Vec<ResultRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyReport);
        }
        let summary = summarize(&rows);
        Ok(Self { rows, summary })
    }
}

/// Mean ΔSDR per (algorithm, w, iterations), ordered by those keys.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(Algorithm, u32, usize), (f64, usize, usize)> = BTreeMap::new();
    for r in rows {
        let g = groups.entry((r.algorithm, r.w, r.iterations)).or_default();
        match r.delta_sdr_db {
            Some(d) if !r.failed() => {
                g.0 += d;
                g.1 += 1;
            }
            _ => g.2 += 1,
        }
    }
    groups
        .into_iter()
        .map(|((algorithm, w, iterations), (sum, ok, failed))| SummaryRow {
            algorithm,
            w,
            iterations,
            mean_delta_sdr_db: (ok > 0).then(|| sum / ok as f64),
            rows: ok + failed,
            failed,
        })
        .collect()
}

/// Streams rows to a CSV file as they arrive.
pub struct CsvSink<W: Write> {
    writer: csv::Writer<W>,
}

impl CsvSink<BufWriter<File>> {
    pub fn create(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::create(path).map_err(io_err(path))?;
        CsvSink::new(BufWriter::new(file))
    }
}

impl<W: Write> CsvSink<W> {
    pub fn new(inner: W) -> Result<Self> {
        let mut writer = csv::Writer::from_writer(inner);
        writer.write_record(CSV_HEADER)?;
        writer.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(Self { writer })
    }

    /// Writes and flushes one row.
    pub fn push(&mut self, row: &ResultRow) -> Result<()> {
        self.writer.write_record(row.csv_record())?;
        self.writer.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    pub fn into_inner(self) -> Result<W> {
        self.writer.into_inner().map_err(|e| Error::Csv(e.into_error().into()))
    }
}

pub fn rows_to_csv(rows: &[ResultRow]) -> Result<String> {
    let mut sink = CsvSink::new(Vec::new())?;
    for r in rows {
        sink.push(r)?;
    }
    Ok(String::from_utf8(sink.into_inner()?).expect("csv output is utf-8"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Writes `rows` (CSV) or the full report with summary (JSON).
pub fn emit_report(rows: &[ResultRow], format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let report = Report::new(rows.to_vec())?;
    let text = match format {
        ReportFormat::Csv => rows_to_csv(&report.rows)?,
        ReportFormat::Json => serde_json::to_string_pretty(&report)?,
    };
    std::fs::write(path, text).map_err(io_err(path))
}

pub fn read_json_report(path: impl AsRef<Path>) -> Result<Report> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    Ok(serde_json::from_str(&text)?)
}
