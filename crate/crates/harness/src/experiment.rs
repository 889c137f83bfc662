//! Batch driver: every (input, w, algorithm, preset) cell is quantized,
//! solved and scored independently.
//!
//! Frame geometry follows the reference setup (Hann window of 8192 samples,
//! hop 2048, 16384 channels at 44.1 kHz). Other rates scale the window by the
//! nearest power of two of `rate / 44100`; inputs shorter than four windows
//! halve it until they fit, down to 16 samples. Hop stays at a quarter of the
//! window and the channel count at twice the window.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;

use dequant::{quantize, run_solver, Algorithm, Config64, EvalReport, Frame64};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{emit_report, CsvSink, ReportFormat, ResultRow};
use crate::spec::{ExperimentSpec, InputSource};
use crate::synth::synth_test_signal;
use crate::wav::load_wav;

pub const REFERENCE_RATE: u32 = 44_100;
pub const REFERENCE_WINDOW: usize = 8192;
pub const MIN_WINDOW: usize = 16;

pub const CSV_FILE: &str = "results.csv";
pub const JSON_FILE: &str = "report.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Geometry {
    pub window_len: usize,
    pub hop: usize,
    pub channels: usize,
}

impl Geometry {
    pub fn new(window_len: usize) -> Self {
        Self {
            window_len,
            hop: window_len / 4,
            channels: 2 * window_len,
        }
    }

    pub fn frame(&self, signal_len: usize) -> Result<Frame64> {
        Ok(Frame64::new(self.window_len, self.hop, self.channels, signal_len)?)
    }
}

pub fn geometry_for(sample_rate: u32, signal_len: usize) -> Geometry {
    let ratio = f64::from(sample_rate.max(1)) / f64::from(REFERENCE_RATE);
    let exponent = (REFERENCE_WINDOW as f64 * ratio).log2().round().clamp(4.0, 30.0) as u32;
    let mut window = (1usize << exponent).max(MIN_WINDOW);
    while window > MIN_WINDOW && 4 * window > signal_len {
        window /= 2;
    }
    Geometry::new(window)
}

/// A peak-normalized input together with its frame.
pub struct PreparedInput {
    pub id: String,
    pub samples: Vec<f64>,
    pub frame: Frame64,
}

pub fn prepare_input(input: &InputSource) -> Result<PreparedInput> {
    let mut signal = match input {
        InputSource::File { path } => load_wav(path)?,
        InputSource::Synthetic(d) => synth_test_signal(d)?,
    };
    if dequant::signal::peak_normalize(&mut signal.samples) == 0.0 {
        return Err(Error::Spec(format!("{input} is silent")));
    }
    let frame = geometry_for(signal.sample_rate, signal.len()).frame(signal.len())?;
    Ok(PreparedInput {
        id: input.to_string(),
        samples: signal.samples,
        frame,
    })
}

/// Quantizes, solves and scores one cell. Never panics; failures become
/// flagged rows.
pub fn run_cell(input: &PreparedInput, w: u32, cfg: &Config64) -> ResultRow {
    let mut row = ResultRow {
        input: input.id.clone(),
        w,
        algorithm: cfg.algorithm,
        iterations: cfg.max_iters,
        delta_sdr_db: None,
        sdr_db: None,
        consistent: false,
        wall_time_s: 0.0,
        params: describe(cfg),
        error: None,
        odg: None,
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| -> Result<(EvalReport, f64)> {
        let obs = quantize(&input.samples, w)?;
        let run = run_solver(&obs, &input.frame, cfg, None)?;
        let report = EvalReport::new(
            &input.samples,
            &obs,
            &run.final_signal,
            run.consistent,
            run.iterations_done,
        )?;
        Ok((report, run.wall_time))
    }));
    match outcome {
        Ok(Ok((report, wall))) => {
            row.delta_sdr_db = Some(report.delta_sdr);
            row.sdr_db = Some(report.sdr_reconstructed);
            row.consistent = report.consistent;
            row.wall_time_s = wall;
        }
        Ok(Err(e)) => row.error = Some(e.to_string()),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "solver panicked".into());
            row.error = Some(format!("panic: {msg}"));
        }
    }
    row
}

fn describe(cfg: &Config64) -> String {
    cfg.describe()
        .into_iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Cell {
    input: usize,
    w: u32,
    algorithm: Algorithm,
    iterations: usize,
}

fn cells(spec: &ExperimentSpec) -> Vec<Cell> {
    let mut out = Vec::new();
    for input in 0..spec.inputs.len() {
        for &w in &spec.word_lengths {
            for &algorithm in &spec.algorithms {
                for &iterations in &spec.iteration_presets {
                    out.push(Cell {
                        input,
                        w,
                        algorithm,
                        iterations,
                    });
                }
            }
        }
    }
    out
}

/// Runs every cell and hands rows to `on_row` in spec order as soon as all
/// earlier rows are done. Returns the rows in the same order.
pub fn run_experiment_with(
    spec: &ExperimentSpec,
    mut on_row: impl FnMut(&ResultRow) -> Result<()>,
) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let prepared: Vec<std::result::Result<PreparedInput, String>> = spec
        .inputs
        .iter()
        .map(|i| prepare_input(i).map_err(|e| e.to_string()))
        .collect();
    let cells = cells(spec);
    let evaluate = |cell: &Cell| -> ResultRow {
        let cfg = spec.config(cell.algorithm, cell.iterations);
        match &prepared[cell.input] {
            Ok(p) => run_cell(p, cell.w, &cfg),
            Err(e) => ResultRow {
                input: spec.inputs[cell.input].to_string(),
                w: cell.w,
                algorithm: cell.algorithm,
                iterations: cell.iterations,
                delta_sdr_db: None,
                sdr_db: None,
                consistent: false,
                wall_time_s: 0.0,
                params: describe(&cfg),
                error: Some(e.clone()),
                odg: None,
            },
        }
    };

    let mut rows = Vec::with_capacity(cells.len());
    if spec.jobs <= 1 {
        for cell in &cells {
            let row = evaluate(cell);
            on_row(&row)?;
            rows.push(row);
        }
        return Ok(rows);
    }

    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let (tx, rx) = mpsc::channel::<(usize, ResultRow)>();
    let mut sink_error = None;
    std::thread::scope(|scope| {
        for _ in 0..spec.jobs.min(cells.len()) {
            let tx = tx.clone();
            let (next, abort, cells, evaluate) = (&next, &abort, &cells, &evaluate);
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= cells.len() || abort.load(Ordering::Relaxed) {
                    break;
                }
                if tx.send((i, evaluate(&cells[i]))).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        let mut pending = BTreeMap::new();
        for (i, row) in rx {
            pending.insert(i, row);
            while let Some(row) = pending.remove(&rows.len()) {
                if sink_error.is_none() {
                    if let Err(e) = on_row(&row) {
                        sink_error = Some(e);
                        abort.store(true, Ordering::Relaxed);
                    }
                }
                rows.push(row);
            }
        }
    });
    match sink_error {
        Some(e) => Err(e),
        None => Ok(rows),
    }
}

/// Runs the experiment, streaming rows to `results.csv` in the output
/// directory and writing `report.json` with the summary at the end.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let dir = &spec.output_dir;
    std::fs::create_dir_all(dir).map_err(crate::error::io_err(dir))?;
    let mut sink = CsvSink::create(dir.join(CSV_FILE))?;
    let rows = run_experiment_with(spec, |row| sink.push(row))?;
    emit_report(&rows, ReportFormat::Json, dir.join(JSON_FILE))?;
    Ok(rows)
}
