//! File formats, test signals and the batch experiment driver around the
//! `dequant` solvers. The `dequant` binary exposes them on the command line.

pub mod error;
pub mod experiment;
pub mod report;
pub mod spec;
pub mod synth;
pub mod wav;

pub use error::{Error, Result};
pub use experiment::{geometry_for, run_experiment, run_experiment_with, Geometry};
pub use report::{emit_report, summarize, Report, ReportFormat, ResultRow, SummaryRow};
pub use spec::{ExperimentSpec, InputSource, ParamOverrides};
pub use synth::{synth_test_signal, SignalDescriptor};
pub use wav::{load_wav, save_wav, WavFormat};
