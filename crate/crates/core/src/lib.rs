//! Reconstruction of audio signals from low bit-depth uniform quantization.
//!
//! The crate is organised bottom-up:
//!
//! * [`frame`]: a Parseval-tight discrete Gabor transform (analysis `A`,
//!   synthesis `A*`, with `A*A = Id`).
//! * [`quant`]: the mid-riser quantizer and the box of consistent signals,
//!   with projections onto it in the signal and coefficient domains.
//! * [`prox`]: thresholding and proximal kernels shared by the solvers.
//! * [`solvers`]: ten dequantization algorithms (seven convex proximal
//!   splitting schemes and three SPADQ heuristics).
//! * [`metrics`]: SDR and SDR improvement.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar to `f64`, which is what the experiments
//! use.

// `!(a <= b)` rejects NaN along with out-of-order values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod frame;
pub mod metrics;
pub mod prox;
pub mod quant;
pub mod real;
pub mod signal;
pub mod solvers;

pub use error::{Error, Result};
pub use frame::{CoefficientGrid, GaborFrame};
pub use metrics::{delta_sdr, sdr, EvalReport};
pub use quant::{quantization_step, quantize, ConsistencySet, QuantizedObservation};
pub use real::Real;
pub use signal::Signal;
pub use solvers::{run_solver, run_solver_from, Algorithm, SolverConfig, SolverRun, StopReason, TraceEntry};

pub use num_complex::Complex;

/// Double precision Gabor frame.
pub type Frame64 = GaborFrame<f64>;
/// Single precision Gabor frame.
pub type Frame32 = GaborFrame<f32>;
/// Double precision coefficient grid.
pub type Grid64 = CoefficientGrid<f64>;
/// Single precision coefficient grid.
pub type Grid32 = CoefficientGrid<f32>;
/// Double precision quantized observation.
pub type Observation64 = QuantizedObservation<f64>;
/// Double precision consistency box.
pub type Box64 = ConsistencySet<f64>;
/// Double precision solver configuration.
pub type Config64 = SolverConfig<f64>;
/// Double precision solver result.
pub type Run64 = SolverRun<f64>;
/// Double precision signal.
pub type Signal64 = Signal<f64>;
