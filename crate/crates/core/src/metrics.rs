//! Signal-to-distortion ratio.
//!
//! `SDR = 10 log10(||ref||^2 / ||ref - est||^2)` in dB. A perfect estimate
//! yields `+inf`.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::quant::QuantizedObservation;
use crate::real::Real;

pub fn sdr<T: Real>(reference: &[T], estimate: &[T]) -> Result<f64> {
    check_len(reference.len(), estimate.len())?;
    let (signal, noise) = reference
        .iter()
        .zip(estimate)
        .fold((0.0f64, 0.0f64), |(s, e), (&r, &x)| {
            let r = r.as_f64();
            let d = r - x.as_f64();
            (s + r * r, e + d * d)
        });
    if signal == 0.0 {
        return Err(Error::ZeroReference);
    }
    if noise == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (signal / noise).log10())
}

/// SDR improvement of `estimate` over the quantized observation.
pub fn delta_sdr<T: Real>(reference: &[T], obs: &QuantizedObservation<T>, estimate: &[T]) -> Result<f64> {
    let before = sdr(reference, obs.samples())?;
    let after = sdr(reference, estimate)?;
    Ok(after - before)
}

/// Evaluation of one reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub sdr_quantized: f64,
    pub sdr_reconstructed: f64,
    pub delta_sdr: f64,
    pub consistent: bool,
    pub iterations: usize,
}

impl EvalReport {
    pub fn new<T: Real>(
        reference: &[T],
        obs: &QuantizedObservation<T>,
        estimate: &[T],
        consistent: bool,
        iterations: usize,
    ) -> Result<Self> {
        let sdr_quantized = sdr(reference, obs.samples())?;
        let sdr_reconstructed = sdr(reference, estimate)?;
        Ok(Self {
            sdr_quantized,
            sdr_reconstructed,
            delta_sdr: sdr_reconstructed - sdr_quantized,
            consistent,
            iterations,
        })
    }
}
