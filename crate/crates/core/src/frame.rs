//! Parseval-tight discrete Gabor transform.
//!
//! The transform is periodic on a zero-padded signal of length `padded_len`.
//! Frame `m` covers samples `m * hop .. m * hop + window_len` (modulo the
//! padded length) and uses a frame-local phase reference:
//!
//! ```text
//! c[m, k] = sum_{l < window_len} x[(m * hop + l) mod P] g[l] exp(-2 pi i k l / M)
//! ```
//!
//! with `M = channels >= window_len`. In this "painless" regime the frame
//! operator `A*A` is diagonal with entries `M * sum_j g[l + j * hop]^2`, so
//! dividing the prototype window by the square root of that periodization
//! makes the system Parseval-tight: `A*A = Id` and `||A x|| = ||x||`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};

use crate::error::{check_len, Error, Result};
use crate::real::Real;

/// Analysis/synthesis operator pair of a tight Gabor system.
///
/// Immutable after construction; `analysis` and `synthesis` take `&self` and
/// may be called from several threads at once.
#[derive(Clone)]
pub struct GaborFrame<T: Real> {
    window: Vec<T>,
    hop: usize,
    channels: usize,
    signal_len: usize,
    padded_len: usize,
    num_frames: usize,
    forward: Arc<dyn RealToComplex<T>>,
    inverse: Arc<dyn ComplexToReal<T>>,
}

impl<T: Real> fmt::Debug for GaborFrame<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaborFrame")
            .field("window_len", &self.window.len())
            .field("hop", &self.hop)
            .field("channels", &self.channels)
            .field("signal_len", &self.signal_len)
            .field("padded_len", &self.padded_len)
            .field("num_frames", &self.num_frames)
            .finish()
    }
}

/// Hann window sampled at half-integer points, `sin^2(pi (l + 1/2) / L)`.
///
/// Unlike the usual periodic Hann it has no zero sample, so the tight
/// normalization stays defined for every hop, including `hop == window_len`.
pub fn hann<T: Real>(len: usize) -> Vec<T> {
    let n = T::from_usize_lossy(len);
    let half = T::lit(0.5);
    (0..len)
        .map(|l| {
            let s = (T::PI() * (T::from_usize_lossy(l) + half) / n).sin();
            s * s
        })
        .collect()
}

impl<T: Real> GaborFrame<T> {
    /// Builds a tight frame from a Hann prototype.
    pub fn new(window_len: usize, hop: usize, channels: usize, signal_len: usize) -> Result<Self> {
        Self::with_prototype(hann(window_len), hop, channels, signal_len)
    }

    /// Builds a tight frame from an arbitrary nonnegative prototype window.
    ///
    /// The prototype is rescaled to the canonical tight window
    /// `h / sqrt(M * sum_j h(. - j * hop)^2)`.
    pub fn with_prototype(prototype: Vec<T>, hop: usize, channels: usize, signal_len: usize) -> Result<Self> {
        let window_len = prototype.len();
        if window_len == 0 || hop == 0 || channels == 0 || signal_len == 0 {
            return Err(Error::Geometry(format!(
                "all sizes must be positive (window_len={window_len}, hop={hop}, channels={channels}, signal_len={signal_len})"
            )));
        }
        if hop > window_len {
            return Err(Error::Geometry(format!(
                "hop {hop} exceeds window length {window_len}; the frame would not cover the signal"
            )));
        }
        if channels < window_len {
            return Err(Error::Geometry(format!(
                "channels {channels} < window length {window_len}"
            )));
        }

        // Pad to a multiple of the hop, and never below one window so that a
        // window does not wrap onto itself.
        let padded_len = signal_len.max(window_len).div_ceil(hop) * hop;
        let num_frames = padded_len / hop;

        let m = T::from_usize_lossy(channels);
        let mut periodization = vec![T::zero(); hop];
        for (l, &h) in prototype.iter().enumerate() {
            periodization[l % hop] = periodization[l % hop] + h * h;
        }
        if let Some(r) = periodization.iter().position(|&p| !(p > T::zero())) {
            return Err(Error::Geometry(format!(
                "window periodization vanishes at residue {r}; no tight normalization exists"
            )));
        }
        let window = prototype
            .iter()
            .enumerate()
            .map(|(l, &h)| h / (m * periodization[l % hop]).sqrt())
            .collect();

        let mut planner = RealFftPlanner::new();
        let forward = planner.plan_fft_forward(channels);
        let inverse = planner.plan_fft_inverse(channels);

        Ok(Self {
            window,
            hop,
            channels,
            signal_len,
            padded_len,
            num_frames,
            forward,
            inverse,
        })
    }

    /// The canonical tight window.
    pub fn window(&self) -> &[T] {
        &self.window
    }

    pub fn window_len(&self) -> usize {
        self.window.len()
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Length of the signal the frame was built for (before padding).
    pub fn signal_len(&self) -> usize {
        self.signal_len
    }

    pub fn padded_len(&self) -> usize {
        self.padded_len
    }

    pub fn num_frames(&self) -> usize {
        self.num_frames
    }

    /// Number of coefficients `Q = num_frames * channels`.
    pub fn coeff_count(&self) -> usize {
        self.num_frames * self.channels
    }

    /// Redundancy `Q / P`.
    pub fn redundancy(&self) -> f64 {
        self.coeff_count() as f64 / self.padded_len as f64
    }

    pub fn zero_grid(&self) -> CoefficientGrid<T> {
        CoefficientGrid::zeros(self.num_frames, self.channels)
    }

    /// Analysis operator `A`. Signals shorter than `padded_len` are zero-padded.
    pub fn analysis(&self, x: &[T]) -> Result<CoefficientGrid<T>> {
        let mut out = self.zero_grid();
        self.analysis_into(x, &mut out)?;
        Ok(out)
    }

    /// Analysis into a preallocated grid.
    pub fn analysis_into(&self, x: &[T], out: &mut CoefficientGrid<T>) -> Result<()> {
        if x.len() > self.padded_len {
            return Err(Error::LengthMismatch {
                expected: self.padded_len,
                got: x.len(),
            });
        }
        self.check_grid(out)?;
        let half = self.channels / 2 + 1;
        let mut frame = self.forward.make_input_vec();
        let mut scratch = self.forward.make_scratch_vec();
        for (m, block) in out.values.chunks_exact_mut(self.channels).enumerate() {
            let start = m * self.hop;
            frame.iter_mut().for_each(|s| *s = T::zero());
            for (l, (slot, &g)) in frame.iter_mut().zip(&self.window).enumerate() {
                let n = (start + l) % self.padded_len;
                *slot = g * x.get(n).copied().unwrap_or_else(T::zero);
            }
            self.forward
                .process_with_scratch(&mut frame, &mut block[..half], &mut scratch)
                .map_err(|e| Error::Geometry(e.to_string()))?;
            // Real input: the upper bins mirror the lower ones.
            for k in half..self.channels {
                block[k] = block[self.channels - k].conj();
            }
        }
        Ok(())
    }

    /// Synthesis operator `A*`, the exact adjoint of [`analysis`](Self::analysis).
    ///
    /// Returns a signal of length `padded_len`.
    pub fn synthesis(&self, c: &CoefficientGrid<T>) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); self.padded_len];
        self.synthesis_into(c, &mut out)?;
        Ok(out)
    }

    /// Synthesis into a preallocated buffer of length `padded_len`.
    pub fn synthesis_into(&self, c: &CoefficientGrid<T>, out: &mut [T]) -> Result<()> {
        self.check_grid(c)?;
        check_len(self.padded_len, out.len())?;
        out.iter_mut().for_each(|v| *v = T::zero());
        let mch = self.channels;
        let mut spectrum = self.inverse.make_input_vec();
        let mut block = self.inverse.make_output_vec();
        let mut scratch = self.inverse.make_scratch_vec();
        let half = T::lit(0.5);
        for (m, coeffs) in c.values.chunks_exact(mch).enumerate() {
            // Re(IDFT(c)) is the real IDFT of the Hermitian part of c.
            for (k, s) in spectrum.iter_mut().enumerate() {
                *s = (coeffs[k] + coeffs[(mch - k) % mch].conj()) * half;
            }
            spectrum[0].im = T::zero();
            if mch.is_multiple_of(2) {
                spectrum[mch / 2].im = T::zero();
            }
            self.inverse
                .process_with_scratch(&mut spectrum, &mut block, &mut scratch)
                .map_err(|e| Error::Geometry(e.to_string()))?;
            let start = m * self.hop;
            for (l, (&g, &b)) in self.window.iter().zip(&block).enumerate() {
                let n = (start + l) % self.padded_len;
                out[n] = out[n] + g * b;
            }
        }
        Ok(())
    }

    pub fn check_grid(&self, c: &CoefficientGrid<T>) -> Result<()> {
        if c.num_frames != self.num_frames || c.channels != self.channels {
            return Err(Error::Geometry(format!(
                "grid is {}x{}, frame expects {}x{}",
                c.num_frames, c.channels, self.num_frames, self.channels
            )));
        }
        Ok(())
    }
}

/// Complex time-frequency coefficients laid out frame-major
/// (`values[m * channels + k]`).
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientGrid<T> {
    values: Vec<Complex<T>>,
    num_frames: usize,
    channels: usize,
}

impl<T: Real> CoefficientGrid<T> {
    pub fn zeros(num_frames: usize, channels: usize) -> Self {
        Self {
            values: vec![Complex::zero(); num_frames * channels],
            num_frames,
            channels,
        }
    }

    pub fn from_values(values: Vec<Complex<T>>, num_frames: usize, channels: usize) -> Result<Self> {
        check_len(num_frames * channels, values.len())?;
        Ok(Self {
            values,
            num_frames,
            channels,
        })
    }

    pub fn num_frames(&self) -> usize {
        self.num_frames
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, frame: usize, channel: usize) -> Complex<T> {
        self.values[frame * self.channels + channel]
    }

    pub fn frame(&self, m: usize) -> &[Complex<T>] {
        &self.values[m * self.channels..(m + 1) * self.channels]
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    /// Same geometry, new values.
    pub fn with_values(&self, values: Vec<Complex<T>>) -> Result<Self> {
        Self::from_values(values, self.num_frames, self.channels)
    }

    pub fn l1_norm(&self) -> T {
        self.values.iter().map(|v| v.norm()).sum()
    }

    pub fn norm_sqr(&self) -> T {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// Real inner product `Re <self, other>` on `C^Q`.
    pub fn inner(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    pub fn count_nonzero(&self) -> usize {
        self.values.iter().filter(|v| !v.is_zero()).count()
    }
}
