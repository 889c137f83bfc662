use serde::{Deserialize, Serialize};

use crate::real::Real;

/// A mono time-domain signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal<T> {
    pub samples: Vec<T>,
    pub sample_rate: u32,
}

impl<T: Real> Signal<T> {
    pub fn new(samples: Vec<T>, sample_rate: u32) -> Self {
        Self { samples, sample_rate }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn peak(&self) -> T {
        peak(&self.samples)
    }

    /// Scales the signal so that its largest magnitude is exactly one.
    ///
    /// All-zero signals are left untouched.
    pub fn peak_normalize(&mut self) {
        peak_normalize(&mut self.samples);
    }
}

pub fn peak<T: Real>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

/// In-place peak normalization; returns the original peak.
pub fn peak_normalize<T: Real>(x: &mut [T]) -> T {
    let p = peak(x);
    if p > T::zero() {
        // Dividing (rather than multiplying by 1/p) keeps the peak sample at exactly +-1.
        x.iter_mut().for_each(|v| *v = *v / p);
    }
    p
}
