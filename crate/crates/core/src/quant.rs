//! Uniform mid-riser quantization and the set of consistent signals.
//!
//! With word length `w` the step is `delta = 2^(1 - w)` and a sample maps to
//! `sgn+(x) * delta * (floor(|x| / delta) + 1/2)`, where `sgn+(0) = +1`.
//! Samples at exactly full scale would land on `+-(1 + delta/2)`; they are
//! clamped to the outermost level `+-(1 - delta/2)`.
//!
//! A signal is consistent with an observation when every sample stays inside
//! its quantization interval. All projections use the closed box
//! `[xq - delta/2, xq + delta/2]`.

use crate::error::{check_len, param, Error, Result};
use crate::frame::{CoefficientGrid, GaborFrame};
use crate::real::Real;

pub const MIN_WORD_LENGTH: u32 = 2;
pub const MAX_WORD_LENGTH: u32 = 32;

/// Default absolute tolerance for [`is_consistent`].
pub const CONSISTENCY_TOL: f64 = 1e-9;

/// Quantization step `2^(1 - w)`. Accepts any `w >= 1`.
pub fn quantization_step<T: Real>(w: u32) -> Result<T> {
    if !(1..=MAX_WORD_LENGTH).contains(&w) {
        return Err(Error::WordLength(w));
    }
    Ok(T::lit(2.0).powi(1 - w as i32))
}

/// A quantized signal together with its word length.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedObservation<T> {
    xq: Vec<T>,
    word_length: u32,
    delta: T,
}

impl<T: Real> QuantizedObservation<T> {
    /// Wraps already quantized samples, checking that each one sits on a
    /// mid-riser level for word length `w`.
    pub fn from_levels(xq: Vec<T>, w: u32) -> Result<Self> {
        let delta = checked_step::<T>(w)?;
        if xq.is_empty() {
            return Err(Error::EmptySignal);
        }
        let tol = T::lit(1e-12);
        let half = T::lit(0.5);
        for (index, &v) in xq.iter().enumerate() {
            let k = v / delta - half;
            if !((k - k.round()).abs() <= tol) || !(v.abs() < T::one()) {
                return Err(Error::NotOnLevel { index });
            }
        }
        Ok(Self {
            xq,
            word_length: w,
            delta,
        })
    }

    pub fn samples(&self) -> &[T] {
        &self.xq
    }

    pub fn word_length(&self) -> u32 {
        self.word_length
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    /// Length of the observed signal.
    pub fn original_len(&self) -> usize {
        self.xq.len()
    }

    pub fn len(&self) -> usize {
        self.xq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xq.is_empty()
    }

    pub fn consistency_set(&self) -> ConsistencySet<T> {
        let h = self.delta * T::lit(0.5);
        ConsistencySet {
            lower: self.xq.iter().map(|&v| v - h).collect(),
            upper: self.xq.iter().map(|&v| v + h).collect(),
        }
    }
}

fn checked_step<T: Real>(w: u32) -> Result<T> {
    if w < MIN_WORD_LENGTH {
        return Err(Error::WordLength(w));
    }
    quantization_step(w)
}

/// Quantizes a single sample with step `delta`.
pub fn quantize_sample<T: Real>(x: T, delta: T) -> T {
    let half = T::lit(0.5);
    let sign = if x >= T::zero() { T::one() } else { -T::one() };
    let level = delta * ((x.abs() / delta).floor() + half);
    let top = T::one() - delta * half;
    sign * level.min(top)
}

/// Quantizes a peak-normalized signal with word length `w`.
pub fn quantize<T: Real>(x: &[T], w: u32) -> Result<QuantizedObservation<T>> {
    let delta = checked_step::<T>(w)?;
    if x.is_empty() {
        return Err(Error::EmptySignal);
    }
    let limit = T::one() + T::lit(1e-9);
    if let Some(&bad) = x.iter().find(|v| !(v.abs() <= limit)) {
        return Err(Error::OutOfRange(bad.as_f64()));
    }
    Ok(QuantizedObservation {
        xq: x.iter().map(|&v| quantize_sample(v, delta)).collect(),
        word_length: w,
        delta,
    })
}

/// The box `Gamma = { x : lower <= x <= upper }`.
///
/// Bounds may be infinite; the solvers use that for padding samples that
/// carry no observation.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencySet<T> {
    lower: Vec<T>,
    upper: Vec<T>,
}

/// Box of the signals consistent with `obs`.
pub fn box_of<T: Real>(obs: &QuantizedObservation<T>) -> Result<ConsistencySet<T>> {
    if obs.is_empty() {
        return Err(Error::EmptySignal);
    }
    Ok(obs.consistency_set())
}

impl<T: Real> ConsistencySet<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        check_len(lower.len(), upper.len())?;
        if let Some(i) = lower.iter().zip(&upper).position(|(l, u)| !(l <= u)) {
            return Err(param("box", format!("lower bound exceeds upper bound at sample {i}")));
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    /// Extends the box to `len` samples; the extra samples are unconstrained.
    pub fn extended_to(&self, len: usize) -> Self {
        let mut lower = self.lower.clone();
        let mut upper = self.upper.clone();
        if len > lower.len() {
            lower.resize(len, T::neg_infinity());
            upper.resize(len, T::infinity());
        }
        Self { lower, upper }
    }

    /// Projects `x` onto the box in place.
    pub fn project_in_place(&self, x: &mut [T]) -> Result<()> {
        check_len(self.len(), x.len())?;
        for ((v, &l), &u) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.max(l).min(u);
        }
        Ok(())
    }

    /// Squared Euclidean distance from `x` to the box.
    pub fn dist_sq(&self, x: &[T]) -> Result<T> {
        check_len(self.len(), x.len())?;
        Ok(x.iter()
            .zip(&self.lower)
            .zip(&self.upper)
            .map(|((&v, &l), &u)| {
                let d = v - v.max(l).min(u);
                d * d
            })
            .sum())
    }
}

/// Nearest point of the closed box.
pub fn project_gamma<T: Real>(x: &[T], set: &ConsistencySet<T>) -> Result<Vec<T>> {
    let mut out = x.to_vec();
    set.project_in_place(&mut out)?;
    Ok(out)
}

/// Projection onto `Gamma* = { c : A* c in Gamma }` for a Parseval frame:
/// `c + A(proj(A* c) - A* c)`.
///
/// The box may be shorter than the frame's padded length; missing samples are
/// treated as unconstrained.
pub fn project_gamma_star<T: Real>(
    c: &CoefficientGrid<T>,
    set: &ConsistencySet<T>,
    frame: &GaborFrame<T>,
) -> Result<CoefficientGrid<T>> {
    frame.check_grid(c)?;
    let set = fit_to_frame(set, frame)?;
    let mut out = c.clone();
    let mut scratch = StarScratch::new(frame);
    project_gamma_star_into(&mut out, &set, frame, &mut scratch)?;
    Ok(out)
}

/// Buffers for [`project_gamma_star_into`].
pub(crate) struct StarScratch<T: Real> {
    /// `A* c` of the input.
    pub raw: Vec<T>,
    /// `proj_Gamma(A* c)`, which is also `A*` of the output.
    pub proj: Vec<T>,
    diff: Vec<T>,
    correction: CoefficientGrid<T>,
}

impl<T: Real> StarScratch<T> {
    pub fn new(frame: &GaborFrame<T>) -> Self {
        let p = frame.padded_len();
        Self {
            raw: vec![T::zero(); p],
            proj: vec![T::zero(); p],
            diff: vec![T::zero(); p],
            correction: frame.zero_grid(),
        }
    }
}

/// In-place `proj_Gamma*` with a padded-length box.
pub(crate) fn project_gamma_star_into<T: Real>(
    c: &mut CoefficientGrid<T>,
    set: &ConsistencySet<T>,
    frame: &GaborFrame<T>,
    s: &mut StarScratch<T>,
) -> Result<()> {
    frame.synthesis_into(c, &mut s.raw)?;
    s.proj.copy_from_slice(&s.raw);
    set.project_in_place(&mut s.proj)?;
    for ((d, &p), &r) in s.diff.iter_mut().zip(&s.proj).zip(&s.raw) {
        *d = p - r;
    }
    frame.analysis_into(&s.diff, &mut s.correction)?;
    c.values_mut()
        .iter_mut()
        .zip(s.correction.values())
        .for_each(|(v, &d)| *v = *v + d);
    Ok(())
}

pub(crate) fn fit_to_frame<T: Real>(set: &ConsistencySet<T>, frame: &GaborFrame<T>) -> Result<ConsistencySet<T>> {
    if set.len() > frame.padded_len() {
        return Err(Error::LengthMismatch {
            expected: frame.padded_len(),
            got: set.len(),
        });
    }
    Ok(set.extended_to(frame.padded_len()))
}

/// True when every sample lies in `[lower - tol, upper + tol]`.
/// Signals of the wrong length are never consistent.
pub fn is_consistent<T: Real>(x: &[T], set: &ConsistencySet<T>, tol: T) -> bool {
    x.len() == set.len()
        && x.iter()
            .zip(&set.lower)
            .zip(&set.upper)
            .all(|((&v, &l), &u)| v >= l - tol && v <= u + tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_values() {
        assert_eq!(quantization_step::<f64>(2).unwrap(), 0.5);
        assert_eq!(quantization_step::<f64>(8).unwrap(), 0.0078125);
        assert_eq!(quantization_step::<f64>(1).unwrap(), 1.0);
        assert_eq!(quantization_step::<f64>(0), Err(Error::WordLength(0)));
    }

    #[test]
    fn hand_evaluated_levels() {
        let q = quantize(&[0.3, 0.0, -0.3, 1.0, -1.0], 3).unwrap();
        assert_eq!(q.delta(), 0.25);
        assert_eq!(q.samples(), &[0.375, 0.125, -0.375, 0.875, -0.875]);
    }

    #[test]
    fn quantize_errors() {
        assert_eq!(quantize::<f64>(&[], 4), Err(Error::EmptySignal));
        assert!(matches!(quantize(&[0.5, 1.01], 4), Err(Error::OutOfRange(_))));
        assert!(quantize(&[f64::NAN], 4).is_err());
        assert_eq!(quantize(&[0.1], 1), Err(Error::WordLength(1)));
    }

    #[test]
    fn from_levels_validates() {
        assert!(QuantizedObservation::from_levels(vec![0.375, -0.125], 3).is_ok());
        assert_eq!(
            QuantizedObservation::from_levels(vec![0.375, 0.3], 3),
            Err(Error::NotOnLevel { index: 1 })
        );
        // 1.125 is a mid-riser multiple but outside the representable range.
        assert!(QuantizedObservation::from_levels(vec![1.125], 3).is_err());
        assert!(QuantizedObservation::<f64>::from_levels(vec![], 3).is_err());
    }

    #[test]
    fn box_bounds() {
        let obs = QuantizedObservation::from_levels(vec![0.375, -0.125], 3).unwrap();
        let b = box_of(&obs).unwrap();
        assert_eq!(b.lower(), &[0.25, -0.25]);
        assert_eq!(b.upper(), &[0.5, 0.0]);
    }

    #[test]
    fn projection_clamps() {
        let b = ConsistencySet::new(vec![0.25, 0.25], vec![0.5, 0.5]).unwrap();
        assert_eq!(project_gamma(&[0.9, 0.3], &b).unwrap(), vec![0.5, 0.3]);
        assert_eq!(project_gamma(&[0.0, 0.3], &b).unwrap(), vec![0.25, 0.3]);
        assert!(project_gamma(&[0.0], &b).is_err());
    }

    #[test]
    fn consistency_checks() {
        let obs = QuantizedObservation::from_levels(vec![0.375, -0.125, 0.625], 3).unwrap();
        let b = box_of(&obs).unwrap();
        assert!(is_consistent(obs.samples(), &b, 1e-9));
        let mut shifted = obs.samples().to_vec();
        shifted[1] += 0.25;
        assert!(!is_consistent(&shifted, &b, 0.1));
        assert!(is_consistent(b.upper(), &b, 0.0));
        assert!(!is_consistent(&[0.375], &b, 1.0));
    }

    #[test]
    fn extended_box_is_free_in_the_tail() {
        let b = ConsistencySet::new(vec![0.0], vec![1.0]).unwrap().extended_to(3);
        assert_eq!(project_gamma(&[2.0, -7.0, 9.0], &b).unwrap(), vec![1.0, -7.0, 9.0]);
        assert_eq!(b.dist_sq(&[2.0, -7.0, 9.0]).unwrap(), 1.0);
    }

    #[test]
    fn inverted_box_rejected() {
        assert!(ConsistencySet::new(vec![1.0], vec![0.0]).is_err());
    }
}
