//! Thresholding and proximal kernels shared by the solvers.
//!
//! Complex thresholding acts on magnitudes and leaves phases untouched.

use std::cmp::Ordering;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{check_len, param, Error, Result};
use crate::frame::{CoefficientGrid, GaborFrame};
use crate::quant::{project_gamma_star, ConsistencySet};
use crate::real::Real;

fn check_threshold<T: Real>(tau: T) -> Result<()> {
    if tau > T::zero() && tau.is_finite() {
        Ok(())
    } else {
        Err(param("threshold", format!("must be positive and finite, got {tau}")))
    }
}

/// `v * max(1 - tau / |v|, 0)`, with zero mapped to zero.
#[inline]
pub fn soft_scalar<T: Real>(v: Complex<T>, tau: T) -> Complex<T> {
    let mag = v.norm();
    if mag <= tau {
        Complex::zero()
    } else {
        v * ((mag - tau) / mag)
    }
}

/// Complex soft thresholding.
pub fn soft_threshold<T: Real>(v: &[Complex<T>], tau: T) -> Result<Vec<Complex<T>>> {
    check_threshold(tau)?;
    Ok(v.iter().map(|&z| soft_scalar(z, tau)).collect())
}

/// `clip = Id - soft`: magnitudes are capped at `tau`.
pub fn clip<T: Real>(v: &[Complex<T>], tau: T) -> Result<Vec<Complex<T>>> {
    check_threshold(tau)?;
    Ok(v.iter().map(|&z| z - soft_scalar(z, tau)).collect())
}

/// In-place soft thresholding; `tau = 0` is the identity.
pub(crate) fn soft_in_place<T: Real>(v: &mut [Complex<T>], tau: T) {
    if tau > T::zero() {
        v.iter_mut().for_each(|z| *z = soft_scalar(*z, tau));
    }
}

/// In-place clipping; `tau = 0` maps everything to zero.
pub(crate) fn clip_in_place<T: Real>(v: &mut [Complex<T>], tau: T) {
    v.iter_mut().for_each(|z| *z = *z - soft_scalar(*z, tau));
}

/// Proximal operator of `alpha/2 * d_Gamma^2`:
/// `(alpha * proj_Gamma(z) + z) / (alpha + 1)`.
pub fn prox_dist_sq<T: Real>(z: &[T], set: &ConsistencySet<T>, alpha: T) -> Result<Vec<T>> {
    check_positive("alpha", alpha)?;
    check_len(set.len(), z.len())?;
    let mut p = z.to_vec();
    set.project_in_place(&mut p)?;
    Ok(blend(&p, z, alpha))
}

/// `(alpha * p + z) / (alpha + 1)` elementwise.
pub(crate) fn blend<T: Real>(p: &[T], z: &[T], alpha: T) -> Vec<T> {
    let denom = alpha + T::one();
    p.iter().zip(z).map(|(&p, &z)| (alpha * p + z) / denom).collect()
}

/// Proximal operator of `alpha/2 * d_Gamma*^2` in the coefficient domain:
/// `(alpha * proj_Gamma*(z) + z) / (alpha + 1)`.
pub fn prox_dist_sq_star<T: Real>(
    z: &CoefficientGrid<T>,
    set: &ConsistencySet<T>,
    frame: &GaborFrame<T>,
    alpha: T,
) -> Result<CoefficientGrid<T>> {
    check_positive("alpha", alpha)?;
    let p = project_gamma_star(z, set, frame)?;
    let denom = alpha + T::one();
    let values = p
        .values()
        .iter()
        .zip(z.values())
        .map(|(&p, &z)| (p * alpha + z) / denom)
        .collect();
    z.with_values(values)
}

/// Approximal operator of `tau * ||A .||_1`: `A* soft_tau(A x)`, truncated to
/// the length of `x`.
///
/// Exact whenever the analysis operator is unitary onto its range (for
/// instance a non-overlapping block DFT); an approximation otherwise.
pub fn approximal_l1_analysis<T: Real>(x: &[T], frame: &GaborFrame<T>, tau: T) -> Result<Vec<T>> {
    check_threshold(tau)?;
    let mut c = frame.analysis(x)?;
    soft_in_place(c.values_mut(), tau);
    let mut out = frame.synthesis(&c)?;
    out.truncate(x.len());
    Ok(out)
}

/// Keeps the `k` largest-magnitude entries and zeroes the rest.
///
/// Ties in magnitude are resolved in favour of the lower index.
pub fn hard_threshold_topk<T: Real>(v: &[Complex<T>], k: usize) -> Result<Vec<Complex<T>>> {
    if k > v.len() {
        return Err(param("k", format!("{k} exceeds vector length {}", v.len())));
    }
    let mut out = v.to_vec();
    let mut order = Vec::new();
    hard_threshold_in_place(&mut out, k, &mut order);
    Ok(out)
}

/// In-place top-`k` selection; `order` is an index scratch buffer.
pub(crate) fn hard_threshold_in_place<T: Real>(v: &mut [Complex<T>], k: usize, order: &mut Vec<usize>) {
    let n = v.len();
    if k >= n {
        return;
    }
    if k == 0 {
        v.iter_mut().for_each(|z| *z = Complex::zero());
        return;
    }
    order.clear();
    order.extend(0..n);
    let mags: Vec<T> = v.iter().map(|z| z.norm_sqr()).collect();
    // Total order: larger magnitude first, then lower index.
    let by_rank = |&a: &usize, &b: &usize| -> Ordering {
        mags[b].partial_cmp(&mags[a]).unwrap_or(Ordering::Equal).then(a.cmp(&b))
    };
    order.select_nth_unstable_by(k, by_rank);
    for &i in &order[k..] {
        v[i] = Complex::zero();
    }
}

fn check_positive<T: Real>(name: &'static str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter {
            name,
            reason: format!("must be positive and finite, got {v}"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn soft_examples() {
        let out = soft_threshold(&[c(3.0, 0.0), c(0.5, 0.0), c(0.0, 3.0), c(0.0, 0.0)], 1.0).unwrap();
        assert_eq!(out, vec![c(2.0, 0.0), c(0.0, 0.0), c(0.0, 2.0), c(0.0, 0.0)]);
        assert!(soft_threshold(&[c(1.0, 0.0)], 0.0).is_err());
        assert!(soft_threshold(&[c(1.0, 0.0)], -1.0).is_err());
    }

    #[test]
    fn clip_examples() {
        let out = clip(&[c(3.0, 0.0), c(0.5, 0.0), c(-4.0, 0.0)], 1.0).unwrap();
        assert_eq!(out, vec![c(1.0, 0.0), c(0.5, 0.0), c(-1.0, 0.0)]);
        assert!(clip(&[c(1.0, 0.0)], 0.0).is_err());
    }

    #[test]
    fn prox_dist_examples() {
        let b = ConsistencySet::new(vec![0.0, 0.0], vec![0.5, 0.5]).unwrap();
        assert_eq!(prox_dist_sq(&[1.0, 0.2], &b, 1.0).unwrap(), vec![0.75, 0.2]);
        assert!(prox_dist_sq(&[1.0], &b, 1.0).is_err());
        assert!(prox_dist_sq(&[1.0, 0.2], &b, 0.0).is_err());
    }

    #[test]
    fn topk_examples() {
        let v = [c(3.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)];
        assert_eq!(
            hard_threshold_topk(&v, 2).unwrap(),
            vec![c(3.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]
        );
        assert_eq!(hard_threshold_topk(&v, 3).unwrap(), v.to_vec());
        assert!(hard_threshold_topk(&v, 0).unwrap().iter().all(|z| z.is_zero()));
        assert!(hard_threshold_topk(&v, 4).is_err());
    }

    #[test]
    fn topk_ties_keep_lower_index() {
        let v = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.5, 0.0)];
        let out = hard_threshold_topk(&v, 2).unwrap();
        assert_eq!(out, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn approximal_zeroes_small_coefficients() {
        let f = GaborFrame::<f64>::new(8, 2, 8, 16).unwrap();
        let x: Vec<f64> = (0..16).map(|n| 1e-3 * (n as f64).sin()).collect();
        let out = approximal_l1_analysis(&x, &f, 1.0).unwrap();
        assert_eq!(out.len(), 16);
        assert!(out.iter().all(|&v| v == 0.0));
    }
}
