//! Douglas–Rachford, Chambolle–Pock and FISTA iterations for the ℓ1
//! formulations. Each body follows its algorithm line by line; tracing and
//! the optional early stop are the only additions.

use super::{early_stop, rel_change, rel_change_c, Outcome, Problem, StopReason, Tracer};
use crate::error::Result;
use crate::frame::CoefficientGrid;
use crate::prox::{clip_in_place, soft_in_place, soft_scalar};
use crate::quant::{project_gamma_star_into, StarScratch};
use crate::real::Real;
use crate::solvers::SolverConfig;

fn half<T: Real>() -> T {
    T::lit(0.5)
}

/// Douglas–Rachford for `min ‖c‖₁ s.t. A*c ∈ Γ`:
///
/// ```text
/// c = proj_Γ*(z)
/// z = z + soft_γ(2c − z) − c
/// ```
pub(crate) fn dr_consistent_syn<T: Real>(
    p: &Problem<T>,
    cfg: &SolverConfig<T>,
    tr: &mut Tracer<T>,
) -> Result<Outcome<T>> {
    let f = p.frame;
    let mut z = f.analysis(&p.start)?;
    if cfg.max_iters == 0 {
        return Ok(Outcome {
            signal: f.synthesis(&z)?,
            coefficients: Some(z),
            iterations: 0,
            stop: StopReason::MaxIters,
        });
    }
    let mut c = z.clone();
    let mut prev = c.clone();
    let mut star = StarScratch::new(f);
    let mut stop = StopReason::MaxIters;
    let mut it = 0;
    while it < cfg.max_iters {
        it += 1;
        std::mem::swap(&mut c, &mut prev);
        c.values_mut().copy_from_slice(z.values());
        project_gamma_star_into(&mut c, &p.set, f, &mut star)?;
        for (zi, &ci) in z.values_mut().iter_mut().zip(c.values()) {
            let reflected = ci + ci - *zi;
            *zi = *zi + soft_scalar(reflected, cfg.gamma) - ci;
        }
        if tr.wants_any(it) {
            let obj = tr.wants_objective(it).then(|| c.l1_norm());
            tr.record(it, obj, Some(&star.proj), None)?;
        }
        if it > 1 && early_stop(cfg, || rel_change_c(&c, &prev)) {
            stop = StopReason::IterateChange;
            break;
        }
    }
    Ok(Outcome {
        signal: f.synthesis(&c)?,
        coefficients: Some(c),
        iterations: it,
        stop,
    })
}

/// Chambolle–Pock for `min ‖Ax‖₁ s.t. x ∈ Γ`:
///
/// ```text
/// q = clip_1(q + σ A x)
/// p⁺ = proj_Γ(p − ζ A* q)
/// x = p⁺ + ρ (p⁺ − p)
/// ```
pub(crate) fn cp_consistent_ana<T: Real>(
    p: &Problem<T>,
    cfg: &SolverConfig<T>,
    tr: &mut Tracer<T>,
) -> Result<Outcome<T>> {
    let f = p.frame;
    let len = f.padded_len();
    let mut primal = p.start.clone();
    let mut prev = primal.clone();
    let mut x = primal.clone();
    let mut dual = f.zero_grid();
    let mut ax = f.zero_grid();
    let mut back = vec![T::zero(); len];
    let mut stop = StopReason::MaxIters;
    let mut it = 0;
    while it < cfg.max_iters {
        it += 1;
        f.analysis_into(&x, &mut ax)?;
        for (q, &a) in dual.values_mut().iter_mut().zip(ax.values()) {
            *q = *q + a * cfg.sigma;
        }
        clip_in_place(dual.values_mut(), T::one());
        f.synthesis_into(&dual, &mut back)?;
        std::mem::swap(&mut primal, &mut prev);
        for ((pn, &po), &b) in primal.iter_mut().zip(&prev).zip(&back) {
            *pn = po - cfg.zeta * b;
        }
        p.set.project_in_place(&mut primal)?;
        for ((xi, &pn), &po) in x.iter_mut().zip(&primal).zip(&prev) {
            *xi = pn + cfg.rho * (pn - po);
        }
        if tr.wants_any(it) {
            let obj = if tr.wants_objective(it) {
                Some(f.analysis(&primal)?.l1_norm())
            } else {
                None
            };
            tr.record(it, obj, Some(&primal), None)?;
        }
        if early_stop(cfg, || rel_change(&primal, &prev)) {
            stop = StopReason::IterateChange;
            break;
        }
    }
    Ok(Outcome {
        signal: primal,
        coefficients: None,
        iterations: it,
        stop,
    })
}

/// FISTA for `min λ‖c‖₁ + ½ d²_Γ(A*c)`:
///
/// ```text
/// c⁺ = soft_λμ(z − μ A(A*z − proj_Γ(A*z)))
/// t⁺ = (1 + sqrt(1 + 4t²)) / 2
/// z = c⁺ + (t − 1)/t⁺ (c⁺ − c)
/// ```
pub(crate) fn fista_inconsistent_syn<T: Real>(
    p: &Problem<T>,
    cfg: &SolverConfig<T>,
    tr: &mut Tracer<T>,
) -> Result<Outcome<T>> {
    let f = p.frame;
    let len = f.padded_len();
    let mut c = f.analysis(&p.start)?;
    let mut prev = c.clone();
    let mut z = c.clone();
    let mut grad = f.zero_grid();
    let mut s = vec![T::zero(); len];
    let mut residual = vec![T::zero(); len];
    let mut t = T::one();
    let threshold = cfg.lambda * cfg.mu;
    let mut stop = StopReason::MaxIters;
    let mut it = 0;
    while it < cfg.max_iters {
        it += 1;
        f.synthesis_into(&z, &mut s)?;
        residual.copy_from_slice(&s);
        p.set.project_in_place(&mut residual)?;
        for (r, &v) in residual.iter_mut().zip(&s) {
            *r = v - *r;
        }
        f.analysis_into(&residual, &mut grad)?;
        std::mem::swap(&mut c, &mut prev);
        for ((ci, &zi), &g) in c.values_mut().iter_mut().zip(z.values()).zip(grad.values()) {
            *ci = soft_scalar(zi - g * cfg.mu, threshold);
        }
        let t_next = (T::one() + (T::one() + T::lit(4.0) * t * t).sqrt()) * half();
        let beta = (t - T::one()) / t_next;
        t = t_next;
        for ((zi, &cn), &co) in z.values_mut().iter_mut().zip(c.values()).zip(prev.values()) {
            *zi = cn + (cn - co) * beta;
        }
        if tr.wants_any(it) {
            f.synthesis_into(&c, &mut s)?;
            let obj = if tr.wants_objective(it) {
                Some(cfg.lambda * c.l1_norm() + half::<T>() * p.set.dist_sq(&s)?)
            } else {
                None
            };
            tr.record(it, obj, Some(&s), None)?;
        }
        if early_stop(cfg, || rel_change_c(&c, &prev)) {
            stop = StopReason::IterateChange;
            break;
        }
    }
    Ok(Outcome {
        signal: f.synthesis(&c)?,
        coefficients: Some(c),
        iterations: it,
        stop,
    })
}

/// Douglas–Rachford for `min λ‖c‖₁ + ½ d²_Γ(A*c)`:
///
/// ```text
/// c = (γ proj_Γ*(z) + z) / (γ + 1)
/// z = z + soft_γλ(2c − z) − c
/// ```
pub(crate) fn dr_inconsistent_syn<T: Real>(
    p: &Problem<T>,
    cfg: &SolverConfig<T>,
    tr: &mut Tracer<T>,
) -> Result<Outcome<T>> {
    let f = p.frame;
    let mut z = f.analysis(&p.start)?;
    if cfg.max_iters == 0 {
        return Ok(Outcome {
            signal: f.synthesis(&z)?,
            coefficients: Some(z),
            iterations: 0,
            stop: StopReason::MaxIters,
        });
    }
    let gamma = cfg.gamma;
    let denom = gamma + T::one();
    let threshold = gamma * cfg.lambda;
    let mut c = z.clone();
    let mut prev = c.clone();
    let mut star = StarScratch::new(f);
    let mut signal = vec![T::zero(); f.padded_len()];
    let mut stop = StopReason::MaxIters;
    let mut it = 0;
    while it < cfg.max_iters {
        it += 1;
        std::mem::swap(&mut c, &mut prev);
        c.values_mut().copy_from_slice(z.values());
        project_gamma_star_into(&mut c, &p.set, f, &mut star)?;
        for (ci, &zi) in c.values_mut().iter_mut().zip(z.values()) {
            *ci = (*ci * gamma + zi) / denom;
        }
        for (zi, &ci) in z.values_mut().iter_mut().zip(c.values()) {
            let reflected = ci + ci - *zi;
            *zi = *zi + soft_scalar(reflected, threshold) - ci;
        }
        if tr.wants_any(it) {
            // A*c follows from quantities the projection already produced.
            for ((x, &pr), &raw) in signal.iter_mut().zip(&star.proj).zip(&star.raw) {
                *x = (gamma * pr + raw) / denom;
            }
            let obj = if tr.wants_objective(it) {
                Some(cfg.lambda * c.l1_norm() + half::<T>() * p.set.dist_sq(&signal)?)
            } else {
                None
            };
            tr.record(it, obj, Some(&signal), None)?;
        }
        if it > 1 && early_stop(cfg, || rel_change_c(&c, &prev)) {
            stop = StopReason::IterateChange;
            break;
        }
    }
    Ok(Outcome {
        signal: f.synthesis(&c)?,
        coefficients: Some(c),
        iterations: it,
        stop,
    })
}

/// Chambolle–Pock for `min λ‖Ax‖₁ + ½ d²_Γ(x)`:
///
/// ```text
/// c = clip_λ(c + σ A x)
/// u = p − ζ A* c
/// p⁺ = (ζ proj_Γ(u) + u) / (ζ + 1)
/// x = p⁺ + ρ (p⁺ − p)
/// ```
pub(crate) fn cp_inconsistent_ana<T: Real>(
    p: &Problem<T>,
    cfg: &SolverConfig<T>,
    tr: &mut Tracer<T>,
) -> Result<Outcome<T>> {
    let f = p.frame;
    let len = f.padded_len();
    let zeta = cfg.zeta;
    let denom = zeta + T::one();
    let mut primal = p.start.clone();
    let mut prev = primal.clone();
    let mut x = primal.clone();
    let mut dual = f.zero_grid();
    let mut ax = f.zero_grid();
    let mut back = vec![T::zero(); len];
    let mut u = vec![T::zero(); len];
    let mut stop = StopReason::MaxIters;
    let mut it = 0;
    while it < cfg.max_iters {
        it += 1;
        f.analysis_into(&x, &mut ax)?;
        for (d, &a) in dual.values_mut().iter_mut().zip(ax.values()) {
            *d = *d + a * cfg.sigma;
        }
        clip_in_place(dual.values_mut(), cfg.lambda);
        f.synthesis_into(&dual, &mut back)?;
        for ((ui, &po), &b) in u.iter_mut().zip(&primal).zip(&back) {
            *ui = po - zeta * b;
        }
        std::mem::swap(&mut primal, &mut prev);
        primal.copy_from_slice(&u);
        p.set.project_in_place(&mut primal)?;
        for (pn, &ui) in primal.iter_mut().zip(&u) {
            *pn = (zeta * *pn + ui) / denom;
        }
        for ((xi, &pn), &po) in x.iter_mut().zip(&primal).zip(&prev) {
            *xi = pn + cfg.rho * (pn - po);
        }
        if tr.wants_any(it) {
            let obj = if tr.wants_objective(it) {
                Some(analysis_objective(p, cfg.lambda, &primal)?)
            } else {
                None
            };
            tr.record(it, obj, Some(&primal), None)?;
        }
        if early_stop(cfg, || rel_change(&primal, &prev)) {
            stop = StopReason::IterateChange;
            break;
        }
    }
    Ok(Outcome {
        signal: primal,
        coefficients: None,
        iterations: it,
        stop,
    })
}

/// Douglas–Rachford with the approximal operator for
/// `min λ‖Ax‖₁ + ½ d²_Γ(x)`:
///
/// ```text
/// x = (γ proj_Γ(u) + u) / (γ + 1)
/// u = u + A* soft_γλ(A(2x − u)) − x
/// ```
pub(crate) fn dr_approx_ana<T: Real>(p: &Problem<T>, cfg: &SolverConfig<T>, tr: &mut Tracer<T>) -> Result<Outcome<T>> {
    let f = p.frame;
    let len = f.padded_len();
    let gamma = cfg.gamma;
    let denom = gamma + T::one();
    let threshold = gamma * cfg.lambda;
    let mut u = p.start.clone();
    let mut x = u.clone();
    let mut prev = x.clone();
    let mut reflected = vec![T::zero(); len];
    let mut shrunk = vec![T::zero(); len];
    let mut coeffs = f.zero_grid();
    let mut stop = StopReason::MaxIters;
    let mut it = 0;
    while it < cfg.max_iters {
        it += 1;
        std::mem::swap(&mut x, &mut prev);
        x.copy_from_slice(&u);
        p.set.project_in_place(&mut x)?;
        for (xi, &ui) in x.iter_mut().zip(&u) {
            *xi = (gamma * *xi + ui) / denom;
        }
        for ((r, &xi), &ui) in reflected.iter_mut().zip(&x).zip(&u) {
            *r = xi + xi - ui;
        }
        f.analysis_into(&reflected, &mut coeffs)?;
        soft_in_place(coeffs.values_mut(), threshold);
        f.synthesis_into(&coeffs, &mut shrunk)?;
        for ((ui, &s), &xi) in u.iter_mut().zip(&shrunk).zip(&x) {
            *ui = *ui + s - xi;
        }
        if tr.wants_any(it) {
            let obj = if tr.wants_objective(it) {
                Some(analysis_objective(p, cfg.lambda, &x)?)
            } else {
                None
            };
            tr.record(it, obj, Some(&x), None)?;
        }
        if it > 1 && early_stop(cfg, || rel_change(&x, &prev)) {
            stop = StopReason::IterateChange;
            break;
        }
    }
    Ok(Outcome {
        signal: x,
        coefficients: None,
        iterations: it,
        stop,
    })
}

/// FISTA with the approximal operator for `min λ‖Ax‖₁ + ½ d²_Γ(x)`:
///
/// ```text
/// x⁺ = A* soft_μλ(A(u − μ(u − proj_Γ(u))))
/// t⁺ = (1 + sqrt(1 + 4t²)) / 2
/// u = x⁺ + (t − 1)/t⁺ (x⁺ − x)
/// ```
pub(crate) fn fista_approx_ana<T: Real>(
    p: &Problem<T>,
    cfg: &SolverConfig<T>,
    tr: &mut Tracer<T>,
) -> Result<Outcome<T>> {
    let f = p.frame;
    let len = f.padded_len();
    let threshold = cfg.mu * cfg.lambda;
    let mut x = p.start.clone();
    let mut prev = x.clone();
    let mut u = x.clone();
    let mut step = vec![T::zero(); len];
    let mut coeffs = f.zero_grid();
    let mut t = T::one();
    let mut stop = StopReason::MaxIters;
    let mut it = 0;
    while it < cfg.max_iters {
        it += 1;
        step.copy_from_slice(&u);
        p.set.project_in_place(&mut step)?;
        for (s, &ui) in step.iter_mut().zip(&u) {
            *s = ui - cfg.mu * (ui - *s);
        }
        f.analysis_into(&step, &mut coeffs)?;
        soft_in_place(coeffs.values_mut(), threshold);
        std::mem::swap(&mut x, &mut prev);
        f.synthesis_into(&coeffs, &mut x)?;
        let t_next = (T::one() + (T::one() + T::lit(4.0) * t * t).sqrt()) * half();
        let beta = (t - T::one()) / t_next;
        t = t_next;
        for ((ui, &xn), &xo) in u.iter_mut().zip(&x).zip(&prev) {
            *ui = xn + beta * (xn - xo);
        }
        if tr.wants_any(it) {
            let obj = if tr.wants_objective(it) {
                Some(analysis_objective(p, cfg.lambda, &x)?)
            } else {
                None
            };
            tr.record(it, obj, Some(&x), None)?;
        }
        if early_stop(cfg, || rel_change(&x, &prev)) {
            stop = StopReason::IterateChange;
            break;
        }
    }
    Ok(Outcome {
        signal: x,
        coefficients: None,
        iterations: it,
        stop,
    })
}

/// `λ‖Ax‖₁ + ½ d²_Γ(x)` on a padded signal.
fn analysis_objective<T: Real>(p: &Problem<T>, lambda: T, x: &[T]) -> Result<T> {
    let c: CoefficientGrid<T> = p.frame.analysis(x)?;
    Ok(lambda * c.l1_norm() + half::<T>() * p.set.dist_sq(x)?)
}
