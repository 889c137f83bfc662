//! Dequantization solvers.
//!
//! Seven convex schemes:
//!
//! | id                 | problem                                   | method          |
//! |--------------------|-------------------------------------------|-----------------|
//! | `dr-cons-syn`      | min ‖c‖₁ s.t. A*c ∈ Γ                     | Douglas–Rachford |
//! | `cp-cons-ana`      | min ‖Ax‖₁ s.t. x ∈ Γ                      | Chambolle–Pock  |
//! | `fista-incons-syn` | min λ‖c‖₁ + ½ d²_Γ(A*c)                   | FISTA           |
//! | `dr-incons-syn`    | min λ‖c‖₁ + ½ d²_Γ(A*c)                   | Douglas–Rachford |
//! | `cp-incons-ana`    | min λ‖Ax‖₁ + ½ d²_Γ(x)                    | Chambolle–Pock  |
//! | `dr-approx-ana`    | min λ‖Ax‖₁ + ½ d²_Γ(x), approximal prox   | Douglas–Rachford |
//! | `fista-approx-ana` | min λ‖Ax‖₁ + ½ d²_Γ(x), approximal prox   | FISTA           |
//!
//! and three SPADQ variants (`a-spadq`, `s-spadq`, `s-spadq-dr`) alternating
//! top-k hard thresholding with projection onto Γ; see [`spadq`].
//!
//! Coefficient-domain methods start from `A xq`, signal-domain methods from
//! `xq`. Signals are processed whole: one frame spans the zero-padded signal
//! and padding samples are left unconstrained.

mod convex;
pub mod spadq;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::frame::{CoefficientGrid, GaborFrame};
use crate::metrics::sdr;
use crate::quant::{fit_to_frame, is_consistent, ConsistencySet, QuantizedObservation, CONSISTENCY_TOL};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    DrConsSyn,
    CpConsAna,
    FistaInconsSyn,
    DrInconsSyn,
    CpInconsAna,
    DrApproxAna,
    FistaApproxAna,
    ASpadq,
    SSpadq,
    SSpadqDr,
}

impl Algorithm {
    pub const ALL: [Algorithm; 10] = [
        Algorithm::DrConsSyn,
        Algorithm::CpConsAna,
        Algorithm::FistaInconsSyn,
        Algorithm::DrInconsSyn,
        Algorithm::CpInconsAna,
        Algorithm::DrApproxAna,
        Algorithm::FistaApproxAna,
        Algorithm::ASpadq,
        Algorithm::SSpadq,
        Algorithm::SSpadqDr,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::DrConsSyn => "dr-cons-syn",
            Algorithm::CpConsAna => "cp-cons-ana",
            Algorithm::FistaInconsSyn => "fista-incons-syn",
            Algorithm::DrInconsSyn => "dr-incons-syn",
            Algorithm::CpInconsAna => "cp-incons-ana",
            Algorithm::DrApproxAna => "dr-approx-ana",
            Algorithm::FistaApproxAna => "fista-approx-ana",
            Algorithm::ASpadq => "a-spadq",
            Algorithm::SSpadq => "s-spadq",
            Algorithm::SSpadqDr => "s-spadq-dr",
        }
    }

    /// Whether the output is constrained to lie in Γ.
    pub fn is_consistent(self) -> bool {
        matches!(
            self,
            Algorithm::DrConsSyn | Algorithm::CpConsAna | Algorithm::ASpadq | Algorithm::SSpadq | Algorithm::SSpadqDr
        )
    }

    pub fn is_spadq(self) -> bool {
        matches!(self, Algorithm::ASpadq | Algorithm::SSpadq | Algorithm::SSpadqDr)
    }

    /// Parameters the algorithm actually reads, used when reporting.
    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            Algorithm::DrConsSyn => &["gamma"],
            Algorithm::CpConsAna => &["zeta", "sigma", "rho"],
            Algorithm::FistaInconsSyn | Algorithm::FistaApproxAna => &["lambda", "mu"],
            Algorithm::DrInconsSyn | Algorithm::DrApproxAna => &["gamma", "lambda"],
            Algorithm::CpInconsAna => &["zeta", "sigma", "rho", "lambda"],
            Algorithm::ASpadq | Algorithm::SSpadq | Algorithm::SSpadqDr => &["spadq_s", "spadq_r", "spadq_epsilon"],
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    /// Accepts the kebab-case ids as well as `DR_CONS_SYN`-style names.
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        Algorithm::ALL
            .into_iter()
            .find(|a| a.id() == norm)
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))
    }
}

/// Solver configuration. Defaults are working values, not tuned ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig<T> {
    pub algorithm: Algorithm,
    pub max_iters: usize,
    /// Douglas–Rachford step.
    pub gamma: T,
    /// Chambolle–Pock primal step.
    pub zeta: T,
    /// Chambolle–Pock dual step; `zeta * sigma < 1` for a Parseval frame.
    pub sigma: T,
    /// Chambolle–Pock relaxation, in `[0, 1]`.
    pub rho: T,
    /// Sparsity weight of the inconsistent formulations.
    pub lambda: T,
    /// FISTA step, in `(0, 1]`.
    pub mu: T,
    /// SPADQ sparsity increment per frame.
    pub spadq_s: usize,
    /// SPADQ increment period in iterations.
    pub spadq_r: usize,
    /// SPADQ coupling tolerance.
    pub spadq_epsilon: T,
    /// Stop when the relative change of the main iterate drops below this; 0 disables.
    pub stop_tol: T,
    /// Record SDR every this many iterations when a reference is given; 0 disables.
    pub trace_sdr_every: usize,
    /// Record the objective every this many iterations; 0 disables.
    pub objective_every: usize,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::DrConsSyn,
            max_iters: 500,
            gamma: T::one(),
            zeta: T::lit(0.5),
            sigma: T::lit(0.5),
            rho: T::one(),
            lambda: T::lit(1e-4),
            mu: T::one(),
            spadq_s: 1,
            spadq_r: 1,
            spadq_epsilon: T::lit(0.1),
            stop_tol: T::zero(),
            trace_sdr_every: 0,
            objective_every: 1,
        }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            ..Self::default()
        }
    }

    pub fn with_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn validate(&self) -> Result<()> {
        use Algorithm::*;
        let positive = |name: &'static str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(param(name, format!("must be positive, got {v}")))
            }
        };
        if !(self.stop_tol >= T::zero()) {
            return Err(param("stop_tol", "must be nonnegative"));
        }
        match self.algorithm {
            DrConsSyn | DrInconsSyn | DrApproxAna => positive("gamma", self.gamma)?,
            CpConsAna | CpInconsAna => {
                positive("zeta", self.zeta)?;
                positive("sigma", self.sigma)?;
                if !(self.zeta * self.sigma < T::one()) {
                    return Err(param(
                        "zeta*sigma",
                        format!(
                            "step product {} must be < 1 for a Parseval frame",
                            self.zeta * self.sigma
                        ),
                    ));
                }
                if !(self.rho >= T::zero() && self.rho <= T::one()) {
                    return Err(param("rho", format!("must lie in [0, 1], got {}", self.rho)));
                }
            }
            FistaInconsSyn | FistaApproxAna => {
                if !(self.mu > T::zero() && self.mu <= T::one()) {
                    return Err(param("mu", format!("must lie in (0, 1], got {}", self.mu)));
                }
            }
            ASpadq | SSpadq | SSpadqDr => {
                if self.spadq_s == 0 {
                    return Err(param("spadq_s", "must be at least 1"));
                }
                if self.spadq_r == 0 {
                    return Err(param("spadq_r", "must be at least 1"));
                }
                positive("spadq_epsilon", self.spadq_epsilon)?;
            }
        }
        if matches!(
            self.algorithm,
            FistaInconsSyn | DrInconsSyn | CpInconsAna | DrApproxAna | FistaApproxAna
        ) && !(self.lambda >= T::zero() && self.lambda.is_finite())
        {
            return Err(param("lambda", format!("must be nonnegative, got {}", self.lambda)));
        }
        Ok(())
    }

    /// `name=value` pairs of the parameters the selected algorithm reads.
    pub fn describe(&self) -> Vec<(&'static str, String)> {
        self.algorithm
            .parameter_names()
            .iter()
            .map(|&name| {
                let v = match name {
                    "gamma" => self.gamma.to_string(),
                    "zeta" => self.zeta.to_string(),
                    "sigma" => self.sigma.to_string(),
                    "rho" => self.rho.to_string(),
                    "lambda" => self.lambda.to_string(),
                    "mu" => self.mu.to_string(),
                    "spadq_s" => self.spadq_s.to_string(),
                    "spadq_r" => self.spadq_r.to_string(),
                    "spadq_epsilon" => self.spadq_epsilon.to_string(),
                    _ => unreachable!("unlisted parameter {name}"),
                };
                (name, v)
            })
            .collect()
    }
}

/// One trace record, taken after `iteration` iterations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry<T> {
    pub iteration: usize,
    /// Objective of the solved problem; SPADQ records its coupling residual.
    pub objective: Option<T>,
    pub sdr: Option<f64>,
    /// SPADQ sparsity budget.
    pub sparsity: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    MaxIters,
    IterateChange,
    Residual,
}

#[derive(Debug, Clone)]
pub struct SolverRun<T: Real> {
    pub config: SolverConfig<T>,
    pub iterations_done: usize,
    /// Reconstruction truncated to the observation length.
    pub final_signal: Vec<T>,
    /// Final coefficients of the coefficient-domain methods.
    pub final_coefficients: Option<CoefficientGrid<T>>,
    pub trace: Vec<TraceEntry<T>>,
    pub consistent: bool,
    pub stop_reason: StopReason,
    /// Seconds.
    pub wall_time: f64,
}

impl<T: Real> SolverRun<T> {
    /// Largest traced SDR among iterations `1..=upto`.
    pub fn peak_sdr(&self, upto: usize) -> Option<f64> {
        self.trace
            .iter()
            .filter(|e| e.iteration >= 1 && e.iteration <= upto)
            .filter_map(|e| e.sdr)
            .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
    }

    pub fn sdr_at(&self, iteration: usize) -> Option<f64> {
        self.trace.iter().find(|e| e.iteration == iteration).and_then(|e| e.sdr)
    }

    pub fn last_objective(&self) -> Option<T> {
        self.trace.iter().rev().find_map(|e| e.objective)
    }
}

/// Everything a solver body needs.
pub(crate) struct Problem<'a, T: Real> {
    pub frame: &'a GaborFrame<T>,
    /// Γ extended to the padded length.
    pub set: ConsistencySet<T>,
    /// Starting signal, padded.
    pub start: Vec<T>,
}

/// What a solver body hands back.
pub(crate) struct Outcome<T: Real> {
    /// Padded-length signal.
    pub signal: Vec<T>,
    pub coefficients: Option<CoefficientGrid<T>>,
    pub iterations: usize,
    pub stop: StopReason,
}

pub(crate) struct Tracer<'a, T: Real> {
    reference: Option<&'a [T]>,
    sdr_every: usize,
    objective_every: usize,
    pub entries: Vec<TraceEntry<T>>,
}

impl<'a, T: Real> Tracer<'a, T> {
    fn new(cfg: &SolverConfig<T>, reference: Option<&'a [T]>) -> Self {
        Self {
            reference,
            sdr_every: cfg.trace_sdr_every,
            objective_every: cfg.objective_every,
            entries: Vec::new(),
        }
    }

    pub fn wants_objective(&self, it: usize) -> bool {
        self.objective_every > 0 && it.is_multiple_of(self.objective_every)
    }

    pub fn wants_sdr(&self, it: usize) -> bool {
        self.reference.is_some() && self.sdr_every > 0 && it.is_multiple_of(self.sdr_every)
    }

    pub fn wants_any(&self, it: usize) -> bool {
        self.wants_objective(it) || self.wants_sdr(it)
    }

    /// Records an entry; `signal` is the current padded estimate and is only
    /// read when SDR is due.
    pub fn record(
        &mut self,
        it: usize,
        objective: Option<T>,
        signal: Option<&[T]>,
        sparsity: Option<usize>,
    ) -> Result<()> {
        let sdr = match (self.reference, signal) {
            (Some(r), Some(s)) if self.wants_sdr(it) => Some(sdr(r, &s[..r.len()])?),
            _ => None,
        };
        if objective.is_some() || sdr.is_some() || sparsity.is_some() {
            self.entries.push(TraceEntry {
                iteration: it,
                objective,
                sdr,
                sparsity,
            });
        }
        Ok(())
    }
}

/// Runs the configured algorithm starting from the observation.
///
/// With a `reference` and `cfg.trace_sdr_every > 0`, the trace carries the SDR
/// of the running estimate, which exposes the early SDR peak of the ℓ1 methods.
pub fn run_solver<T: Real>(
    obs: &QuantizedObservation<T>,
    frame: &GaborFrame<T>,
    cfg: &SolverConfig<T>,
    reference: Option<&[T]>,
) -> Result<SolverRun<T>> {
    run_solver_from(obs, frame, cfg, reference, obs.samples())
}

/// Like [`run_solver`] but starting from `start` instead of the observation.
pub fn run_solver_from<T: Real>(
    obs: &QuantizedObservation<T>,
    frame: &GaborFrame<T>,
    cfg: &SolverConfig<T>,
    reference: Option<&[T]>,
    start: &[T],
) -> Result<SolverRun<T>> {
    cfg.validate()?;
    let n = obs.original_len();
    if n > frame.padded_len() {
        return Err(Error::LengthMismatch {
            expected: frame.padded_len(),
            got: n,
        });
    }
    if start.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: start.len(),
        });
    }
    if let Some(r) = reference {
        if r.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: r.len(),
            });
        }
    }
    let obs_set = obs.consistency_set();
    let set = fit_to_frame(&obs_set, frame)?;
    let mut padded = start.to_vec();
    padded.resize(frame.padded_len(), T::zero());
    let problem = Problem {
        frame,
        set,
        start: padded,
    };
    let mut tracer = Tracer::new(cfg, reference);

    let clock = Instant::now();
    let outcome = match cfg.algorithm {
        Algorithm::DrConsSyn => convex::dr_consistent_syn(&problem, cfg, &mut tracer)?,
        Algorithm::CpConsAna => convex::cp_consistent_ana(&problem, cfg, &mut tracer)?,
        Algorithm::FistaInconsSyn => convex::fista_inconsistent_syn(&problem, cfg, &mut tracer)?,
        Algorithm::DrInconsSyn => convex::dr_inconsistent_syn(&problem, cfg, &mut tracer)?,
        Algorithm::CpInconsAna => convex::cp_inconsistent_ana(&problem, cfg, &mut tracer)?,
        Algorithm::DrApproxAna => convex::dr_approx_ana(&problem, cfg, &mut tracer)?,
        Algorithm::FistaApproxAna => convex::fista_approx_ana(&problem, cfg, &mut tracer)?,
        Algorithm::ASpadq => spadq::a_spadq(&problem, cfg, &mut tracer)?,
        Algorithm::SSpadq => spadq::s_spadq(&problem, cfg, &mut tracer)?,
        Algorithm::SSpadqDr => spadq::s_spadq_dr(&problem, cfg, &mut tracer)?,
    };
    let wall_time = clock.elapsed().as_secs_f64();

    let mut final_signal = outcome.signal;
    final_signal.truncate(n);
    let consistent = is_consistent(&final_signal, &obs_set, T::lit(CONSISTENCY_TOL));
    Ok(SolverRun {
        config: cfg.clone(),
        iterations_done: outcome.iterations,
        final_signal,
        final_coefficients: outcome.coefficients,
        trace: tracer.entries,
        consistent,
        stop_reason: outcome.stop,
        wall_time,
    })
}

fn run_as<T: Real>(
    algorithm: Algorithm,
    obs: &QuantizedObservation<T>,
    frame: &GaborFrame<T>,
    cfg: &SolverConfig<T>,
) -> Result<SolverRun<T>> {
    let cfg = SolverConfig {
        algorithm,
        ..cfg.clone()
    };
    run_solver(obs, frame, &cfg, None)
}

/// Douglas–Rachford on the consistent synthesis problem.
pub fn solve_dr_consistent_syn<T: Real>(
    obs: &QuantizedObservation<T>,
    frame: &GaborFrame<T>,
    cfg: &SolverConfig<T>,
) -> Result<SolverRun<T>> {
    run_as(Algorithm::DrConsSyn, obs, frame, cfg)
}

/// Chambolle–Pock on the consistent analysis problem.
pub fn solve_cp_consistent_ana<T: Real>(
    obs: &QuantizedObservation<T>,
    frame: &GaborFrame<T>,
    cfg: &SolverConfig<T>,
) -> Result<SolverRun<T>> {
    run_as(Algorithm::CpConsAna, obs, frame, cfg)
}

pub fn solve_fista_inconsistent_syn<T: Real>(
    obs: &QuantizedObservation<T>,
    frame: &GaborFrame<T>,
    cfg: &SolverConfig<T>,
) -> Result<SolverRun<T>> {
    run_as(Algorithm::FistaInconsSyn, obs, frame, cfg)
}

pub fn solve_dr_inconsistent_syn<T: Real>(
    obs: &QuantizedObservation<T>,
    frame: &GaborFrame<T>,
    cfg: &SolverConfig<T>,
) -> Result<SolverRun<T>> {
    run_as(Algorithm::DrInconsSyn, obs, frame, cfg)
}

pub fn solve_cp_inconsistent_ana<T: Real>(
    obs: &QuantizedObservation<T>,
    frame: &GaborFrame<T>,
    cfg: &SolverConfig<T>,
) -> Result<SolverRun<T>> {
    run_as(Algorithm::CpInconsAna, obs, frame, cfg)
}

pub fn solve_dr_approx_ana<T: Real>(
    obs: &QuantizedObservation<T>,
    frame: &GaborFrame<T>,
    cfg: &SolverConfig<T>,
) -> Result<SolverRun<T>> {
    run_as(Algorithm::DrApproxAna, obs, frame, cfg)
}

pub fn solve_fista_approx_ana<T: Real>(
    obs: &QuantizedObservation<T>,
    frame: &GaborFrame<T>,
    cfg: &SolverConfig<T>,
) -> Result<SolverRun<T>> {
    run_as(Algorithm::FistaApproxAna, obs, frame, cfg)
}

/// Runs one of the SPADQ variants selected by `cfg.algorithm`.
pub fn solve_spadq<T: Real>(
    obs: &QuantizedObservation<T>,
    frame: &GaborFrame<T>,
    cfg: &SolverConfig<T>,
) -> Result<SolverRun<T>> {
    if !cfg.algorithm.is_spadq() {
        return Err(param("algorithm", format!("{} is not a SPADQ variant", cfg.algorithm)));
    }
    run_solver(obs, frame, cfg, None)
}

/// Objective of the inconsistent synthesis problem, `λ‖c‖₁ + ½ d²_Γ(A*c)`.
pub fn objective_syn<T: Real>(
    c: &CoefficientGrid<T>,
    set: &ConsistencySet<T>,
    frame: &GaborFrame<T>,
    lambda: T,
) -> Result<T> {
    let set = fit_to_frame(set, frame)?;
    let x = frame.synthesis(c)?;
    Ok(lambda * c.l1_norm() + T::lit(0.5) * set.dist_sq(&x)?)
}

/// Objective of the inconsistent analysis problem, `λ‖Ax‖₁ + ½ d²_Γ(x)`.
pub fn objective_ana<T: Real>(x: &[T], set: &ConsistencySet<T>, frame: &GaborFrame<T>, lambda: T) -> Result<T> {
    let set = fit_to_frame(set, frame)?;
    let mut padded = x.to_vec();
    padded.resize(frame.padded_len(), T::zero());
    let c = frame.analysis(&padded)?;
    Ok(lambda * c.l1_norm() + T::lit(0.5) * set.dist_sq(&padded)?)
}

pub(crate) fn early_stop<T: Real>(cfg: &SolverConfig<T>, change: impl FnOnce() -> T) -> bool {
    cfg.stop_tol > T::zero() && change() < cfg.stop_tol
}

pub(crate) fn rel_change<T: Real>(new: &[T], old: &[T]) -> T {
    let (num, den) = new.iter().zip(old).fold((T::zero(), T::zero()), |(n, d), (&a, &b)| {
        (n + (a - b) * (a - b), d + b * b)
    });
    if den > T::zero() {
        (num / den).sqrt()
    } else {
        num.sqrt()
    }
}

pub(crate) fn rel_change_c<T: Real>(new: &CoefficientGrid<T>, old: &CoefficientGrid<T>) -> T {
    let (num, den) = new
        .values()
        .iter()
        .zip(old.values())
        .fold((T::zero(), T::zero()), |(n, d), (&a, &b)| {
            (n + (a - b).norm_sqr(), d + b.norm_sqr())
        });
    if den > T::zero() {
        (num / den).sqrt()
    } else {
        num.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_ids_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.id().parse::<Algorithm>().unwrap(), a);
        }
        assert_eq!("DR_CONS_SYN".parse::<Algorithm>().unwrap(), Algorithm::DrConsSyn);
        assert_eq!("S_SPADQ_DR".parse::<Algorithm>().unwrap(), Algorithm::SSpadqDr);
        assert!("nope".parse::<Algorithm>().is_err());
    }

    #[test]
    fn config_validation() {
        let ok = SolverConfig::<f64>::new(Algorithm::CpConsAna);
        assert!(ok.validate().is_ok());
        let bad = SolverConfig {
            zeta: 1.0,
            sigma: 1.0,
            ..ok.clone()
        };
        assert!(bad.validate().is_err());
        let bad_rho = SolverConfig { rho: 1.5, ..ok };
        assert!(bad_rho.validate().is_err());
        let bad_mu = SolverConfig {
            mu: 1.5,
            ..SolverConfig::<f64>::new(Algorithm::FistaInconsSyn)
        };
        assert!(bad_mu.validate().is_err());
        let bad_s = SolverConfig {
            spadq_s: 0,
            ..SolverConfig::<f64>::new(Algorithm::ASpadq)
        };
        assert!(bad_s.validate().is_err());
        let bad_gamma = SolverConfig {
            gamma: 0.0,
            ..SolverConfig::<f64>::new(Algorithm::DrConsSyn)
        };
        assert!(bad_gamma.validate().is_err());
    }

    #[test]
    fn describe_lists_used_parameters() {
        let cfg = SolverConfig::<f64>::new(Algorithm::DrInconsSyn);
        let names: Vec<_> = cfg.describe().into_iter().map(|(n, _)| n).collect();
        assert_eq!(names, vec!["gamma", "lambda"]);
    }
}
