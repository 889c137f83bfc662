//! Experiment description, read from TOML.
//!
//! ```toml
//! word_lengths = [2, 3, 4, 5, 6, 7, 8]
//! algorithms = ["dr-cons-syn", "cp-cons-ana", "s-spadq"]
//! iteration_presets = [100, 500]
//! output_dir = "results"
//! jobs = 1
//!
//! [[inputs]]
//! path = "excerpts/violin.wav"
//!
//! [[inputs]]
//! kind = "multisine"
//! freqs = [220, 440, 660]
//! duration = 1.0
//! rate = 44100
//!
//! [params]
//! lambda = 1e-3
//!
//! [overrides.cp-cons-ana]
//! zeta = 0.9
//! sigma = 0.9
//! ```
//!
//! Every field is optional. Without inputs the built-in synthetic corpus is
//! used.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use dequant::{Algorithm, Config64};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, Error, Result};
use crate::synth::SignalDescriptor;

pub const MIN_SPEC_WORD_LENGTH: u32 = 2;
pub const MAX_SPEC_WORD_LENGTH: u32 = 16;

/// A WAV file or a synthetic signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputSource {
    File { path: PathBuf },
    Synthetic(SignalDescriptor),
}

impl fmt::Display for InputSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputSource::File { path } => write!(f, "{}", path.display()),
            InputSource::Synthetic(d) => d.fmt(f),
        }
    }
}

/// Solver hyperparameters, each optional; set values replace the defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    pub gamma: Option<f64>,
    pub zeta: Option<f64>,
    pub sigma: Option<f64>,
    pub rho: Option<f64>,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub spadq_s: Option<usize>,
    pub spadq_r: Option<usize>,
    pub spadq_epsilon: Option<f64>,
    pub stop_tol: Option<f64>,
}

impl ParamOverrides {
    pub fn apply(&self, cfg: &mut Config64) {
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { cfg.$f = v; })* };
        }
        set!(
            gamma,
            zeta,
            sigma,
            rho,
            lambda,
            mu,
            spadq_s,
            spadq_r,
            spadq_epsilon,
            stop_tol
        );
    }

    /// `other` wins wherever it is set.
    pub fn merged(&self, other: &ParamOverrides) -> ParamOverrides {
        macro_rules! pick {
            ($($f:ident),*) => { ParamOverrides { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            gamma,
            zeta,
            sigma,
            rho,
            lambda,
            mu,
            spadq_s,
            spadq_r,
            spadq_epsilon,
            stop_tol
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default = "default_corpus")]
    pub inputs: Vec<InputSource>,
    #[serde(default = "default_word_lengths")]
    pub word_lengths: Vec<u32>,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_presets")]
    pub iteration_presets: Vec<usize>,
    /// Applied to every algorithm.
    #[serde(default)]
    pub params: ParamOverrides,
    /// Per-algorithm values, applied after `params`.
    #[serde(default)]
    pub overrides: BTreeMap<Algorithm, ParamOverrides>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Worker threads; 0 and 1 both run cells one after another.
    #[serde(default)]
    pub jobs: usize,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            inputs: default_corpus(),
            word_lengths: default_word_lengths(),
            algorithms: default_algorithms(),
            iteration_presets: default_presets(),
            params: ParamOverrides::default(),
            overrides: BTreeMap::new(),
            output_dir: default_output_dir(),
            jobs: 0,
        }
    }
}

impl ExperimentSpec {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let spec: ExperimentSpec = toml::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Reads a spec; relative input paths and the output directory are taken
    /// relative to the spec file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let mut spec = Self::from_toml_str(&text)?;
        if let Some(base) = path.parent() {
            if spec.output_dir.is_relative() {
                spec.output_dir = base.join(&spec.output_dir);
            }
            for input in &mut spec.inputs {
                if let InputSource::File { path } = input {
                    if path.is_relative() {
                        *path = base.join(&*path);
                    }
                }
            }
        }
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Spec(m));
        if self.inputs.is_empty() {
            return bad("no inputs".into());
        }
        if self.word_lengths.is_empty() {
            return bad("no word lengths".into());
        }
        if let Some(w) = self
            .word_lengths
            .iter()
            .find(|w| !(MIN_SPEC_WORD_LENGTH..=MAX_SPEC_WORD_LENGTH).contains(*w))
        {
            return bad(format!(
                "word length {w} outside [{MIN_SPEC_WORD_LENGTH}, {MAX_SPEC_WORD_LENGTH}]"
            ));
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms".into());
        }
        if self.iteration_presets.is_empty() {
            return bad("no iteration presets".into());
        }
        for input in &self.inputs {
            if let InputSource::Synthetic(d) = input {
                d.validate()?;
            }
        }
        Ok(())
    }

    /// Solver configuration of one cell.
    pub fn config(&self, algorithm: Algorithm, iterations: usize) -> Config64 {
        let mut cfg = Config64::new(algorithm).with_iters(iterations);
        let params = match self.overrides.get(&algorithm) {
            Some(o) => self.params.merged(o),
            None => self.params.clone(),
        };
        params.apply(&mut cfg);
        cfg
    }
}

/// Three short signals of different character: tonal, swept, and noise.
pub fn default_corpus() -> Vec<InputSource> {
    let rate = 44_100;
    let duration = 0.1;
    vec![
        InputSource::Synthetic(SignalDescriptor::Multisine {
            freqs: vec![220.0, 440.0, 660.0, 1000.0, 3150.0],
            amps: vec![1.0, 0.7, 0.5, 0.3, 0.2],
            duration,
            rate,
        }),
        InputSource::Synthetic(SignalDescriptor::Chirp {
            f0: 100.0,
            f1: 8000.0,
            duration,
            rate,
        }),
        InputSource::Synthetic(SignalDescriptor::WhiteNoise {
            seed: 7,
            duration,
            rate,
        }),
    ]
}

fn default_word_lengths() -> Vec<u32> {
    (2..=8).collect()
}

fn default_algorithms() -> Vec<Algorithm> {
    Algorithm::ALL.to_vec()
}

fn default_presets() -> Vec<usize> {
    vec![100, 500]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}
