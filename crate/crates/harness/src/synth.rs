//! Deterministic test signals.
//!
//! Descriptors have a compact text form used on the command line and as
//! input ids in reports:
//!
//! ```text
//! multisine:freqs=220,440;amps=1,0.5;duration=2;rate=44100
//! chirp:f0=100;f1=8000;duration=1;rate=44100
//! white-noise:seed=7;duration=1;rate=44100
//! ```
//!
//! `amps` is optional (all ones). Every signal is peak-normalized.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use dequant::Signal64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SignalDescriptor {
    Multisine {
        freqs: Vec<f64>,
        #[serde(default)]
        amps: Vec<f64>,
        duration: f64,
        rate: u32,
    },
    /// Linear sweep from `f0` to `f1` Hz.
    Chirp { f0: f64, f1: f64, duration: f64, rate: u32 },
    /// Uniform noise in `[-1, 1)` from a seeded ChaCha8 stream.
    WhiteNoise { seed: u64, duration: f64, rate: u32 },
}

impl SignalDescriptor {
    fn timing(&self) -> (f64, u32) {
        match *self {
            SignalDescriptor::Multisine { duration, rate, .. }
            | SignalDescriptor::Chirp { duration, rate, .. }
            | SignalDescriptor::WhiteNoise { duration, rate, .. } => (duration, rate),
        }
    }

    pub fn sample_rate(&self) -> u32 {
        self.timing().1
    }

    /// Number of samples, `round(duration * rate)`.
    pub fn len(&self) -> usize {
        let (duration, rate) = self.timing();
        (duration * f64::from(rate)).round() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Descriptor(msg.to_string()));
        let (duration, rate) = self.timing();
        if rate == 0 {
            return bad("rate must be positive");
        }
        if !(duration.is_finite() && duration > 0.0) || self.is_empty() {
            return bad("duration must be positive and span at least one sample");
        }
        let nyquist = f64::from(rate) / 2.0;
        match self {
            SignalDescriptor::Multisine { freqs, amps, .. } => {
                if freqs.is_empty() {
                    return bad("empty frequency list");
                }
                if !amps.is_empty() && amps.len() != freqs.len() {
                    return bad("amps and freqs differ in length");
                }
                if freqs.iter().any(|f| !(f.is_finite() && *f >= 0.0 && *f < nyquist)) {
                    return bad("frequencies must lie in [0, rate/2)");
                }
                if amps.iter().any(|a| !a.is_finite()) {
                    return bad("amplitudes must be finite");
                }
            }
            SignalDescriptor::Chirp { f0, f1, .. } => {
                if [f0, f1].iter().any(|f| !(f.is_finite() && **f >= 0.0 && **f < nyquist)) {
                    return bad("chirp frequencies must lie in [0, rate/2)");
                }
            }
            SignalDescriptor::WhiteNoise { .. } => {}
        }
        Ok(())
    }
}

/// Synthesizes and peak-normalizes the described signal.
pub fn synth_test_signal(desc: &SignalDescriptor) -> Result<Signal64> {
    desc.validate()?;
    let n = desc.len();
    let rate = desc.sample_rate();
    let fs = f64::from(rate);
    let mut samples: Vec<f64> = match desc {
        SignalDescriptor::Multisine { freqs, amps, .. } => (0..n)
            .map(|i| {
                let t = i as f64 / fs;
                freqs
                    .iter()
                    .enumerate()
                    .map(|(j, f)| amps.get(j).copied().unwrap_or(1.0) * (TAU * f * t).sin())
                    .sum()
            })
            .collect(),
        SignalDescriptor::Chirp { f0, f1, duration, .. } => {
            let rate_of_change = (f1 - f0) / duration;
            (0..n)
                .map(|i| {
                    let t = i as f64 / fs;
                    (TAU * (f0 * t + 0.5 * rate_of_change * t * t)).sin()
                })
                .collect()
        }
        SignalDescriptor::WhiteNoise { seed, .. } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
        }
    };
    if dequant::signal::peak_normalize(&mut samples) == 0.0 {
        return Err(Error::Descriptor(format!("{desc} is identically zero")));
    }
    Ok(Signal64::new(samples, rate))
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for SignalDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignalDescriptor::Multisine {
                freqs,
                amps,
                duration,
                rate,
            } => {
                write!(f, "multisine:freqs={}", join(freqs))?;
                if !amps.is_empty() {
                    write!(f, ";amps={}", join(amps))?;
                }
                write!(f, ";duration={duration};rate={rate}")
            }
            SignalDescriptor::Chirp { f0, f1, duration, rate } => {
                write!(f, "chirp:f0={f0};f1={f1};duration={duration};rate={rate}")
            }
            SignalDescriptor::WhiteNoise { seed, duration, rate } => {
                write!(f, "white-noise:seed={seed};duration={duration};rate={rate}")
            }
        }
    }
}

impl FromStr for SignalDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = |msg: String| Error::Descriptor(format!("{s:?}: {msg}"));
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| err("expected kind:key=value;...".into()))?;
        let mut fields = BTreeMap::new();
        for pair in rest.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| err(format!("malformed field {pair:?}")))?;
            if fields.insert(k.trim(), v.trim()).is_some() {
                return Err(err(format!("duplicate field {k:?}")));
            }
        }
        let mut take = |key: &str| fields.remove(key);
        let num = |key: &str, v: Option<&str>| -> Result<f64> {
            v.ok_or_else(|| err(format!("missing {key}")))?
                .parse()
                .map_err(|_| err(format!("{key} is not a number")))
        };
        let list = |key: &str, v: &str| -> Result<Vec<f64>> {
            v.split(',')
                .filter(|x| !x.trim().is_empty())
                .map(|x| {
                    x.trim()
                        .parse()
                        .map_err(|_| err(format!("{key} has a non-numeric entry")))
                })
                .collect()
        };
        let rate_str = take("rate").ok_or_else(|| err("missing rate".into()))?;
        let rate: u32 = rate_str.parse().map_err(|_| err("rate is not an integer".into()))?;
        let duration = num("duration", take("duration"))?;
        let desc = match kind.trim() {
            "multisine" => SignalDescriptor::Multisine {
                freqs: list("freqs", take("freqs").unwrap_or(""))?,
                amps: list("amps", take("amps").unwrap_or(""))?,
                duration,
                rate,
            },
            "chirp" => SignalDescriptor::Chirp {
                f0: num("f0", take("f0"))?,
                f1: num("f1", take("f1"))?,
                duration,
                rate,
            },
            "white-noise" => SignalDescriptor::WhiteNoise {
                seed: take("seed")
                    .ok_or_else(|| err("missing seed".into()))?
                    .parse()
                    .map_err(|_| err("seed is not an integer".into()))?,
                duration,
                rate,
            },
            other => return Err(err(format!("unknown kind {other:?}"))),
        };
        if let Some(k) = fields.keys().next() {
            return Err(err(format!("unknown field {k:?}")));
        }
        desc.validate()?;
        Ok(desc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        for s in [
            "multisine:freqs=220,440;amps=1,0.5;duration=2;rate=44100",
            "multisine:freqs=441;duration=1;rate=44100",
            "chirp:f0=100;f1=8000;duration=0.5;rate=22050",
            "white-noise:seed=7;duration=1;rate=8000",
        ] {
            let d: SignalDescriptor = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
    }

    #[test]
    fn rejects_bad_text() {
        for s in [
            "multisine:freqs=;duration=1;rate=8000",
            "multisine:freqs=440;amps=1,2;duration=1;rate=8000",
            "multisine:freqs=5000;duration=1;rate=8000",
            "chirp:f0=1;duration=1;rate=8000",
            "white-noise:seed=x;duration=1;rate=8000",
            "white-noise:seed=1;duration=1;rate=8000;color=pink",
            "square:duration=1;rate=8000",
            "white-noise:seed=1;duration=0;rate=8000",
            "noise",
        ] {
            assert!(s.parse::<SignalDescriptor>().is_err(), "{s}");
        }
    }
}
