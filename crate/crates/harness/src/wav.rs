//! RIFF/WAVE input and output.
//!
//! Integer PCM is scaled by `2^(bits - 1)` on input, so full-scale negative
//! samples map to exactly -1. Multichannel files are downmixed to mono by
//! averaging.

use std::path::Path;
use std::str::FromStr;

use dequant::Signal64;
use hound::{SampleFormat, WavReader, WavSpec, WavWriter};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WavFormat {
    Pcm16,
    Pcm24,
    #[default]
    Float32,
}

impl WavFormat {
    fn spec(self, channels: u16, sample_rate: u32) -> WavSpec {
        let (bits_per_sample, sample_format) = match self {
            WavFormat::Pcm16 => (16, SampleFormat::Int),
            WavFormat::Pcm24 => (24, SampleFormat::Int),
            WavFormat::Float32 => (32, SampleFormat::Float),
        };
        WavSpec {
            channels,
            sample_rate,
            bits_per_sample,
            sample_format,
        }
    }
}

impl FromStr for WavFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pcm16" | "16" => Ok(WavFormat::Pcm16),
            "pcm24" | "24" => Ok(WavFormat::Pcm24),
            "float32" | "f32" | "float" => Ok(WavFormat::Float32),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

pub fn load_wav(path: impl AsRef<Path>) -> Result<Signal64> {
    let reader = WavReader::open(path.as_ref())?;
    read_wav(reader)
}

/// Decodes from any reader; used by [`load_wav`] and by tests on in-memory data.
pub fn read_wav<R: std::io::Read>(mut reader: WavReader<R>) -> Result<Signal64> {
    let spec = reader.spec();
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| f64::from(v) / 32768.0))
            .collect::<std::result::Result<_, _>>()?,
        (SampleFormat::Int, 24) => reader
            .samples::<i32>()
            .map(|s| s.map(|v| f64::from(v) / 8_388_608.0))
            .collect::<std::result::Result<_, _>>()?,
        (SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()?,
        (fmt, bits) => return Err(Error::UnsupportedFormat(format!("{fmt:?} {bits}-bit"))),
    };
    let channels = usize::from(spec.channels.max(1));
    if interleaved.len() < channels {
        return Err(Error::EmptyWav);
    }
    let samples = if channels == 1 {
        interleaved
    } else {
        interleaved
            .chunks_exact(channels)
            .map(|f| f.iter().sum::<f64>() / channels as f64)
            .collect()
    };
    Ok(Signal64::new(samples, spec.sample_rate))
}

/// Writes a mono file. PCM encodings round to nearest and saturate.
pub fn save_wav(path: impl AsRef<Path>, samples: &[f64], sample_rate: u32, format: WavFormat) -> Result<()> {
    if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let mut writer = WavWriter::create(path.as_ref(), format.spec(1, sample_rate))?;
    match format {
        WavFormat::Pcm16 => {
            for &v in samples {
                writer.write_sample(to_pcm(v, 16) as i16)?;
            }
        }
        WavFormat::Pcm24 => {
            for &v in samples {
                writer.write_sample(to_pcm(v, 24))?;
            }
        }
        WavFormat::Float32 => {
            for &v in samples {
                writer.write_sample(v as f32)?;
            }
        }
    }
    writer.finalize()?;
    Ok(())
}

fn to_pcm(v: f64, bits: u32) -> i32 {
    let full = f64::from(1u32 << (bits - 1));
    (v * full).round().clamp(-full, full - 1.0) as i32
}
