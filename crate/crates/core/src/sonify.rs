//! Audio rendering of a spectral peak list and 16-bit PCM WAV output.

use std::f64::consts::TAU;
use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::PeakList;

pub const DEFAULT_K_SCALE: f64 = 1e3;
pub const DEFAULT_DURATION: f64 = 4.0;
pub const DEFAULT_RATE: u32 = 44_100;

/// Audible band used for the range warning, Hz.
pub const AUDIBLE: (f64, f64) = (16.0, 20_000.0);

const WAV_HEADER_LEN: usize = 44;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioBuffer {
    pub sample_rate: u32,
    /// Samples in `[-1, 1]`.
    pub samples: Vec<f64>,
}

impl AudioBuffer {
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }
}

/// Non-fatal problems found while rendering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SonifyWarning {
    /// Every scaled partial lies outside the audible band.
    InaudibleRange { lowest: f64, highest: f64 },
}

impl fmt::Display for SonifyWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InaudibleRange { lowest, highest } => write!(
                f,
                "all partials ({lowest:.3} Hz .. {highest:.3} Hz) fall outside the audible band {} .. {} Hz",
                AUDIBLE.0, AUDIBLE.1
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synthesis {
    pub buffer: AudioBuffer,
    pub warning: Option<SonifyWarning>,
}

/// Renders `s(t) = Σ rel_i · sin(2π · k_scale · f_i · t)` for `duration` seconds,
/// normalized so the largest |sample| is 1. An empty peak list gives silence.
pub fn synthesize(peaks: &PeakList, k_scale: f64, duration: f64, sample_rate: u32) -> Result<Synthesis> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::InvalidParams(format!("duration must be > 0, got {duration}")));
    }
    if !(k_scale > 0.0 && k_scale.is_finite()) {
        return Err(Error::InvalidParams(format!("k_scale must be > 0, got {k_scale}")));
    }
    if sample_rate == 0 {
        return Err(Error::InvalidParams("sample rate must be > 0".into()));
    }
    let n = (duration * sample_rate as f64).round() as usize;
    let partials: Vec<(f64, f64)> = peaks.peaks.iter().map(|p| (p.rel, TAU * k_scale * p.freq)).collect();
    let rate = sample_rate as f64;
    let mut samples: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / rate;
            partials.iter().map(|&(amp, w)| amp * (w * t).sin()).sum()
        })
        .collect();
    let peak = samples.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    if peak > 0.0 {
        samples.iter_mut().for_each(|s| *s /= peak);
    }

    let scaled = peaks.peaks.iter().map(|p| k_scale * p.freq);
    let warning = if !peaks.is_empty() && scaled.clone().all(|f| f < AUDIBLE.0 || f > AUDIBLE.1) {
        Some(SonifyWarning::InaudibleRange {
            lowest: scaled.clone().fold(f64::INFINITY, f64::min),
            highest: scaled.fold(f64::NEG_INFINITY, f64::max),
        })
    } else {
        None
    };
    Ok(Synthesis { buffer: AudioBuffer { sample_rate, samples }, warning })
}

/// `round(s · 32767)` clamped to the 16-bit range; ±1 map to ±32767.
pub fn quantize(sample: f64) -> i16 {
    (sample * 32767.0).round().clamp(-32768.0, 32767.0) as i16
}

/// Mono 16-bit PCM RIFF/WAVE image: 44-byte header plus two bytes per sample.
pub fn encode_wav(buf: &AudioBuffer) -> Vec<u8> {
    let data_len = 2 * buf.samples.len() as u32;
    let mut out = Vec::with_capacity(WAV_HEADER_LEN + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&buf.sample_rate.to_le_bytes());
    out.extend_from_slice(&(buf.sample_rate * 2).to_le_bytes()); // byte rate
    out.extend_from_slice(&2u16.to_le_bytes()); // block align
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for &s in &buf.samples {
        out.extend_from_slice(&quantize(s).to_le_bytes());
    }
    out
}

pub fn write_wav(buf: &AudioBuffer, path: impl AsRef<Path>) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&encode_wav(buf))?;
    Ok(())
}

/// Parses the layout produced by [`encode_wav`].
pub fn decode_wav(bytes: &[u8]) -> Result<AudioBuffer> {
    let bad = |msg: &str| Error::Parse(format!("wav: {msg}"));
    if bytes.len() < WAV_HEADER_LEN || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(bad("not a RIFF/WAVE file"));
    }
    let u16_at = |i: usize| u16::from_le_bytes([bytes[i], bytes[i + 1]]);
    let u32_at = |i: usize| u32::from_le_bytes([bytes[i], bytes[i + 1], bytes[i + 2], bytes[i + 3]]);
    if &bytes[12..16] != b"fmt " || u32_at(16) != 16 || u16_at(20) != 1 || u16_at(22) != 1 || u16_at(34) != 16 {
        return Err(bad("expected 16-bit mono PCM with a 16-byte fmt chunk"));
    }
    if &bytes[36..40] != b"data" {
        return Err(bad("missing data chunk"));
    }
    let data_len = u32_at(40) as usize;
    let data = bytes.get(WAV_HEADER_LEN..WAV_HEADER_LEN + data_len).ok_or_else(|| bad("truncated data"))?;
    let samples = data.chunks_exact(2).map(|c| i16::from_le_bytes([c[0], c[1]]) as f64 / 32767.0).collect();
    Ok(AudioBuffer { sample_rate: u32_at(24), samples })
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    decode_wav(&std::fs::read(path)?)
}
