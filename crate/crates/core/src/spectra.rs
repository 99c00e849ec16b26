//! Power spectra of sampled x(t) series, peak extraction by relative
//! threshold, regime classification and parameter-sweep spectrograms.

use std::collections::BTreeSet;
use std::io::Write;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forced::ScanAxis;
use crate::ode::{Params, Rk4, State, System, SystemForm, STEPS_PER_PERIOD};
use crate::parallel::ordered_map;

pub const MIN_SERIES_LEN: usize = 64;

/// Default significance threshold, percent of the largest magnitude.
pub const DEFAULT_MINP: f64 = 0.5;

/// One-sided FFT magnitude spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    /// `k / (n·dt)` for `k = 0 .. n/2`.
    pub freqs: Vec<f64>,
    /// `|X_k| / √n`.
    pub mags: Vec<f64>,
    pub sample_dt: f64,
    /// Samples actually transformed (a power of two).
    pub n: usize,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.mags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mags.is_empty()
    }

    /// Frequency spacing between bins.
    pub fn resolution(&self) -> f64 {
        1.0 / (self.n as f64 * self.sample_dt)
    }

    pub fn max_mag(&self) -> f64 {
        self.mags.iter().copied().fold(0.0, f64::max)
    }

    pub fn bin_of(&self, freq: f64) -> usize {
        (freq / self.resolution()).round() as usize
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let max = self.max_mag();
        writeln!(w, "freq,mag,rel")?;
        for (f, m) in self.freqs.iter().zip(&self.mags) {
            let rel = if max > 0.0 { m / max } else { 0.0 };
            writeln!(w, "{f},{m},{rel}")?;
        }
        Ok(())
    }
}

/// Largest power of two not exceeding `n`.
pub fn fft_len(n: usize) -> usize {
    if n == 0 {
        0
    } else {
        1 << (usize::BITS - 1 - n.leading_zeros())
    }
}

/// Unitary DFT magnitudes of the leading power-of-two samples (all bins).
fn full_magnitudes(series: &[f64]) -> Vec<f64> {
    let n = series.len();
    let mut buf: Vec<Complex<f64>> = series.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / (n as f64).sqrt();
    buf.iter().map(|c| c.norm() * scale).collect()
}

/// How many samples enter the transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FftLength {
    /// Largest power of two not exceeding the series length.
    #[default]
    PowerOfTwo,
    /// Every sample. With a window of whole forcing periods this puts the
    /// forcing line exactly on a bin, avoiding leakage into its neighbours.
    Full,
}

impl std::str::FromStr for FftLength {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pow2" | "power-of-two" => Ok(Self::PowerOfTwo),
            "full" => Ok(Self::Full),
            _ => Err(Error::InvalidParams(format!("unknown FFT length policy {s:?} (pow2|full)"))),
        }
    }
}

/// Magnitude spectrum of `series` sampled every `dt`. The series is truncated
/// to the largest power of two; no window is applied.
pub fn power_spectrum(series: &[f64], dt: f64) -> Result<Spectrum> {
    power_spectrum_with(series, dt, FftLength::PowerOfTwo)
}

pub fn power_spectrum_with(series: &[f64], dt: f64, length: FftLength) -> Result<Spectrum> {
    if series.len() < MIN_SERIES_LEN {
        return Err(Error::TooShort { len: series.len(), min: MIN_SERIES_LEN });
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidStep(dt));
    }
    let n = match length {
        FftLength::PowerOfTwo => fft_len(series.len()),
        FftLength::Full => series.len(),
    };
    let mut mags = full_magnitudes(&series[..n]);
    mags.truncate(n / 2);
    let span = n as f64 * dt;
    let freqs = (0..n / 2).map(|k| k as f64 / span).collect();
    Ok(Spectrum { freqs, mags, sample_dt: dt, n })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub bin: usize,
    pub freq: f64,
    pub mag: f64,
    /// `mag / max_mag`.
    pub rel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakList {
    /// Sorted by magnitude, largest first.
    pub peaks: Vec<Peak>,
    pub threshold_pct: f64,
}

impl PeakList {
    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "freq,mag,rel")?;
        for p in &self.peaks {
            writeln!(w, "{},{},{}", p.freq, p.mag, p.rel)?;
        }
        Ok(())
    }

    /// Parses the `freq,mag,rel` format written by [`PeakList::write_csv`].
    /// Bin indices are not stored and read back as 0.
    pub fn read_csv(text: &str, threshold_pct: f64) -> Result<Self> {
        let mut peaks = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line.starts_with("freq")) {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidParams(format!("peak list line {}: {e}", i + 1)))
            };
            if cols.len() != 3 {
                return Err(Error::InvalidParams(format!("peak list line {}: expected 3 columns", i + 1)));
            }
            peaks.push(Peak { bin: 0, freq: parse(cols[0])?, mag: parse(cols[1])?, rel: parse(cols[2])? });
        }
        Ok(Self { peaks, threshold_pct })
    }
}

/// Interior local maxima at or above `minp_pct`% of the largest magnitude.
/// A plateau counts once, at its leftmost bin, and only if it drops on both sides.
pub fn detect_peaks(spec: &Spectrum, minp_pct: f64) -> PeakList {
    let m = &spec.mags;
    let max = spec.max_mag();
    let floor = minp_pct / 100.0 * max;
    let mut peaks = Vec::new();
    if max > 0.0 {
        let mut k = 1;
        while k + 1 < m.len() {
            if m[k] > m[k - 1] {
                let mut j = k;
                while j + 1 < m.len() && m[j + 1] == m[k] {
                    j += 1;
                }
                if j + 1 < m.len() && m[j + 1] < m[k] && m[k] >= floor {
                    peaks.push(Peak { bin: k, freq: spec.freqs[k], mag: m[k], rel: m[k] / max });
                }
                k = j + 1;
            } else {
                k += 1;
            }
        }
    }
    peaks.sort_by(|a, b| b.mag.total_cmp(&a.mag).then(a.bin.cmp(&b.bin)));
    PeakList { peaks, threshold_pct: minp_pct }
}

pub fn count_significant(spec: &Spectrum, minp_pct: f64) -> usize {
    detect_peaks(spec, minp_pct).len()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeLabel {
    Periodic,
    QuasiPeriodic,
    Chaotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub minp_pct: f64,
    pub periodic_max_peaks: usize,
    pub chaotic_min_peaks: usize,
    pub chaotic_background: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self { minp_pct: DEFAULT_MINP, periodic_max_peaks: 15, chaotic_min_peaks: 300, chaotic_background: 0.2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub label: RegimeLabel,
    pub peak_count: usize,
    /// Fraction of spectral energy outside the significant peaks (±1 bin).
    pub background: f64,
    /// Whether every significant peak is a harmonic of the lowest one.
    pub harmonic: bool,
}

/// Fraction of energy `Σ mag²` lying outside `peak ± 1` bins.
pub fn background_fraction(spec: &Spectrum, peaks: &PeakList) -> f64 {
    let total: f64 = spec.mags.iter().map(|m| m * m).sum();
    if total == 0.0 {
        return 0.0;
    }
    let bins: BTreeSet<usize> = peaks
        .peaks
        .iter()
        .flat_map(|p| p.bin.saturating_sub(1)..=(p.bin + 1).min(spec.len() - 1))
        .collect();
    let inside: f64 = bins.iter().map(|&k| spec.mags[k] * spec.mags[k]).sum();
    ((total - inside) / total).max(0.0)
}

/// True when every peak bin lies within one bin of a multiple of the
/// lowest-frequency peak. The fundamental is refined from the highest peak so
/// that the bin quantization error does not grow with the harmonic number.
fn all_harmonic(peaks: &PeakList) -> bool {
    let Some(low) = peaks.peaks.iter().map(|p| p.bin).min() else {
        return true;
    };
    if low == 0 {
        return false;
    }
    let high = peaks.peaks.iter().map(|p| p.bin).max().unwrap_or(low);
    let fundamental = high as f64 / (high as f64 / low as f64).round();
    peaks.peaks.iter().all(|p| {
        let order = (p.bin as f64 / fundamental).round();
        order >= 1.0 && (p.bin as f64 - order * fundamental).abs() <= 1.0
    })
}

pub fn classify_with(spec: &Spectrum, cfg: &ClassifierConfig) -> Classification {
    let peaks = detect_peaks(spec, cfg.minp_pct);
    let background = background_fraction(spec, &peaks);
    let harmonic = all_harmonic(&peaks);
    let count = peaks.len();
    let label = if count >= cfg.chaotic_min_peaks || background >= cfg.chaotic_background {
        RegimeLabel::Chaotic
    } else if count <= cfg.periodic_max_peaks && harmonic {
        RegimeLabel::Periodic
    } else {
        RegimeLabel::QuasiPeriodic
    };
    Classification { label, peak_count: count, background, harmonic }
}

pub fn classify(spec: &Spectrum) -> RegimeLabel {
    classify_with(spec, &ClassifierConfig::default()).label
}

/// How the x(t) series behind a spectrum is sampled: after
/// `transient_periods`, `points_per_period` samples per forcing period over
/// `window_periods` periods (both ends included).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    pub transient_periods: usize,
    pub window_periods: usize,
    pub points_per_period: usize,
    pub steps_per_period: usize,
    #[serde(default)]
    pub fft_length: FftLength,
}

impl Sampling {
    /// `t ∈ [9000T, 10000T]`, 20 samples per period.
    pub const PAPER: Sampling =
        Sampling { transient_periods: 9000, window_periods: 1000, points_per_period: 20, steps_per_period: STEPS_PER_PERIOD, fft_length: FftLength::PowerOfTwo };

    pub fn validate(&self) -> Result<()> {
        if self.window_periods == 0 || self.points_per_period == 0 || self.steps_per_period == 0 {
            return Err(Error::InvalidParams("sampling counts must be >= 1".into()));
        }
        if !self.steps_per_period.is_multiple_of(self.points_per_period) {
            return Err(Error::InvalidParams(format!(
                "steps_per_period ({}) must be a multiple of points_per_period ({})",
                self.steps_per_period, self.points_per_period
            )));
        }
        Ok(())
    }
}

impl Default for Sampling {
    fn default() -> Self {
        Self::PAPER
    }
}

/// Samples x(t) of the forced system; returns the series and its sample step.
pub fn sample_series(params: &Params, init: State, sampling: &Sampling) -> Result<(Vec<f64>, f64)> {
    sampling.validate()?;
    let period = params
        .period()
        .ok_or_else(|| Error::InvalidParams("spectra need a forced system (b > 0)".into()))?;
    let per = sampling.steps_per_period as u64;
    let stride = per / sampling.points_per_period as u64;
    let mut rk = Rk4::new(System::new(SystemForm::ForcedStandard, *params)?, init, period / per as f64)?;
    rk.advance(sampling.transient_periods as u64 * per)?;
    let n = sampling.window_periods * sampling.points_per_period + 1;
    let mut xs = Vec::with_capacity(n);
    xs.push(rk.position().0);
    for _ in 1..n {
        rk.advance(stride)?;
        xs.push(rk.position().0);
    }
    Ok((xs, period / sampling.points_per_period as f64))
}

/// Integrates, samples and transforms in one call.
pub fn spectrum_of(params: &Params, init: State, sampling: &Sampling) -> Result<Spectrum> {
    let (xs, dt) = sample_series(params, init, sampling)?;
    power_spectrum_with(&xs, dt, sampling.fft_length)
}

/// One spectrum per parameter value on a shared frequency axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSweep {
    pub axis: ScanAxis,
    pub values: Vec<f64>,
    pub spectra: Vec<Spectrum>,
}

impl SpectrumSweep {
    /// `(rows, bins)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.spectra.len(), self.spectra.first().map_or(0, Spectrum::len))
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "param,freq,mag")?;
        for (v, s) in self.values.iter().zip(&self.spectra) {
            for (f, m) in s.freqs.iter().zip(&s.mags) {
                writeln!(w, "{v},{f},{m}")?;
            }
        }
        Ok(())
    }
}

/// Spectra along a parameter axis. Every row must share the frequency axis, so
/// sweeping ω (which changes the sample step) is rejected.
pub fn spectrum_sweep(
    axis: ScanAxis,
    values: &[f64],
    fixed: &Params,
    init: State,
    sampling: &Sampling,
    jobs: usize,
) -> Result<SpectrumSweep> {
    if values.is_empty() {
        return Err(Error::InvalidParams("sweep needs at least one parameter value".into()));
    }
    if axis == ScanAxis::Omega && values.iter().any(|&v| v != values[0]) {
        return Err(Error::InvalidParams(
            "an omega sweep changes the sampling step; spectra would not share a frequency axis".into(),
        ));
    }
    let spectra = ordered_map(values, jobs, |&v| spectrum_of(&axis.apply(fixed, v), init, sampling))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumSweep { axis, values: values.to_vec(), spectra })
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}
