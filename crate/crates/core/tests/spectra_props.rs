use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vdp_core::forced::ScanAxis;
use vdp_core::sonify::{synthesize, DEFAULT_RATE};
use vdp_core::spectra::*;
use vdp_core::{Params, State};

fn mixture(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let parts: Vec<(f64, f64)> = (0..6).map(|_| (rng.gen_range(0.1..1.0), rng.gen_range(0.01..0.45))).collect();
    (0..n).map(|i| parts.iter().map(|&(a, f)| a * (TAU * f * i as f64).sin()).sum::<f64>() + 0.01 * rng.gen_range(-1.0..1.0)).collect()
}

#[test]
fn parseval_on_one_sided_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let x = mixture(&mut rng, 4096);
    let spec = power_spectrum(&x, 1.0).unwrap();
    let time: f64 = x.iter().map(|v| v * v).sum();
    // real input: bins 1..n/2 appear twice in the full transform, the Nyquist bin once
    let nyquist = {
        let s: f64 = x.iter().enumerate().map(|(i, v)| if i % 2 == 0 { *v } else { -v }).sum();
        s * s / x.len() as f64
    };
    let m = &spec.mags;
    let freq: f64 = m[0] * m[0] + 2.0 * m[1..].iter().map(|v| v * v).sum::<f64>() + nyquist;
    assert!((time - freq).abs() <= 1e-9 * time, "{time} vs {freq}");
}

#[test]
fn scaling_leaves_relative_values_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let x = mixture(&mut rng, 2048);
    let base = power_spectrum(&x, 0.5).unwrap();
    let peaks = detect_peaks(&base, DEFAULT_MINP);
    for c in [1e-6, 0.3, 42.0] {
        let scaled = power_spectrum(&x.iter().map(|v| v * c).collect::<Vec<_>>(), 0.5).unwrap();
        let sp = detect_peaks(&scaled, DEFAULT_MINP);
        assert_eq!(sp.len(), peaks.len());
        for (a, b) in sp.peaks.iter().zip(&peaks.peaks) {
            assert_eq!(a.bin, b.bin);
            assert!((a.rel - b.rel).abs() < 1e-12);
        }
        assert_eq!(classify(&scaled), classify(&base));
    }
}

#[test]
fn trailing_zero_bins_do_not_change_peaks() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let spec = power_spectrum(&mixture(&mut rng, 1024), 1.0).unwrap();
    let mut padded = spec.clone();
    for k in spec.len()..spec.len() + 100 {
        padded.freqs.push(k as f64 / (spec.n as f64 * spec.sample_dt));
        padded.mags.push(0.0);
    }
    assert_eq!(detect_peaks(&padded, 0.5), detect_peaks(&spec, 0.5));
}

#[test]
fn synthesized_peaks_are_recovered() {
    let peaks = PeakList {
        peaks: [(0.25, 1.0), (0.5, 0.6), (0.9, 0.3), (1.7, 0.1)]
            .iter()
            .map(|&(freq, rel)| Peak { bin: 0, freq, mag: rel, rel })
            .collect(),
        threshold_pct: 0.5,
    };
    // one second at full length puts integer-Hz partials exactly on bins
    let audio = synthesize(&peaks, 1e3, 1.0, DEFAULT_RATE).unwrap().buffer;
    let dt = 1.0 / DEFAULT_RATE as f64;
    let spec = power_spectrum_with(&audio.samples, dt, FftLength::Full).unwrap();
    let found = detect_peaks(&spec, 5.0);
    assert_eq!(found.len(), peaks.len());
    for p in &peaks.peaks {
        let bin = spec.bin_of(1e3 * p.freq) as i64;
        let hit = found.peaks.iter().find(|q| (q.bin as i64 - bin).abs() <= 1).expect("peak recovered");
        assert!((hit.rel - p.rel).abs() <= 0.05, "{} Hz: {} vs {}", 1e3 * p.freq, hit.rel, p.rel);
    }
}

const COARSE: Sampling = Sampling { transient_periods: 300, window_periods: 200, ..Sampling::PAPER };

#[test]
fn single_value_sweep_matches_standalone_spectrum() {
    let p = Params::forced(5.0, 15.0, 7.0).unwrap();
    let sweep = spectrum_sweep(ScanAxis::B, &[15.0], &p, State::at_rest(), &COARSE, 1).unwrap();
    assert_eq!(sweep.spectra[0], spectrum_of(&p, State::at_rest(), &COARSE).unwrap());
}

#[test]
fn sweep_rows_share_the_frequency_axis() {
    let p = Params::forced(5.0, 22.0, 7.0).unwrap();
    let values = linspace(22.0, 29.0, 20);
    let sweep = spectrum_sweep(ScanAxis::B, &values, &p, State::at_rest(), &COARSE, vdp_core::default_jobs()).unwrap();
    let (rows, bins) = sweep.shape();
    // 200 periods × 20 samples + 1 → 2048-point transform
    assert_eq!((rows, bins), (20, 1024));
    assert!(sweep.spectra.iter().all(|s| s.freqs == sweep.spectra[0].freqs));
}
