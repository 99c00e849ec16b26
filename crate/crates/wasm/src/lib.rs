//! Browser bindings: trajectories, stroboscopic sections and spectra.

use vdp_core::forced::{self, PeriodKind};
use vdp_core::spectra::{self, FftLength, Sampling};
use vdp_core::{ode, Params, State, SystemForm};
use wasm_bindgen::prelude::*;

/// Most points handed to the page in one call.
const MAX_POINTS: usize = 200_000;

fn js_err(e: vdp_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Interleaved `x, y` samples of one trajectory, keeping every `every`-th step.
pub fn trajectory_xy(a: f64, b: f64, omega: f64, x0: f64, y0: f64, t_max: f64, every: usize) -> vdp_core::Result<Vec<f64>> {
    let p = Params::new(a, b, omega, 0.0)?;
    let dt = ode::default_dt(&p);
    let steps = (t_max / dt).round() as usize;
    let every = every.max(1).max(steps / MAX_POINTS);
    let traj = ode::integrate(SystemForm::ForcedStandard, &p, State::new(0.0, x0, y0), dt, steps)?;
    Ok(traj.samples.iter().step_by(every).flat_map(|&(x, y)| [x, y]).collect())
}

#[wasm_bindgen]
pub fn trajectory(a: f64, b: f64, omega: f64, x0: f64, y0: f64, t_max: f64, every: usize) -> Result<Vec<f64>, JsError> {
    trajectory_xy(a, b, omega, x0, y0, t_max, every).map_err(js_err)
}

#[wasm_bindgen]
pub struct Section {
    xy: Vec<f64>,
    period: usize,
    clusters: usize,
}

#[wasm_bindgen]
impl Section {
    /// Interleaved section points.
    #[wasm_bindgen(getter)]
    pub fn xy(&self) -> Vec<f64> {
        self.xy.clone()
    }

    /// Locked period in forcing periods, 0 when drifting.
    #[wasm_bindgen(getter)]
    pub fn period(&self) -> usize {
        self.period
    }

    #[wasm_bindgen(getter)]
    pub fn clusters(&self) -> usize {
        self.clusters
    }
}

pub fn section_of(a: f64, b: f64, omega: f64, transient_periods: f64, points: usize) -> vdp_core::Result<Section> {
    let p = Params::new(a, b, omega, 0.0)?;
    let period = p
        .period()
        .ok_or_else(|| vdp_core::Error::InvalidParams("a section needs b > 0".into()))?;
    let points = points.min(MAX_POINTS);
    let sec = forced::poincare(&p, State::new(0.0, 0.5, 0.0), transient_periods * period, points, ode::default_dt(&p))?;
    let verdict = forced::detect_period(&sec, forced::CLUSTER_TOL);
    let period = match verdict.kind {
        PeriodKind::Locked(m) => m,
        PeriodKind::Drifting => 0,
    };
    Ok(Section { xy: sec.points.iter().flat_map(|&(x, y)| [x, y]).collect(), period, clusters: verdict.clusters })
}

#[wasm_bindgen]
pub fn section(a: f64, b: f64, omega: f64, transient_periods: f64, points: usize) -> Result<Section, JsError> {
    section_of(a, b, omega, transient_periods, points).map_err(js_err)
}

#[wasm_bindgen]
pub struct SpectrumView {
    freqs: Vec<f64>,
    mags: Vec<f64>,
    peak_freqs: Vec<f64>,
    label: String,
}

#[wasm_bindgen]
impl SpectrumView {
    #[wasm_bindgen(getter)]
    pub fn freqs(&self) -> Vec<f64> {
        self.freqs.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn mags(&self) -> Vec<f64> {
        self.mags.clone()
    }

    /// Frequencies of the significant peaks, largest magnitude first.
    #[wasm_bindgen(getter)]
    pub fn peak_freqs(&self) -> Vec<f64> {
        self.peak_freqs.clone()
    }

    /// `Periodic`, `QuasiPeriodic` or `Chaotic`.
    #[wasm_bindgen(getter)]
    pub fn label(&self) -> String {
        self.label.clone()
    }
}

pub fn spectrum_view(
    a: f64,
    b: f64,
    omega: f64,
    transient_periods: usize,
    window_periods: usize,
    minp: f64,
) -> vdp_core::Result<SpectrumView> {
    let p = Params::new(a, b, omega, 0.0)?;
    let sampling = Sampling { transient_periods, window_periods, fft_length: FftLength::PowerOfTwo, ..Sampling::PAPER };
    let spec = spectra::spectrum_of(&p, State::new(0.0, 0.0, 0.0), &sampling)?;
    let peaks = spectra::detect_peaks(&spec, minp);
    let class = spectra::classify_with(&spec, &spectra::ClassifierConfig { minp_pct: minp, ..Default::default() });
    Ok(SpectrumView {
        peak_freqs: peaks.peaks.iter().map(|p| p.freq).collect(),
        label: format!("{:?}", class.label),
        freqs: spec.freqs,
        mags: spec.mags,
    })
}

#[wasm_bindgen]
pub fn spectrum(
    a: f64,
    b: f64,
    omega: f64,
    transient_periods: usize,
    window_periods: usize,
    minp: f64,
) -> Result<SpectrumView, JsError> {
    spectrum_view(a, b, omega, transient_periods, window_periods, minp).map_err(js_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trajectory_is_interleaved_and_decimated() {
        let xy = trajectory_xy(1.0, 0.0, 1.0, 0.5, 0.0, 1.0, 10).unwrap();
        assert_eq!(xy.len(), 2 * 101);
        assert_eq!(&xy[..2], &[0.5, 0.0]);
    }

    #[test]
    fn locked_section_reports_its_period() {
        let sec = section_of(5.0, 25.0, 7.0, 500.0, 100).unwrap();
        assert!(sec.period > 0);
        assert_eq!(sec.xy.len(), 200);
    }

    #[test]
    fn unforced_section_is_rejected() {
        assert!(section_of(5.0, 0.0, 7.0, 10.0, 10).is_err());
    }

    #[test]
    fn spectrum_axes_match() {
        let v = spectrum_view(5.0, 40.0, 7.0, 100, 100, 0.5).unwrap();
        assert_eq!(v.freqs.len(), v.mags.len());
        assert!(!v.peak_freqs.is_empty());
    }
}
