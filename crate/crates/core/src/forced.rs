//! Numerical analysis of the periodically forced oscillator: stroboscopic
//! sections, period detection, parameter scans, the largest Lyapunov exponent
//! and the divergence of nearby initial conditions.

use std::f64::consts::TAU;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{Params, Rk4, State, System, SystemForm, VectorField, STEPS_PER_PERIOD};
use crate::parallel::ordered_map;

/// Clustering radius for section points.
pub const CLUSTER_TOL: f64 = 1e-3;

/// Default transient, in forcing periods.
pub const TRANSIENT_PERIODS: usize = 500;

/// Section points per bifurcation row.
pub const BIFURCATION_SAMPLES: usize = 50;

/// Stroboscopic samples `(x, y)` at `t_min + k·T`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoincareSection {
    pub params: Params,
    pub points: Vec<(f64, f64)>,
    pub t_min: f64,
    pub t_max: f64,
    pub stride: f64,
}

impl PoincareSection {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "k,t,x,y")?;
        for (k, (x, y)) in self.points.iter().enumerate() {
            writeln!(w, "{},{},{},{}", k, self.t_min + k as f64 * self.stride, x, y)?;
        }
        Ok(())
    }
}

/// Number of RK4 steps per forcing period closest to `T/dt`.
pub fn steps_per_period(period: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidStep(dt));
    }
    Ok(((period / dt).round() as usize).max(1))
}

fn require_period(params: &Params) -> Result<f64> {
    params.validate()?;
    params
        .period()
        .ok_or_else(|| Error::InvalidParams("stroboscopic period undefined: b must be > 0".into()))
}

/// Integrates through the transient (rounded up to whole periods), then
/// records `n_points` states one forcing period apart. The step is adjusted to
/// `T/round(T/dt)` so sampling instants fall on the integration grid.
pub fn poincare(
    params: &Params,
    init: State,
    t_transient: f64,
    n_points: usize,
    dt: f64,
) -> Result<PoincareSection> {
    let period = require_period(params)?;
    if n_points == 0 {
        return Err(Error::InvalidParams("n_points must be >= 1".into()));
    }
    let per = steps_per_period(period, dt)?;
    let transient = (t_transient.max(0.0) / period - 1e-9).ceil() as u64;
    let mut rk = Rk4::new(System::new(SystemForm::ForcedStandard, *params)?, init, period / per as f64)?;
    rk.advance(transient * per as u64)?;
    let t_min = rk.time();
    let mut points = Vec::with_capacity(n_points);
    points.push(rk.position());
    for _ in 1..n_points {
        rk.advance(per as u64)?;
        points.push(rk.position());
    }
    Ok(PoincareSection { params: *params, points, t_min, t_max: rk.time(), stride: period })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "m")]
pub enum PeriodKind {
    /// Response period `m·T`.
    Locked(usize),
    Drifting,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodVerdict {
    pub kind: PeriodKind,
    pub clusters: usize,
    pub tolerance: f64,
}

impl PeriodVerdict {
    pub fn period(&self) -> Option<usize> {
        match self.kind {
            PeriodKind::Locked(m) => Some(m),
            PeriodKind::Drifting => None,
        }
    }

    pub fn is_locked(&self) -> bool {
        matches!(self.kind, PeriodKind::Locked(_))
    }
}

/// Greedy clustering of section points: each point joins the first cluster
/// whose seed lies within `tol`, else seeds a new one. `Locked(m)` requires
/// `m <= n/2` and the visit sequence to repeat with period exactly `m`.
pub fn detect_period_points(points: &[(f64, f64)], tol: f64) -> PeriodVerdict {
    let mut seeds: Vec<(f64, f64)> = Vec::new();
    let mut labels = Vec::with_capacity(points.len());
    for &(x, y) in points {
        let hit = seeds.iter().position(|&(sx, sy)| (x - sx).hypot(y - sy) <= tol);
        let label = hit.unwrap_or_else(|| {
            seeds.push((x, y));
            seeds.len() - 1
        });
        labels.push(label);
    }
    let m = seeds.len();
    let cyclic = labels.iter().enumerate().all(|(i, &l)| l == i % m);
    let kind = if m > 0 && 2 * m <= points.len() && cyclic {
        PeriodKind::Locked(m)
    } else {
        PeriodKind::Drifting
    };
    PeriodVerdict { kind, clusters: m, tolerance: tol }
}

pub fn detect_period(section: &PoincareSection, tol: f64) -> PeriodVerdict {
    detect_period_points(&section.points, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanAxis {
    B,
    Omega,
}

impl ScanAxis {
    pub fn apply(self, base: &Params, value: f64) -> Params {
        let mut p = *base;
        match self {
            ScanAxis::B => p.b = value,
            ScanAxis::Omega => p.omega = value,
        }
        p
    }

    pub fn name(self) -> &'static str {
        match self {
            ScanAxis::B => "b",
            ScanAxis::Omega => "omega",
        }
    }
}

impl std::str::FromStr for ScanAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "b" => Ok(ScanAxis::B),
            "omega" | "w" => Ok(ScanAxis::Omega),
            _ => Err(Error::InvalidParams(format!("unknown scan axis '{s}' (expected b or omega)"))),
        }
    }
}

/// Inclusive parameter grid `lo, lo + step, …` up to `hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl ParamRange {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) || !(lo <= hi) {
            return Err(Error::InvalidParams(format!(
                "invalid range lo = {lo}, hi = {hi}, step = {step}"
            )));
        }
        Ok(Self { lo, hi, step })
    }

    /// A one-point range.
    pub fn single(value: f64) -> Self {
        Self { lo: value, hi: value, step: 1.0 }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub n_samples: usize,
    /// Transient before sampling, in forcing periods of each row.
    pub transient_periods: f64,
    pub steps_per_period: usize,
    pub tol: f64,
    /// Start each row from the previous row's final state.
    pub continuation: bool,
    pub jobs: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            n_samples: BIFURCATION_SAMPLES,
            transient_periods: TRANSIENT_PERIODS as f64,
            steps_per_period: STEPS_PER_PERIOD,
            tol: CLUSTER_TOL,
            continuation: false,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BifurcationRow {
    pub value: f64,
    pub xs: Vec<f64>,
    pub verdict: PeriodVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BifurcationData {
    pub axis: ScanAxis,
    pub rows: Vec<BifurcationRow>,
}

impl BifurcationData {
    pub fn write_points_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "param,x")?;
        for row in &self.rows {
            for x in &row.xs {
                writeln!(w, "{},{}", row.value, x)?;
            }
        }
        Ok(())
    }

    /// One line per row; drifting rows report period 0.
    pub fn write_period_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "param,period")?;
        for row in &self.rows {
            writeln!(w, "{},{}", row.value, row.verdict.period().unwrap_or(0))?;
        }
        Ok(())
    }
}

fn transient_for(p: &Params, opts: &ScanOptions) -> f64 {
    opts.transient_periods * p.period().unwrap_or(TAU)
}

fn scan_row(value: f64, p: &Params, init: State, opts: &ScanOptions) -> Result<(BifurcationRow, State)> {
    let period = require_period(p)?;
    let dt = period / opts.steps_per_period as f64;
    let sec = poincare(p, init, transient_for(p, opts), opts.n_samples, dt)?;
    let verdict = detect_period(&sec, opts.tol);
    let (x, y) = *sec.points.last().expect("n_samples >= 1");
    Ok((BifurcationRow { value, xs: sec.points.iter().map(|p| p.0).collect(), verdict }, State::new(0.0, x, y)))
}

/// Poincaré x-values and period verdict for every grid value of `axis`.
pub fn bifurcation_scan(
    axis: ScanAxis,
    range: ParamRange,
    fixed: &Params,
    init: State,
    opts: &ScanOptions,
) -> Result<BifurcationData> {
    if opts.n_samples == 0 || opts.steps_per_period == 0 {
        return Err(Error::InvalidParams("n_samples and steps_per_period must be >= 1".into()));
    }
    let values = range.values();
    let rows = if opts.continuation {
        let mut rows = Vec::with_capacity(values.len());
        let mut state = init;
        for &v in &values {
            let (row, last) = scan_row(v, &axis.apply(fixed, v), state, opts)?;
            rows.push(row);
            state = last;
        }
        rows
    } else {
        ordered_map(&values, opts.jobs, |&v| {
            scan_row(v, &axis.apply(fixed, v), init, opts).map(|(row, _)| row)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?
    };
    Ok(BifurcationData { axis, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub lambda: f64,
    pub stderr: f64,
    pub n_renorm: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovConfig {
    pub d0: f64,
    /// Defaults to the forcing period, or 2π when unforced.
    pub renorm_interval: Option<f64>,
    pub n_renorm: usize,
    /// Defaults to [`TRANSIENT_PERIODS`] renormalization intervals.
    pub transient: Option<f64>,
    /// Integration steps per renormalization interval.
    pub steps_per_interval: usize,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        Self {
            d0: 1e-8,
            renorm_interval: None,
            n_renorm: 2000,
            transient: None,
            steps_per_interval: STEPS_PER_PERIOD,
        }
    }
}

/// Largest Lyapunov exponent of `params` by the two-trajectory
/// renormalization method.
pub fn lyapunov_max(params: &Params, init: State, cfg: &LyapunovConfig) -> Result<LyapunovEstimate> {
    params.validate()?;
    let interval = cfg.renorm_interval.or(params.period()).unwrap_or(TAU);
    let system = System::new(SystemForm::ForcedStandard, *params)?;
    lyapunov_max_field(&system, init, interval, cfg)
}

/// As [`lyapunov_max`] for an arbitrary planar field.
pub fn lyapunov_max_field<F: VectorField + Clone>(
    field: &F,
    init: State,
    interval: f64,
    cfg: &LyapunovConfig,
) -> Result<LyapunovEstimate> {
    if !(cfg.d0 > 0.0 && cfg.d0.is_finite()) {
        return Err(Error::InvalidParams(format!("d0 = {} must be positive", cfg.d0)));
    }
    if !(interval > 0.0) || cfg.steps_per_interval == 0 {
        return Err(Error::InvalidParams("renormalization interval must be positive".into()));
    }
    if cfg.n_renorm < 2 {
        return Err(Error::InvalidParams("n_renorm must be >= 2".into()));
    }
    let per = cfg.steps_per_interval as u64;
    let dt = interval / per as f64;
    let transient = cfg.transient.unwrap_or(TRANSIENT_PERIODS as f64 * interval);
    let transient_steps = (transient.max(0.0) / interval - 1e-9).ceil() as u64 * per;

    let mut reference = Rk4::new(field.clone(), init, dt)?;
    reference.advance(transient_steps)?;
    let (x, y) = reference.position();
    let offset = cfg.d0 / std::f64::consts::SQRT_2;
    let start = State::new(reference.time(), x + offset, y + offset);
    let mut companion = Rk4::new(field.clone(), start, dt)?;

    let mut logs = Vec::with_capacity(cfg.n_renorm);
    for _ in 0..cfg.n_renorm {
        reference.advance(per)?;
        companion.advance(per)?;
        let (rx, ry) = reference.position();
        let (cx, cy) = companion.position();
        let (dx, dy) = (cx - rx, cy - ry);
        let d = dx.hypot(dy);
        if !(d > 1e-300) || !d.is_finite() {
            return Err(Error::DegenerateSeparation(d));
        }
        logs.push((d / cfg.d0).ln());
        let scale = cfg.d0 / d;
        companion.set_position(rx + dx * scale, ry + dy * scale);
    }
    let n = logs.len() as f64;
    let mean = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(LyapunovEstimate {
        lambda: mean / interval,
        stderr: var.sqrt() / (interval * n.sqrt()),
        n_renorm: logs.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceRun {
    pub times: Vec<f64>,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    /// `ln |(x₁, y₁) - (x₂, y₂)|`; `-∞` where the trajectories coincide.
    pub log_separation: Vec<f64>,
}

impl DivergenceRun {
    pub fn separation(&self, i: usize) -> f64 {
        self.log_separation[i].exp()
    }

    /// Largest separation at or after time `t`.
    pub fn max_separation_after(&self, t: f64) -> f64 {
        self.times
            .iter()
            .zip(&self.log_separation)
            .filter(|(&ti, _)| ti >= t)
            .map(|(_, l)| l.exp())
            .fold(0.0, f64::max)
    }

    /// First time the separation reaches `level`.
    pub fn first_time_above(&self, level: f64) -> Option<f64> {
        let target = level.ln();
        self.times.iter().zip(&self.log_separation).find(|(_, &l)| l >= target).map(|(&t, _)| t)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,x1,x2,log_sep")?;
        for i in 0..self.times.len() {
            writeln!(w, "{},{},{},{}", self.times[i], self.x1[i], self.x2[i], self.log_separation[i])?;
        }
        Ok(())
    }
}

/// Integrates `init` and `init + (δ, δ)` side by side with the same step and
/// records every `record_every`-th step.
pub fn divergence_experiment(
    params: &Params,
    init: State,
    delta: f64,
    t_span: f64,
    dt: f64,
    record_every: usize,
) -> Result<DivergenceRun> {
    if !(delta >= 0.0) {
        return Err(Error::InvalidParams(format!("delta = {delta} must be >= 0")));
    }
    let system = System::new(SystemForm::ForcedStandard, *params)?;
    let mut a = Rk4::new(system, init, dt)?;
    let mut b = Rk4::new(system, State::new(init.t, init.x + delta, init.y + delta), dt)?;
    let n_steps = (t_span / dt).round() as usize;
    let every = record_every.max(1);
    let mut run = DivergenceRun { times: vec![], x1: vec![], x2: vec![], log_separation: vec![] };
    let mut record = |a: &Rk4<System>, b: &Rk4<System>| {
        let (ax, ay) = a.position();
        let (bx, by) = b.position();
        run.times.push(a.time());
        run.x1.push(ax);
        run.x2.push(bx);
        run.log_separation.push((ax - bx).hypot(ay - by).ln());
    };
    record(&a, &b);
    for i in 1..=n_steps {
        a.step()?;
        b.step()?;
        if i % every == 0 {
            record(&a, &b);
        }
    }
    Ok(run)
}

/// `(3 - d)e^{-ρ(t - t₁)} - d cos t` on a time grid.
pub fn levinson_template(d: f64, rho: f64, t1: f64, t_grid: &[f64]) -> Result<Vec<f64>> {
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::Domain(format!("d = {d} must lie in (0, 1)")));
    }
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("rho = {rho} must be > 0")));
    }
    Ok(t_grid.iter().map(|&t| (3.0 - d) * (-rho * (t - t1)).exp() - d * t.cos()).collect())
}
