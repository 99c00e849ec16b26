//! Right-hand sides of the Van der Pol system in its four working forms and a
//! deterministic fixed-step RK4 integrator.

use std::f64::consts::TAU;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integration aborts once |x| or |y| exceeds this bound.
pub const BLOWUP_LIMIT: f64 = 1e6;

/// Default step for autonomous runs.
pub const AUTONOMOUS_DT: f64 = 1e-3;

/// Default number of RK4 steps per forcing period for forced runs.
pub const STEPS_PER_PERIOD: usize = 1000;

/// Oscillator parameters shared by every system form:
/// `ẍ = -x - a(x² - 1)ẋ + b cos(ωt + θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub a: f64,
    pub b: f64,
    pub omega: f64,
    pub theta: f64,
}

impl Params {
    pub fn new(a: f64, b: f64, omega: f64, theta: f64) -> Result<Self> {
        let p = Self { a, b, omega, theta };
        p.validate()?;
        Ok(p)
    }

    /// Unforced oscillator with damping `a`.
    pub fn autonomous(a: f64) -> Self {
        Self { a, b: 0.0, omega: 1.0, theta: 0.0 }
    }

    /// Forced oscillator with zero forcing phase.
    pub fn forced(a: f64, b: f64, omega: f64) -> Result<Self> {
        Self::new(a, b, omega, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [("a", self.a), ("b", self.b), ("omega", self.omega), ("theta", self.theta)];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} = {v} is not finite")));
            }
        }
        if self.a < 0.0 {
            return Err(Error::InvalidParams(format!("a = {} must be >= 0", self.a)));
        }
        if self.b < 0.0 {
            return Err(Error::InvalidParams(format!("b = {} must be >= 0", self.b)));
        }
        if self.b > 0.0 && self.omega <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "omega = {} must be > 0 when the system is forced",
                self.omega
            )));
        }
        Ok(())
    }

    pub fn is_forced(&self) -> bool {
        self.b > 0.0
    }

    /// Forcing period `T = 2π/ω`, defined only for forced systems.
    pub fn period(&self) -> Option<f64> {
        (self.is_forced() && self.omega > 0.0).then(|| TAU / self.omega)
    }

    /// Detuning `σ = (ω² - 1)/b`.
    pub fn detuning(&self) -> Option<f64> {
        (self.b != 0.0).then(|| (self.omega * self.omega - 1.0) / self.b)
    }

    #[inline]
    fn forcing(&self, t: f64) -> f64 {
        if self.b == 0.0 {
            0.0
        } else {
            self.b * (self.omega * t + self.theta).cos()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl State {
    pub fn new(t: f64, x: f64, y: f64) -> Self {
        Self { t, x, y }
    }

    pub fn at_rest() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemForm {
    /// `ẋ = y, ẏ = -x - a(x² - 1)y + b cos(ωt + θ)`.
    ForcedStandard,
    /// `ẋ = y - a(x³/3 - x), ẏ = -x + b cos(ωt + θ)`.
    LienardPlane,
    /// Liénard form with `y → y/a`: `ẋ = a(y - (x³/3 - x)), ẏ = (-x + b cos(ωt + θ))/a`.
    RelaxationScaled,
    /// Slowly varying coordinates `(z₁, z₂)` with `x = z₁ sin ωt + z₂ cos ωt`,
    /// `y = ω(z₁ cos ωt - z₂ sin ωt)`.
    Transformed,
}

impl SystemForm {
    pub const ALL: [SystemForm; 4] = [
        SystemForm::ForcedStandard,
        SystemForm::LienardPlane,
        SystemForm::RelaxationScaled,
        SystemForm::Transformed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SystemForm::ForcedStandard => "forced-standard",
            SystemForm::LienardPlane => "lienard-plane",
            SystemForm::RelaxationScaled => "relaxation-scaled",
            SystemForm::Transformed => "transformed",
        }
    }

    pub fn check(self, p: &Params) -> Result<()> {
        p.validate()?;
        match self {
            SystemForm::RelaxationScaled if p.a <= 0.0 => Err(Error::InvalidParams(
                "relaxation-scaled form divides by a; a must be > 0".into(),
            )),
            SystemForm::Transformed if p.b == 0.0 => Err(Error::InvalidParams(
                "transformed form needs sigma = (omega^2 - 1)/b; b must be > 0".into(),
            )),
            SystemForm::Transformed if p.omega <= 0.0 => {
                Err(Error::InvalidParams("transformed form needs omega > 0".into()))
            }
            _ => Ok(()),
        }
    }
}

impl std::str::FromStr for SystemForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SystemForm::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown system form '{s}'")))
    }
}

/// A planar, possibly time-dependent vector field.
pub trait VectorField {
    fn eval(&self, t: f64, x: f64, y: f64) -> (f64, f64);
}

impl<F: Fn(f64, f64, f64) -> (f64, f64)> VectorField for F {
    fn eval(&self, t: f64, x: f64, y: f64) -> (f64, f64) {
        self(t, x, y)
    }
}

/// One of the system forms bound to a validated parameter set.
#[derive(Debug, Clone, Copy)]
pub struct System {
    form: SystemForm,
    params: Params,
    // ω² - 1 = bσ, cached for the transformed form
    detuning_term: f64,
}

impl System {
    pub fn new(form: SystemForm, params: Params) -> Result<Self> {
        form.check(&params)?;
        let detuning_term = params.detuning().map_or(0.0, |sigma| params.b * sigma);
        Ok(Self { form, params, detuning_term })
    }

    pub fn form(&self) -> SystemForm {
        self.form
    }

    pub fn params(&self) -> &Params {
        &self.params
    }
}

impl VectorField for System {
    #[inline]
    fn eval(&self, t: f64, x: f64, y: f64) -> (f64, f64) {
        let p = &self.params;
        match self.form {
            SystemForm::ForcedStandard => (y, -x - p.a * (x * x - 1.0) * y + p.forcing(t)),
            SystemForm::LienardPlane => (y - p.a * (x * x * x / 3.0 - x), -x + p.forcing(t)),
            SystemForm::RelaxationScaled => {
                (p.a * (y - (x * x * x / 3.0 - x)), (-x + p.forcing(t)) / p.a)
            }
            SystemForm::Transformed => {
                let (s, c) = (p.omega * t).sin_cos();
                let pos = x * s + y * c;
                let vel = p.omega * (x * c - y * s);
                let f = self.detuning_term * pos + p.a * (1.0 - pos * pos) * vel + p.forcing(t);
                (f * c / p.omega, -f * s / p.omega)
            }
        }
    }
}

/// Maps a standard-form state `(x, y)` at time `t` to transformed coordinates `(z₁, z₂)`.
pub fn to_transformed(t: f64, x: f64, y: f64, omega: f64) -> (f64, f64) {
    let (s, c) = (omega * t).sin_cos();
    (x * s + y / omega * c, x * c - y / omega * s)
}

/// Inverse of [`to_transformed`].
pub fn from_transformed(t: f64, z1: f64, z2: f64, omega: f64) -> (f64, f64) {
    let (s, c) = (omega * t).sin_cos();
    (z1 * s + z2 * c, omega * (z1 * c - z2 * s))
}

/// Evaluates the right-hand side of `form` at state `s`.
pub fn rhs(form: SystemForm, s: &State, p: &Params) -> Result<(f64, f64)> {
    let sys = System::new(form, *p)?;
    let (dx, dy) = sys.eval(s.t, s.x, s.y);
    if !(dx.is_finite() && dy.is_finite()) {
        return Err(Error::NonFinite { t: s.t });
    }
    Ok((dx, dy))
}

/// Classical fixed-step RK4 stepper. Time is reconstructed as `t0 + i·dt`.
#[derive(Debug, Clone)]
pub struct Rk4<F> {
    field: F,
    dt: f64,
    t0: f64,
    steps: u64,
    x: f64,
    y: f64,
}

impl<F: VectorField> Rk4<F> {
    pub fn new(field: F, init: State, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidStep(dt));
        }
        if !(init.t.is_finite() && init.x.is_finite() && init.y.is_finite()) {
            return Err(Error::NonFinite { t: init.t });
        }
        Ok(Self { field, dt, t0: init.t, steps: 0, x: init.x, y: init.y })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps_taken(&self) -> u64 {
        self.steps
    }

    pub fn time(&self) -> f64 {
        self.t0 + self.steps as f64 * self.dt
    }

    pub fn position(&self) -> (f64, f64) {
        (self.x, self.y)
    }

    pub fn state(&self) -> State {
        State::new(self.time(), self.x, self.y)
    }

    /// Overwrites the phase-space position, keeping the clock.
    pub fn set_position(&mut self, x: f64, y: f64) {
        self.x = x;
        self.y = y;
    }

    pub fn step(&mut self) -> Result<()> {
        let (h, t) = (self.dt, self.time());
        let half = 0.5 * h;
        let (x, y) = (self.x, self.y);
        let f = &self.field;
        let (k1x, k1y) = f.eval(t, x, y);
        let (k2x, k2y) = f.eval(t + half, x + half * k1x, y + half * k1y);
        let (k3x, k3y) = f.eval(t + half, x + half * k2x, y + half * k2y);
        let (k4x, k4y) = f.eval(t + h, x + h * k3x, y + h * k3y);
        let nx = x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        let ny = y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        self.steps += 1;
        if !(nx.is_finite() && ny.is_finite()) {
            return Err(Error::NonFinite { t: self.time() });
        }
        if nx.abs() > BLOWUP_LIMIT || ny.abs() > BLOWUP_LIMIT {
            return Err(Error::BlowUp { t: self.time(), limit: BLOWUP_LIMIT });
        }
        self.x = nx;
        self.y = ny;
        Ok(())
    }

    pub fn advance(&mut self, n: u64) -> Result<()> {
        for _ in 0..n {
            self.step()?;
        }
        Ok(())
    }
}

/// Uniformly sampled solution: sample `i` sits at `t0 + i·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub t0: f64,
    pub samples: Vec<(f64, f64)>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn last(&self) -> State {
        let i = self.samples.len() - 1;
        let (x, y) = self.samples[i];
        State::new(self.time(i), x, y)
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.0)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,x,y")?;
        for (i, (x, y)) in self.samples.iter().enumerate() {
            writeln!(w, "{},{},{}", self.time(i), x, y)?;
        }
        Ok(())
    }
}

/// Integrates an arbitrary field, keeping every step.
pub fn integrate_field<F: VectorField>(
    field: F,
    init: State,
    dt: f64,
    n_steps: usize,
) -> Result<Trajectory> {
    if n_steps == 0 {
        return Err(Error::InvalidParams("n_steps must be >= 1".into()));
    }
    let mut rk = Rk4::new(field, init, dt)?;
    let mut samples = Vec::with_capacity(n_steps + 1);
    samples.push((init.x, init.y));
    for _ in 0..n_steps {
        rk.step()?;
        samples.push(rk.position());
    }
    Ok(Trajectory { dt, t0: init.t, samples })
}

pub fn integrate(
    form: SystemForm,
    p: &Params,
    init: State,
    dt: f64,
    n_steps: usize,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidStep(dt));
    }
    integrate_field(System::new(form, *p)?, init, dt, n_steps)
}

/// Step size commensurate with the forcing period, or the autonomous default.
pub fn default_dt(p: &Params) -> f64 {
    p.period().map_or(AUTONOMOUS_DT, |t| t / STEPS_PER_PERIOD as f64)
}
