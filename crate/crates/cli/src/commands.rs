use std::f64::consts::{PI, TAU};

use serde_json::json;
use vdp_core::forced::{self, LyapunovConfig, ParamRange, ScanAxis, ScanOptions};
use vdp_core::sonify;
use vdp_core::spectra::{self, ClassifierConfig, PeakList, Sampling};
use vdp_core::symdyn::{self, SymbolSequence};
use vdp_core::{ode, Params, State, Trajectory};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::run::Run;

/// Upper bound on integration steps for a single `simulate` call.
const MAX_SIMULATE_STEPS: f64 = 1e8;

/// Transient of the paper's section protocol, in forcing periods.
const PROTOCOL_TRANSIENT_PERIODS: f64 = 9900.0;

fn params(p: &ParamArgs) -> CliResult<Params> {
    Ok(Params::new(p.a, p.b, p.omega, p.theta)?)
}

fn init(p: &ParamArgs) -> State {
    State::new(0.0, p.x0, p.y0)
}

fn period_of(p: &Params) -> f64 {
    p.period().unwrap_or(TAU)
}

fn transient_note(run: &mut Run, periods: f64) {
    if periods != PROTOCOL_TRANSIENT_PERIODS {
        run.note(format!(
            "transient of {periods} forcing periods (full protocol: {PROTOCOL_TRANSIENT_PERIODS})"
        ));
    }
}

pub fn simulate(a: &SimulateArgs, run: &mut Run) -> CliResult<()> {
    let p = params(&a.p)?;
    a.form.check(&p)?;
    let dt = a.dt.unwrap_or_else(|| ode::default_dt(&p));
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(vdp_core::Error::InvalidStep(dt).into());
    }
    let steps = (a.t_max / dt).round();
    if !(1.0..=MAX_SIMULATE_STEPS).contains(&steps) {
        return Err(CliError::usage(format!(
            "t-max / dt = {steps} steps; must be between 1 and {MAX_SIMULATE_STEPS:e}"
        )));
    }
    if a.every == 0 {
        return Err(CliError::usage("--every must be >= 1"));
    }
    let traj = ode::integrate(a.form, &p, init(&a.p), dt, steps as usize)?;
    let kept = Trajectory {
        dt: dt * a.every as f64,
        t0: traj.t0,
        samples: traj.samples.iter().copied().step_by(a.every).collect(),
    };
    run.params(p);
    run.sampling("form", a.form.name());
    run.sampling("dt", dt);
    run.sampling("n_steps", steps as u64);
    run.sampling("every", a.every);
    run.write(&format!("{}.csv", a.tag), |w| kept.write_csv(w))
}

pub fn poincare(a: &PoincareArgs, run: &mut Run) -> CliResult<()> {
    let p = params(&a.p)?;
    let period = p
        .period()
        .ok_or_else(|| CliError::usage("stroboscopic period undefined: b must be > 0"))?;
    if a.steps_per_period == 0 {
        return Err(CliError::usage("--steps-per-period must be >= 1"));
    }
    let dt = period / a.steps_per_period as f64;
    let sec = forced::poincare(&p, init(&a.p), a.transient_periods * period, a.points, dt)?;
    let verdict = forced::detect_period(&sec, a.tol);
    run.params(p);
    run.sampling("dt", dt);
    run.sampling("transient_periods", a.transient_periods);
    run.sampling("points", a.points);
    transient_note(run, a.transient_periods);
    match verdict.period() {
        Some(m) => println!("locked, period {m}"),
        None => println!("drifting ({} clusters)", verdict.clusters),
    }
    run.write(&format!("{}.csv", a.tag), |w| sec.write_csv(w))?;
    run.write_json(&format!("{}.verdict.json", a.tag), &verdict)
}

pub fn bifurcate(a: &BifurcateArgs, run: &mut Run) -> CliResult<()> {
    let p = params(&a.p)?;
    let range = ParamRange::new(a.lo, a.hi, a.step)?;
    let opts = ScanOptions {
        n_samples: a.samples,
        transient_periods: a.transient_periods,
        steps_per_period: a.steps_per_period,
        tol: a.tol,
        continuation: a.continuation,
        jobs: run.jobs,
    };
    let data = forced::bifurcation_scan(a.axis, range, &p, init(&a.p), &opts)?;
    run.params(p);
    run.sampling("axis", a.axis.name());
    run.sampling("values", data.rows.len());
    run.sampling("samples", a.samples);
    run.sampling("steps_per_period", a.steps_per_period);
    run.sampling("transient_periods", a.transient_periods);
    transient_note(run, a.transient_periods);
    let locked = data.rows.iter().filter(|r| r.verdict.is_locked()).count();
    println!("{} values, {locked} locked", data.rows.len());
    run.write(&format!("{}.points.csv", a.tag), |w| data.write_points_csv(w))?;
    run.write(&format!("{}.periods.csv", a.tag), |w| data.write_period_csv(w))
}

pub fn lyapunov(a: &LyapunovArgs, run: &mut Run) -> CliResult<()> {
    let p = params(&a.p)?;
    let interval = period_of(&p);
    let cfg = LyapunovConfig {
        d0: a.d0,
        renorm_interval: Some(interval),
        n_renorm: a.renorm,
        transient: Some(a.transient_periods * interval),
        steps_per_interval: a.steps_per_interval,
    };
    let est = forced::lyapunov_max(&p, init(&a.p), &cfg)?;
    run.params(p);
    run.sampling("renorm_interval", interval);
    run.sampling("n_renorm", a.renorm);
    run.sampling("transient_periods", a.transient_periods);
    run.sampling("dt", interval / a.steps_per_interval as f64);
    println!("lambda = {:.6} ± {:.6}", est.lambda, est.stderr);
    run.write_json(&format!("{}.json", a.tag), &json!({ "params": p, "config": cfg, "estimate": est }))
}

pub fn diverge(a: &DivergeArgs, run: &mut Run) -> CliResult<()> {
    let p = params(&a.p)?;
    let period = period_of(&p);
    if a.steps_per_period == 0 {
        return Err(CliError::usage("--steps-per-period must be >= 1"));
    }
    let dt = period / a.steps_per_period as f64;
    let res = forced::divergence_experiment(&p, init(&a.p), a.delta, a.periods * period, dt, a.record_every)?;
    run.params(p);
    run.sampling("dt", dt);
    run.sampling("t_span", a.periods * period);
    run.sampling("delta", a.delta);
    run.sampling("record_every", a.record_every);
    run.write(&format!("{}.csv", a.tag), |w| res.write_csv(w))
}

fn sampling(s: &SamplingArgs) -> Sampling {
    Sampling {
        transient_periods: s.transient_periods,
        window_periods: s.window_periods,
        points_per_period: s.points_per_period,
        steps_per_period: s.steps_per_period,
        fft_length: s.fft,
    }
}

fn record_sampling(run: &mut Run, s: &Sampling) {
    run.sampling("transient_periods", s.transient_periods);
    run.sampling("window_periods", s.window_periods);
    run.sampling("points_per_period", s.points_per_period);
    run.sampling("steps_per_period", s.steps_per_period);
    run.sampling("fft_length", serde_json::to_value(s.fft_length).unwrap_or_default());
}

fn parse_sweep(text: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::usage(format!("--sweep expects LO:HI:COUNT, got {text:?}"));
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, n] = parts[..] else { return Err(bad()) };
    let lo: f64 = lo.parse().map_err(|_| bad())?;
    let hi: f64 = hi.parse().map_err(|_| bad())?;
    let n: usize = n.parse().map_err(|_| bad())?;
    if n == 0 || lo.partial_cmp(&hi).is_none_or(|o| o.is_gt()) {
        return Err(bad());
    }
    Ok(spectra::linspace(lo, hi, n))
}

pub fn spectrum(a: &SpectrumArgs, run: &mut Run) -> CliResult<()> {
    let p = params(&a.p)?;
    let s = sampling(&a.sampling);
    let sweep = a.sweep.as_deref().map(parse_sweep).transpose()?;
    let spec = spectra::spectrum_of(&p, init(&a.p), &s)?;
    let peaks = spectra::detect_peaks(&spec, a.minp);
    let class = spectra::classify_with(&spec, &ClassifierConfig { minp_pct: a.minp, ..Default::default() });
    run.params(p);
    record_sampling(run, &s);
    run.sampling("n", spec.n);
    run.sampling("minp", a.minp);
    println!("{:?}: {} peaks above {}%", class.label, class.peak_count, a.minp);
    run.write(&format!("{}.spectrum.csv", a.tag), |w| spec.write_csv(w))?;
    run.write(&format!("{}.peaks.csv", a.tag), |w| peaks.write_csv(w))?;
    run.write_json(&format!("{}.regime.json", a.tag), &class)?;
    if let Some(values) = sweep {
        let data = spectra::spectrum_sweep(ScanAxis::B, &values, &p, init(&a.p), &s, run.jobs)?;
        let (rows, bins) = data.shape();
        run.sampling("sweep_rows", rows);
        run.sampling("sweep_bins", bins);
        run.write(&format!("{}.sweep.csv", a.tag), |w| data.write_csv(w))?;
    }
    Ok(())
}

pub fn sonify(a: &SonifyArgs, run: &mut Run) -> CliResult<()> {
    let peaks = match &a.peaks {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::file(path.display(), e))?;
            run.note(format!("peaks read from {}", path.display()));
            PeakList::read_csv(&text, a.minp)?
        }
        None => {
            let a_val = a.a.ok_or_else(|| CliError::usage("-a is required without --peaks"))?;
            let p = Params::new(a_val, a.b.unwrap_or(0.0), a.omega.unwrap_or(1.0), 0.0)?;
            let s = sampling(&a.sampling);
            let spec = spectra::spectrum_of(&p, State::new(0.0, a.x0, a.y0), &s)?;
            let peaks = spectra::detect_peaks(&spec, a.minp);
            run.params(p);
            record_sampling(run, &s);
            run.sampling("minp", a.minp);
            run.write(&format!("{}.peaks.csv", a.tag), |w| peaks.write_csv(w))?;
            peaks
        }
    };
    let synth = sonify::synthesize(&peaks, a.k_scale, a.duration, a.rate)?;
    if let Some(warning) = synth.warning {
        eprintln!("warning: {warning}");
        run.note(format!("warning: {warning}"));
    }
    run.sampling("k_scale", a.k_scale);
    run.sampling("duration", a.duration);
    run.sampling("rate", a.rate);
    run.sampling("partials", peaks.len());
    let bytes = sonify::encode_wav(&synth.buffer);
    run.write_bytes(&format!("{}.wav", a.tag), &bytes)
}

fn sequence(text: &str) -> CliResult<SymbolSequence> {
    Ok(text.parse::<SymbolSequence>()?)
}

pub fn symdyn(a: &SymdynArgs, run: &mut Run) -> CliResult<()> {
    let tag = &a.tag;
    match &a.action {
        SymdynAction::Enumerate { m } => {
            let fixed = symdyn::enumerate_fixed(*m)?;
            println!("{} sequences fixed by shift^{m}", fixed.len());
            run.write(&format!("{tag}.txt"), |w| fixed.iter().try_for_each(|s| writeln!(w, "{s}")))
        }
        SymdynAction::Metric { d, e, window } => {
            let (value, tail) = symdyn::metric(&sequence(d)?, &sequence(e)?, *window)?;
            println!("{value}");
            run.write_json(&format!("{tag}.json"), &json!({ "d": d, "e": e, "window": window, "value": value, "tail_bound": tail }))
        }
        SymdynAction::Shift { d, n } => {
            let out = sequence(d)?.shift_n(*n)?;
            println!("{out}");
            run.write(&format!("{tag}.txt"), |w| writeln!(w, "{out}"))
        }
        SymdynAction::Dense { depth } => {
            let out = symdyn::dense_orbit(*depth)?;
            run.write(&format!("{tag}.txt"), |w| writeln!(w, "{out}"))
        }
        SymdynAction::Witness { d, window } => {
            let seq = sequence(d)?;
            let (e, n) = symdyn::sensitivity_witness(&seq, *window)?;
            let (before, _) = symdyn::metric(&seq, &e, *window)?;
            let (after, _) = symdyn::metric(&seq.shift_n(n)?, &e.shift_n(n)?, *window)?;
            run.write_json(
                &format!("{tag}.json"),
                &json!({ "d": seq.to_string(), "e": e.to_string(), "window": window, "shifts": n, "distance_before": before, "distance_after": after }),
            )
        }
        SymdynAction::Encode { spacings, n, tol, in_pi } => {
            let scale = if *in_pi { PI } else { 1.0 };
            let values: Vec<f64> = spacings.iter().map(|s| s * scale).collect();
            let tol = tol * scale;
            let out = symdyn::encode_spacings(&values, *n, tol)?;
            println!("{out}");
            run.write(&format!("{tag}.txt"), |w| writeln!(w, "{out}"))
        }
    }
}

/// Runs any subcommand that produces data; `figure` and `replay` are handled
/// by the caller.
pub fn execute(cmd: &Command, run: &mut Run) -> CliResult<()> {
    match cmd {
        Command::Simulate(a) => simulate(a, run),
        Command::Poincare(a) => poincare(a, run),
        Command::Bifurcate(a) => bifurcate(a, run),
        Command::Lyapunov(a) => lyapunov(a, run),
        Command::Diverge(a) => diverge(a, run),
        Command::Spectrum(a) => spectrum(a, run),
        Command::Sonify(a) => sonify(a, run),
        Command::Symdyn(a) => symdyn(a, run),
        Command::Figure(_) | Command::Replay(_) => Err(CliError::usage("figure and replay cannot be nested")),
    }
}
