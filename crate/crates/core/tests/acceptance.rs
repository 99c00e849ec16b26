//! End-to-end acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (no libtest harness) so every line is printed even
//! when an earlier criterion fails.

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vdp_core::averaging::*;
use vdp_core::forced::*;
use vdp_core::ode::{integrate, integrate_field};
use vdp_core::sonify::*;
use vdp_core::spectra::*;
use vdp_core::symdyn::*;
use vdp_core::{Params, State, SystemForm};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within_budget(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    if elapsed.as_secs_f64() < limit_s {
        Ok(())
    } else {
        Err(format!("runtime {:.2}s exceeds {limit_s}s", elapsed.as_secs_f64()))
    }
}

fn timed(limit_s: f64, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f()?;
    within_budget(start.elapsed(), limit_s)?;
    Ok(format!("{out} [{:.2}s]", start.elapsed().as_secs_f64()))
}

fn fmt_err(e: vdp_core::Error) -> String {
    format!("error: {e}")
}

fn limit_cycle_amplitude() -> Outcome {
    timed(1.0, || {
        let p = Params::autonomous(0.1);
        let traj = integrate(SystemForm::ForcedStandard, &p, State::new(0.0, 0.5, 0.0), 1e-3, 300_000).map_err(fmt_err)?;
        let tail = traj.len() - traj.len() / 10;
        let amp = traj.samples[tail..].iter().fold(0.0f64, |m, &(x, _)| m.max(x.abs()));
        check((amp - 2.0).abs() <= 0.04, format!("max|x| = {amp:.5}"))
    })
}

fn averaged_closed_form() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let r0 = rng.gen_range(0.1..4.0);
        let a = rng.gen_range(0.05..0.5);
        let t: f64 = rng.gen_range(0.0..50.0);
        let n = ((t / 1e-3).ceil() as usize).max(1);
        let field = move |_t: f64, r: f64, _y: f64| (averaged_rate(r, a), 0.0);
        let numeric = if t == 0.0 {
            r0
        } else {
            integrate_field(field, State::new(0.0, r0, 0.0), t / n as f64, n).map_err(fmt_err)?.last().x
        };
        let closed = averaged_amplitude(r0, a, t).map_err(fmt_err)?;
        worst = worst.max((numeric - closed).abs());
    }
    check(worst <= 1e-8, format!("max |closed - RK4| = {worst:.2e}"))
}

fn f1_identity() -> Outcome {
    // midpoint rule; exact for trigonometric polynomials of this degree
    let quad = |r: f64| {
        let n = 1000;
        (0..n)
            .map(|k| {
                let tau = (k as f64 + 0.5) * TAU / n as f64;
                let (x, xdot) = (r * tau.cos(), -r * tau.sin());
                tau.sin() * (1.0 - x * x) * xdot
            })
            .sum::<f64>()
            / n as f64
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let worst = (0..100)
        .map(|_| {
            let r = rng.gen_range(0.0..4.0);
            (f1_average(r) - quad(r)).abs()
        })
        .fold(0.0f64, f64::max);
    check(worst <= 1e-10, format!("max |f1 - quadrature| = {worst:.2e}"))
}

fn second_order_frequency() -> Outcome {
    timed(5.0, || {
        let a = 0.3;
        let p = Params::autonomous(a);
        let dt = 1e-3;
        let settle = 100_000;
        let cycles = 50;
        let n = settle + ((cycles as f64 + 2.0) * 6.4 / dt) as usize;
        let traj = integrate(SystemForm::ForcedStandard, &p, State::new(0.0, 2.0, 0.0), dt, n).map_err(fmt_err)?;
        let mut crossings = Vec::new();
        for i in settle..traj.len() - 1 {
            let (x0, x1) = (traj.samples[i].0, traj.samples[i + 1].0);
            if x0 < 0.0 && x1 >= 0.0 {
                crossings.push(traj.time(i) + dt * x0 / (x0 - x1));
            }
        }
        if crossings.len() < cycles + 1 {
            return Err(format!("only {} upward zero crossings", crossings.len()));
        }
        let period = (crossings[cycles] - crossings[0]) / cycles as f64;
        let predicted = TAU / (1.0 - a * a / 16.0);
        let tol = 2.0 * a * a * a;
        check(
            (period - predicted).abs() <= tol,
            format!("period {period:.6} vs {predicted:.6} (tol {tol:.3})"),
        )
    })
}

fn lienard() -> Outcome {
    let rep = lienard_check();
    let err = (rep.gamma - 3f64.sqrt()).abs();
    check(err <= 1e-12 && rep.all_hold(), format!("gamma err {err:.1e}, conditions {:?}", rep.conditions))
}

fn amplitude_cubic() -> Outcome {
    let a_vals = [0.5, 1.0, 2.0, 5.0];
    let b_vals = [1.0, 5.0, 15.0, 40.0, 74.0];
    let w_vals = [1.5, 2.5, 4.0, 7.0, 10.0];
    let (mut worst, mut monotone, mut count) = (0.0f64, true, 0);
    for &a in &a_vals {
        for &b in &b_vals {
            let mut prev = f64::INFINITY;
            for &w in &w_vals {
                let r = amplitude_response(a, b, w).map_err(fmt_err)?;
                let c = 4.0 * b / (a * w * w);
                worst = worst.max((r * r * r - 4.0 * r - c).abs());
                monotone &= r < prev;
                prev = r;
                count += 1;
            }
        }
    }
    check(
        count == 100 && worst <= 1e-12 && monotone,
        format!("{count} points, max residual {worst:.1e}, monotone in ω²: {monotone}"),
    )
}

fn entrainment() -> Outcome {
    timed(30.0, || {
        let expect: [(f64, &str); 5] = [(15.0, "drift"), (25.0, "odd"), (50.0, "drift"), (55.0, "odd"), (74.0, "one")];
        let mut report = Vec::new();
        let mut ok = true;
        for (b, want) in expect {
            let p = Params::forced(5.0, b, 7.0).map_err(fmt_err)?;
            let t = p.period().unwrap();
            let sec = poincare(&p, State::at_rest(), TRANSIENT_PERIODS as f64 * t, BIFURCATION_SAMPLES, t / 1000.0)
                .map_err(fmt_err)?;
            let kind = detect_period(&sec, CLUSTER_TOL).kind;
            ok &= match (want, kind) {
                ("drift", PeriodKind::Drifting) => true,
                ("odd", PeriodKind::Locked(m)) => m % 2 == 1,
                ("one", PeriodKind::Locked(1)) => true,
                _ => false,
            };
            report.push(format!("b={b}: {kind:?}"));
        }
        check(ok, report.join(", "))
    })
}

fn lyapunov_chaos() -> Outcome {
    timed(60.0, || {
        let mut report = Vec::new();
        let mut ok = true;
        for (a, b, w) in [(3.0, 5.0, 1.788), (5.0, 5.0, 2.5), (5.0, 25.0, 4.455)] {
            let p = Params::forced(a, b, w).map_err(fmt_err)?;
            let e = lyapunov_max(&p, State::new(0.0, 0.5, 0.0), &LyapunovConfig::default()).map_err(fmt_err)?;
            let pass = e.lambda > 0.0 && e.lambda > 3.0 * e.stderr;
            ok &= pass;
            report.push(format!("({a},{b},{w}) λ={:.4}±{:.4}{}", e.lambda, e.stderr, if pass { "" } else { " ✗" }));
        }
        // harmonic oscillator: neutral, period 2π renormalization with dt ≈ 1e-3
        let cfg = LyapunovConfig { steps_per_interval: 6283, ..Default::default() };
        let e = lyapunov_max(&Params::autonomous(0.0), State::new(0.0, 1.0, 0.0), &cfg).map_err(fmt_err)?;
        let pass = e.lambda.abs() <= 3.0 * e.stderr;
        ok &= pass;
        report.push(format!("harmonic λ={:.2e}±{:.2e}{}", e.lambda, e.stderr, if pass { "" } else { " ✗" }));
        check(ok, report.join("; "))
    })
}

fn sensitive_dependence() -> Outcome {
    let init = State::new(0.0, 0.5, 0.0);
    let p = Params::forced(3.0, 5.0, 1.788).map_err(fmt_err)?;
    let t = p.period().unwrap();
    let run = divergence_experiment(&p, init, 1e-5, 200.0 * t, t / 1000.0, 10).map_err(fmt_err)?;
    let reached = run.first_time_above(1.0);

    let q = Params::forced(5.0, 25.0, 7.0).map_err(fmt_err)?;
    let tq = q.period().unwrap();
    let run = divergence_experiment(&q, init, 1e-5, 1000.0 * tq, tq / 1000.0, 10).map_err(fmt_err)?;
    let settled = run.max_separation_after(TRANSIENT_PERIODS as f64 * tq);
    check(
        reached.is_some() && settled < 1e-2,
        format!(
            "chaotic: separation ≥ 1 at {} ; periodic: max separation after 500T = {settled:.2e}",
            reached.map_or("never".into(), |s| format!("{:.1}T", s / t))
        ),
    )
}

const PERIODIC: (f64, f64, f64) = (5.0, 40.0, 7.0);
const QUASI: (f64, f64, f64) = (5.0, 15.0, 7.0);
const CHAOTIC: (f64, f64, f64) = (3.0, 5.0, 1.788);

fn paper_spectrum((a, b, w): (f64, f64, f64)) -> Result<Spectrum, String> {
    let p = Params::forced(a, b, w).map_err(fmt_err)?;
    spectrum_of(&p, State::at_rest(), &Sampling::PAPER).map_err(fmt_err)
}

fn spectral_counts() -> Outcome {
    timed(30.0, || {
        let mut counts = Vec::new();
        let mut labels = Vec::new();
        for case in [PERIODIC, QUASI, CHAOTIC] {
            let spec = paper_spectrum(case)?;
            counts.push(count_significant(&spec, DEFAULT_MINP));
            labels.push(classify(&spec));
        }
        let bands = counts[0] <= 15 && (25..=80).contains(&counts[1]) && counts[2] >= 300;
        let ordered = counts[0] < counts[1] && counts[1] < counts[2];
        let labelled = labels == [RegimeLabel::Periodic, RegimeLabel::QuasiPeriodic, RegimeLabel::Chaotic];
        check(bands && ordered && labelled, format!("counts {counts:?}, labels {labels:?}"))
    })
}

fn quasi_periodic_peaks() -> Outcome {
    let spec = paper_spectrum(QUASI)?;
    let half = detect_peaks(&spec, DEFAULT_MINP);
    let (dominant, second) = (half.peaks[0], half.peaks[1]);
    let four = detect_peaks(&spec, 4.0).len();
    let f_ok = (dominant.freq - 0.0920).abs() <= 0.0015;
    let rel_ok = (second.rel - 0.27).abs() <= 0.02;
    let n_ok = four == 9;
    check(
        f_ok && rel_ok && n_ok,
        format!(
            "dominant {:.5}{}, second rel {:.4}{}, peaks ≥4%: {four}{}",
            dominant.freq,
            if f_ok { "" } else { " ✗" },
            second.rel,
            if rel_ok { "" } else { " ✗" },
            if n_ok { "" } else { " ✗ (want 9)" }
        ),
    )
}

fn random_window(rng: &mut ChaCha8Rng, reach: i64) -> SymbolSequence {
    let bits = (0..2 * reach + 1).map(|_| rng.gen_range(0..2u8)).collect();
    SymbolSequence::window(bits, -reach).unwrap()
}

fn symbolic_dynamics() -> Outcome {
    timed(5.0, || {
        let counts_ok = (1..=12).all(|m| enumerate_fixed(m).map(|v| v.len() == 1 << m).unwrap_or(false));

        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let w = 16;
        let mut axioms_ok = true;
        for _ in 0..1000 {
            let (d, e, f) = (random_window(&mut rng, 16), random_window(&mut rng, 16), random_window(&mut rng, 16));
            let r = |u: &SymbolSequence, v: &SymbolSequence| metric(u, v, w).unwrap().0;
            let (de, ed, df, ef) = (r(&d, &e), r(&e, &d), r(&d, &f), r(&e, &f));
            axioms_ok &= de >= 0.0 && de == ed && r(&d, &d) == 0.0 && df <= de + ef + 1e-15;
            axioms_ok &= (de == 0.0) == d.agrees_on(&e, -16..=16);
        }

        let dense = dense_orbit(8).map_err(fmt_err)?;
        let words_ok = (0u32..256).all(|code| {
            let word: Vec<u8> = (0..8).rev().map(|k| (code >> k & 1) as u8).collect();
            find_word(&dense, &word).is_some_and(|n| dense.shift_n(n).unwrap().agrees_on(
                &SymbolSequence::window(word.clone(), 0).unwrap(),
                0..=7,
            ))
        });

        let zeros = SymbolSequence::zeros();
        let (e, n) = sensitivity_witness(&zeros, 3).map_err(fmt_err)?;
        let mut witness_ok = n == 4 && e.get(4) == Some(1) && e.agrees_on(&zeros, -3..=3);
        witness_ok &= metric(&zeros.shift_n(n).unwrap(), &e.shift_n(n).unwrap(), 3).unwrap().0 >= 1.0;
        witness_ok &= sensitivity_witness(&zeros, 10).map(|(_, n)| n == 11).unwrap_or(false);
        for _ in 0..100 {
            let wd = rng.gen_range(1..=10u32);
            let d = random_window(&mut rng, 2 * wd as i64 + 1);
            let (e, n) = sensitivity_witness(&d, wd).unwrap();
            let (before, bound) = metric(&d, &e, wd).unwrap();
            let after = metric(&d.shift_n(n).unwrap(), &e.shift_n(n).unwrap(), wd).unwrap().0;
            witness_ok &= before <= bound && after >= 1.0;
        }
        check(
            counts_ok && axioms_ok && words_ok && witness_ok,
            format!("2^m counts {counts_ok}, metric axioms {axioms_ok}, 256 words {words_ok}, witness {witness_ok}"),
        )
    })
}

const GOLDEN_WAV: [u8; 60] = [
    b'R', b'I', b'F', b'F', 0x34, 0x00, 0x00, 0x00, b'W', b'A', b'V', b'E', //
    b'f', b'm', b't', b' ', 0x10, 0x00, 0x00, 0x00, 0x01, 0x00, 0x01, 0x00, //
    0x44, 0xAC, 0x00, 0x00, 0x88, 0x58, 0x01, 0x00, 0x02, 0x00, 0x10, 0x00, //
    b'd', b'a', b't', b'a', 0x10, 0x00, 0x00, 0x00, //
    0x00, 0x00, 0x00, 0x40, 0x00, 0xC0, 0xFF, 0x7F, 0x01, 0x80, 0x00, 0x20, 0x00, 0xE0, 0xDE, 0x7F,
];

fn wav_golden() -> Outcome {
    let buf = AudioBuffer { sample_rate: 44_100, samples: vec![0.0, 0.5, -0.5, 1.0, -1.0, 0.25, -0.25, 0.999] };
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("golden.wav");
    write_wav(&buf, &path).map_err(fmt_err)?;
    let bytes = std::fs::read(&path).map_err(|e| e.to_string())?;
    let golden = bytes == GOLDEN_WAV;

    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let noise = AudioBuffer { sample_rate: 8000, samples: (0..5000).map(|_| rng.gen_range(-1.0..=1.0)).collect() };
    write_wav(&noise, &path).map_err(fmt_err)?;
    let back = read_wav(&path).map_err(fmt_err)?;
    let worst = noise.samples.iter().zip(&back.samples).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
    let round_trip = back.samples.len() == noise.samples.len() && worst <= 1.0 / 32767.0;
    check(golden && round_trip, format!("byte-exact {golden} ({} bytes), max round-trip error {worst:.2e}", bytes.len()))
}

fn rk4_order() -> Outcome {
    let p = Params::autonomous(0.0);
    let mut pts = Vec::new();
    for dt_nominal in [1e-2, 5e-3, 2.5e-3] {
        let n = (TAU / dt_nominal).round() as usize;
        let dt = TAU / n as f64;
        let traj = integrate(SystemForm::ForcedStandard, &p, State::new(0.0, 1.0, 0.0), dt, n).map_err(fmt_err)?;
        let end = traj.last();
        let err = (end.x - 1.0).hypot(end.y);
        pts.push((dt.ln(), err.ln()));
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    check((slope - 4.0).abs() <= 0.2, format!("log-log slope {slope:.4}"))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 14] = [
        ("limit-cycle amplitude", limit_cycle_amplitude),
        ("averaged closed form", averaged_closed_form),
        ("f1 identity", f1_identity),
        ("second-order frequency", second_order_frequency),
        ("Liénard conditions", lienard),
        ("amplitude cubic", amplitude_cubic),
        ("entrainment", entrainment),
        ("chaos: Lyapunov", lyapunov_chaos),
        ("sensitive dependence", sensitive_dependence),
        ("spectral counts", spectral_counts),
        ("quasi-periodic peak structure", quasi_periodic_peaks),
        ("symbolic dynamics", symbolic_dynamics),
        ("WAV golden file", wav_golden),
        ("RK4 order", rk4_order),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
