//! Stored parameter sets for regenerating the data behind each figure.


use clap::Parser;
use vdp_core::averaging::{self, Order};
use vdp_core::spectra::linspace;

use crate::args::Cli;
use crate::commands;
use crate::error::{CliError, CliResult};
use crate::run::Run;

enum Step {
    /// Subcommand line; `--tag` is appended.
    Cli(&'static str),
    /// Closed-form averaged amplitude `r(t)` on `[0, t_max]`.
    Amplitude { a: f64, r0: f64, t_max: f64 },
    /// First-order averaged solutions `x(t)` for several initial amplitudes.
    Averaged { a: f64, r0s: &'static [f64], t_max: f64 },
    /// Entrained amplitude against detuning σ on `[-b/2a, b/2a]`.
    Response { a: f64, b: f64, points: usize },
}

pub struct Figure {
    pub name: &'static str,
    pub title: &'static str,
    steps: &'static [(&'static str, Step)],
    notes: &'static [&'static str],
}

const DESK_TRANSIENT: &str =
    "bifurcation transient of 500 forcing periods; the full protocol samples after ~9950 periods (add --transient-periods 9950)";
const ZERO_START: &str = "scans start every value from (x0, y0) = (0, 0)";

macro_rules! fig {
    ($name:literal, $title:literal, [$(($suffix:literal, $step:expr)),* $(,)?] $(, notes: [$($note:expr),* $(,)?])?) => {
        Figure { name: $name, title: $title, steps: &[$(($suffix, $step)),*], notes: &[$($($note),*)?] }
    };
}

pub static FIGURES: &[Figure] = &[
    fig!("fig2.1", "averaged amplitude r(t), a = 0.1, r0 = 1", [("", Step::Amplitude { a: 0.1, r0: 1.0, t_max: 100.0 })]),
    fig!("fig2.2", "limit cycle, a = 0.1", [("", Step::Cli("simulate -a 0.1 -b 0 --x0 0.5 --t-max 300 --every 10"))],
        notes: ["initial point (0.5, 0) and t-max 300 are choices; the caption gives only a"]),
    fig!("fig2.3", "averaged solutions inside and outside the limit cycle, a = 0.1",
        [("", Step::Averaged { a: 0.1, r0s: &[0.5, 3.0], t_max: 100.0 })],
        notes: ["initial amplitudes 0.5 and 3 are choices; the caption gives only a"]),
    fig!("fig2.4", "relaxation oscillation, a = 8",
        [("", Step::Cli("simulate -a 8 -b 0 --form lienard-plane --x0 0.5 --t-max 100 --every 10"))]),
    fig!("fig3.4", "entrained amplitude against detuning", [("", Step::Response { a: 1.0, b: 1.0, points: 201 })],
        notes: ["a = b = 1 is a choice; the figure states no parameters"]),
    fig!("fig4.1a", "limit cycle, a = 0.2", [("", Step::Cli("simulate -a 0.2 -b 0 --t-max 100 --every 10"))]),
    fig!("fig4.1b", "limit cycle, a = 1.4", [("", Step::Cli("simulate -a 1.4 -b 0 --t-max 100 --every 10"))]),
    fig!("fig4.1c", "limit cycle, a = 6", [("", Step::Cli("simulate -a 6 -b 0 --t-max 100 --every 10"))]),
    fig!("fig4.1d", "limit cycle, a = 0.4", [("", Step::Cli("simulate -a 0.4 -b 0 --t-max 100 --every 10"))]),
    fig!("fig4.2", "drifting orbit, a = 5, b = 15, ω = 7", [
        ("", Step::Cli("poincare -a 5 -b 15 -w 7 --x0 0.5")),
        ("-series", Step::Cli("simulate -a 5 -b 15 -w 7 --x0 0.5 --t-max 100 --every 10")),
    ]),
    fig!("fig4.3", "locked orbit, a = 5, b = 25, ω = 7", [
        ("", Step::Cli("poincare -a 5 -b 25 -w 7 --x0 0.5")),
        ("-series", Step::Cli("simulate -a 5 -b 25 -w 7 --x0 0.5 --t-max 100 --every 10")),
    ]),
    fig!("fig4.4", "drifting orbit, a = 5, b = 50, ω = 7", [
        ("", Step::Cli("poincare -a 5 -b 50 -w 7 --x0 0.5")),
        ("-series", Step::Cli("simulate -a 5 -b 50 -w 7 --x0 0.5 --t-max 100 --every 10")),
    ]),
    fig!("fig4.5", "locked orbit, a = 5, b = 55, ω = 7", [
        ("", Step::Cli("poincare -a 5 -b 55 -w 7 --x0 0.5")),
        ("-series", Step::Cli("simulate -a 5 -b 55 -w 7 --x0 0.5 --t-max 100 --every 10")),
    ]),
    fig!("fig4.6a", "bifurcation in b, a = 5, ω = 3",
        [("", Step::Cli("bifurcate -a 5 -w 3 --axis b --lo 0.01 --hi 53 --step 0.1 --x0 0"))],
        notes: [DESK_TRANSIENT, ZERO_START]),
    fig!("fig4.6b", "bifurcation in b, a = 5, ω = 7",
        [("", Step::Cli("bifurcate -a 5 -w 7 --axis b --lo 0.01 --hi 80 --step 0.1 --x0 0"))],
        notes: [DESK_TRANSIENT, ZERO_START]),
    fig!("fig4.7", "bifurcation in b with periods, a = 5, ω = 7",
        [("", Step::Cli("bifurcate -a 5 -w 7 --axis b --lo 0.01 --hi 80 --step 0.1 --x0 0"))],
        notes: [DESK_TRANSIENT, ZERO_START]),
    fig!("fig4.8a", "bifurcation in ω, a = 3, b = 5", [
        ("-coarse", Step::Cli("bifurcate -a 3 -b 5 --axis omega --lo 0.1 --hi 0.9 --step 0.1 --x0 0")),
        ("-fine", Step::Cli("bifurcate -a 3 -b 5 --axis omega --lo 1 --hi 7 --step 0.001 --x0 0")),
    ], notes: [DESK_TRANSIENT, ZERO_START, "the stated steps give 6010 values, not the 4100 quoted alongside them"]),
    fig!("fig4.8b", "bifurcation in ω from 7 to 17, a = 3, b = 5",
        [("", Step::Cli("bifurcate -a 3 -b 5 --axis omega --lo 7 --hi 17 --step 0.01 --x0 0"))],
        notes: [DESK_TRANSIENT, ZERO_START, "step 0.01 is a choice; none is stated"]),
    fig!("fig4.9", "bifurcation in ω with periods, a = b = 5",
        [("", Step::Cli("bifurcate -a 5 -b 5 --axis omega --lo 0.1 --hi 7 --step 0.01 --x0 0"))],
        notes: [DESK_TRANSIENT, ZERO_START, "range 0.1..7 and step 0.01 are choices; none are stated"]),
    fig!("fig4.10", "bifurcation in ω, a = 5, b = 25",
        [("", Step::Cli("bifurcate -a 5 -b 25 --axis omega --lo 0.1 --hi 7 --step 0.01 --x0 0"))],
        notes: [DESK_TRANSIENT, ZERO_START, "range 0.1..7 and step 0.01 are choices; none are stated"]),
    fig!("fig4.11", "period-doubling cascades in ω, a = b = 5",
        [("", Step::Cli("bifurcate -a 5 -b 5 --axis omega --lo 2 --hi 6 --step 0.001 --x0 0"))],
        notes: [DESK_TRANSIENT, ZERO_START, "step 0.001 is a choice; none is stated"]),
    fig!("fig4.12", "sections along a period-doubling cascade, a = b = 5", [
        ("-2.457", Step::Cli("poincare -a 5 -b 5 -w 2.457")),
        ("-2.460", Step::Cli("poincare -a 5 -b 5 -w 2.460")),
        ("-2.463", Step::Cli("poincare -a 5 -b 5 -w 2.463")),
        ("-2.466", Step::Cli("poincare -a 5 -b 5 -w 2.466")),
        ("-2.469", Step::Cli("poincare -a 5 -b 5 -w 2.469")),
    ], notes: ["sections with period verdicts stand in for the phase portraits; the intermediate ω values are choices"]),
    fig!("fig4.13", "sections along a faster cascade, a = b = 5", [
        ("-3.365", Step::Cli("poincare -a 5 -b 5 -w 3.365")),
        ("-3.370", Step::Cli("poincare -a 5 -b 5 -w 3.370")),
        ("-3.374", Step::Cli("poincare -a 5 -b 5 -w 3.374")),
        ("-3.375", Step::Cli("poincare -a 5 -b 5 -w 3.375")),
    ], notes: ["sections with period verdicts stand in for the phase portraits; the intermediate ω values are choices"]),
    fig!("fig4.14", "strange attractor section, a = 3, b = 5, ω = 1.788",
        [("", Step::Cli("poincare -a 3 -b 5 -w 1.788 --points 5000"))]),
    fig!("fig4.15", "strange attractor section, a = 5, b = 5, ω = 3.37015",
        [("", Step::Cli("poincare -a 5 -b 5 -w 3.37015 --points 5000"))]),
    fig!("fig4.16", "strange attractor section, a = 5, b = 25, ω = 4.455",
        [("", Step::Cli("poincare -a 5 -b 25 -w 4.455 --points 5000"))]),
    fig!("fig4.17", "divergence of nearby starts, a = 3, b = 5, ω = 1.788",
        [("", Step::Cli("diverge -a 3 -b 5 -w 1.788 --x0 0.5 --y0 0 --delta 1e-5"))]),
    fig!("fig4.18", "divergence of nearby starts, a = 5, b = 25, ω = 4.455",
        [("", Step::Cli("diverge -a 5 -b 25 -w 4.455 --x0 0.5 --y0 0 --delta 1e-5"))]),
    fig!("fig4.19", "spectrum of a periodic orbit, a = 5, b = 40, ω = 7",
        [("", Step::Cli("spectrum -a 5 -b 40 -w 7 --x0 0"))]),
    fig!("fig4.20", "spectrum of an almost-periodic orbit, a = 5, b = 15, ω = 7",
        [("", Step::Cli("spectrum -a 5 -b 15 -w 7 --x0 0"))]),
    fig!("fig4.21", "spectrum of a chaotic orbit, a = 3, b = 5, ω = 1.788",
        [("", Step::Cli("spectrum -a 3 -b 5 -w 1.788 --x0 0"))]),
    fig!("fig4.21a", "spectra for 22 < b < 29, a = 5, ω = 7",
        [("", Step::Cli("spectrum -a 5 -b 22 -w 7 --x0 0 --sweep 22:29:20"))]),
    fig!("fig4.21b", "spectra for 27 < b < 30, a = 5, ω = 7",
        [("", Step::Cli("spectrum -a 5 -b 27 -w 7 --x0 0 --sweep 27:30:20"))],
        notes: ["20 sweep values is a choice; the count is not stated"]),
    fig!("fig4.22", "sound of a periodic orbit, a = 5, b = 40, ω = 7",
        [("", Step::Cli("sonify -a 5 -b 40 -w 7"))]),
    fig!("fig4.23", "sound of an almost-periodic orbit, a = 5, b = 15, ω = 7",
        [("", Step::Cli("sonify -a 5 -b 15 -w 7"))]),
    fig!("fig4.24", "sound of a chaotic orbit, a = 3, b = 5, ω = 1.788",
        [("", Step::Cli("sonify -a 3 -b 5 -w 1.788"))]),
];

pub fn find(name: &str) -> CliResult<&'static Figure> {
    FIGURES.iter().find(|f| f.name == name).ok_or_else(|| {
        CliError::usage(format!("unknown figure {name:?}; `vdp-lab figure --list` shows the available names"))
    })
}

pub fn list() {
    for f in FIGURES {
        println!("{:<9} {}", f.name, f.title);
    }
}

const AMPLITUDE_DT: f64 = 0.1;

fn grid(t_max: f64) -> Vec<f64> {
    let n = (t_max / AMPLITUDE_DT).round() as usize;
    (0..=n).map(|i| i as f64 * AMPLITUDE_DT).collect()
}

fn run_step(tag: &str, step: &Step, run: &mut Run) -> CliResult<()> {
    match step {
        Step::Cli(line) => {
            run.note(format!("{tag}: {line}"));
            let argv = ["vdp-lab"].into_iter().chain(line.split_whitespace()).chain(["--tag", tag]);
            let cli = Cli::try_parse_from(argv).map_err(|e| CliError::usage(format!("preset {tag}: {e}")))?;
            commands::execute(&cli.command, run)
        }
        Step::Amplitude { a, r0, t_max } => {
            let rows = grid(*t_max)
                .into_iter()
                .map(|t| averaging::averaged_amplitude(*r0, *a, t).map(|r| (t, r)))
                .collect::<vdp_core::Result<Vec<_>>>()?;
            run.sampling("a", *a);
            run.sampling("r0", *r0);
            run.sampling("dt", AMPLITUDE_DT);
            run.write(&format!("{tag}.csv"), |w| {
                writeln!(w, "t,r")?;
                rows.iter().try_for_each(|(t, r)| writeln!(w, "{t},{r}"))
            })
        }
        Step::Averaged { a, r0s, t_max } => {
            let ts = grid(*t_max);
            let mut cols = Vec::with_capacity(r0s.len());
            for &r0 in *r0s {
                let xs = ts
                    .iter()
                    .map(|&t| averaging::averaged_solution(Order::First, r0, 0.0, *a, t))
                    .collect::<vdp_core::Result<Vec<_>>>()?;
                cols.push(xs);
            }
            run.sampling("a", *a);
            run.sampling("r0", r0s.to_vec());
            run.sampling("dt", AMPLITUDE_DT);
            run.write(&format!("{tag}.csv"), |w| {
                write!(w, "t")?;
                r0s.iter().try_for_each(|r0| write!(w, ",x_r0_{r0}"))?;
                writeln!(w)?;
                for (i, t) in ts.iter().enumerate() {
                    write!(w, "{t}")?;
                    cols.iter().try_for_each(|c| write!(w, ",{}", c[i]))?;
                    writeln!(w)?;
                }
                Ok(())
            })
        }
        Step::Response { a, b, points } => {
            let edge = b / (2.0 * a);
            let curve = averaging::amplitude_curve(*a, *b, &linspace(-edge, edge, *points))?;
            run.sampling("a", *a);
            run.sampling("b", *b);
            run.sampling("points", *points);
            run.write(&format!("{tag}.csv"), |w| averaging::write_amplitude_csv(&curve, w))
        }
    }
}

pub fn regenerate(fig: &Figure, run: &mut Run) -> CliResult<()> {
    for note in fig.notes {
        run.note(*note);
    }
    for (suffix, step) in fig.steps {
        run_step(&format!("{}{}", fig.name, suffix), step, run)?;
    }
    Ok(())
}
