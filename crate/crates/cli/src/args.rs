use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use vdp_core::spectra::FftLength;
use vdp_core::SystemForm;

#[derive(Debug, Parser)]
#[command(name = "vdp-lab", version, about = "Numerical experiments on the forced Van der Pol oscillator")]
pub struct Cli {
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    /// Worker threads for scans and sweeps [env: VDP_JOBS; default: available cores].
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// key=value file whose entries act as defaults for the subcommand's flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one trajectory and write t,x,y.
    Simulate(SimulateArgs),
    /// Stroboscopic Poincaré section and period verdict.
    Poincare(PoincareArgs),
    /// Poincaré x-values and periods along a parameter axis.
    Bifurcate(BifurcateArgs),
    /// Largest Lyapunov exponent.
    Lyapunov(LyapunovArgs),
    /// Two nearby trajectories and their separation.
    Diverge(DivergeArgs),
    /// Power spectrum, significant peaks and regime label.
    Spectrum(SpectrumArgs),
    /// Render a peak list as a WAV file.
    Sonify(SonifyArgs),
    /// Shift-space constructions.
    Symdyn(SymdynArgs),
    /// Regenerate the data behind a named figure.
    Figure(FigureArgs),
    /// Re-run a manifest written by an earlier command.
    Replay(ReplayArgs),
}

impl Command {
    pub fn tag(&self) -> Option<&str> {
        match self {
            Self::Simulate(a) => Some(&a.tag),
            Self::Poincare(a) => Some(&a.tag),
            Self::Bifurcate(a) => Some(&a.tag),
            Self::Lyapunov(a) => Some(&a.tag),
            Self::Diverge(a) => Some(&a.tag),
            Self::Spectrum(a) => Some(&a.tag),
            Self::Sonify(a) => Some(&a.tag),
            Self::Symdyn(a) => Some(&a.tag),
            Self::Figure(_) | Self::Replay(_) => None,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Damping a.
    #[arg(short = 'a', long = "a", allow_negative_numbers = true)]
    pub a: f64,
    /// Forcing amplitude b.
    #[arg(short = 'b', long = "b", default_value_t = 0.0, allow_negative_numbers = true)]
    pub b: f64,
    /// Forcing frequency ω.
    #[arg(short = 'w', long = "omega", default_value_t = 1.0)]
    pub omega: f64,
    /// Forcing phase θ.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub x0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub y0: f64,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub p: ParamArgs,
    #[arg(long, default_value = "forced-standard")]
    pub form: SystemForm,
    /// Step size [default: T/1000 when forced, 1e-3 otherwise].
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long = "t-max", default_value_t = 100.0)]
    pub t_max: f64,
    /// Keep every k-th step.
    #[arg(long, default_value_t = 1)]
    pub every: usize,
    /// Base name of the output files.
    #[arg(long, default_value = "simulate")]
    pub tag: String,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct PoincareArgs {
    #[command(flatten)]
    pub p: ParamArgs,
    #[arg(long = "transient-periods", default_value_t = 500.0)]
    pub transient_periods: f64,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    #[arg(long = "steps-per-period", default_value_t = 1000)]
    pub steps_per_period: usize,
    /// Clustering radius for the period verdict.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, default_value = "poincare")]
    pub tag: String,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct BifurcateArgs {
    #[command(flatten)]
    pub p: ParamArgs,
    #[arg(long, default_value = "b")]
    pub axis: vdp_core::forced::ScanAxis,
    #[arg(long)]
    pub lo: f64,
    #[arg(long)]
    pub hi: f64,
    #[arg(long)]
    pub step: f64,
    /// Section points per parameter value.
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    #[arg(long = "transient-periods", default_value_t = 500.0)]
    pub transient_periods: f64,
    #[arg(long = "steps-per-period", default_value_t = 1000)]
    pub steps_per_period: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    /// Start each value from the previous value's final state.
    #[arg(long)]
    pub continuation: bool,
    #[arg(long, default_value = "bifurcate")]
    pub tag: String,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct LyapunovArgs {
    #[command(flatten)]
    pub p: ParamArgs,
    #[arg(long, default_value_t = 1e-8)]
    pub d0: f64,
    /// Number of renormalizations.
    #[arg(long, default_value_t = 2000)]
    pub renorm: usize,
    /// Transient, in renormalization intervals.
    #[arg(long = "transient-periods", default_value_t = 500.0)]
    pub transient_periods: f64,
    #[arg(long = "steps-per-interval", default_value_t = 1000)]
    pub steps_per_interval: usize,
    #[arg(long, default_value = "lyapunov")]
    pub tag: String,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct DivergeArgs {
    #[command(flatten)]
    pub p: ParamArgs,
    /// Offset added to both coordinates of the second trajectory.
    #[arg(long, default_value_t = 1e-5)]
    pub delta: f64,
    /// Duration in forcing periods.
    #[arg(long, default_value_t = 200.0)]
    pub periods: f64,
    #[arg(long = "steps-per-period", default_value_t = 1000)]
    pub steps_per_period: usize,
    #[arg(long = "record-every", default_value_t = 10)]
    pub record_every: usize,
    #[arg(long, default_value = "diverge")]
    pub tag: String,
}

#[derive(Debug, Clone, Args)]
pub struct SamplingArgs {
    #[arg(long = "transient-periods", default_value_t = 9000)]
    pub transient_periods: usize,
    #[arg(long = "window-periods", default_value_t = 1000)]
    pub window_periods: usize,
    #[arg(long = "points-per-period", default_value_t = 20)]
    pub points_per_period: usize,
    #[arg(long = "steps-per-period", default_value_t = 1000)]
    pub steps_per_period: usize,
    /// Transform length: pow2 (largest power of two) or full.
    #[arg(long, default_value = "pow2")]
    pub fft: FftLength,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub p: ParamArgs,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    /// Peak threshold, percent of the largest magnitude.
    #[arg(long, default_value_t = 0.5)]
    pub minp: f64,
    /// Also sweep b over LO:HI:COUNT and write the spectrum matrix.
    #[arg(long, value_name = "LO:HI:COUNT")]
    pub sweep: Option<String>,
    #[arg(long, default_value = "spectrum")]
    pub tag: String,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SonifyArgs {
    /// freq,mag,rel peak list; without it the spectrum is computed from -a/-b/-w.
    #[arg(long, conflicts_with_all = ["a", "b", "omega"])]
    pub peaks: Option<PathBuf>,
    #[arg(short = 'a', long = "a", required_unless_present = "peaks")]
    pub a: Option<f64>,
    #[arg(short = 'b', long = "b")]
    pub b: Option<f64>,
    #[arg(short = 'w', long = "omega")]
    pub omega: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub y0: f64,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[arg(long, default_value_t = 0.5)]
    pub minp: f64,
    /// Multiplier from oscillator frequency to audio frequency.
    #[arg(long = "k-scale", default_value_t = 1e3)]
    pub k_scale: f64,
    /// Seconds of audio.
    #[arg(long, default_value_t = 4.0)]
    pub duration: f64,
    /// Sample rate in Hz.
    #[arg(long, default_value_t = 44_100)]
    pub rate: u32,
    #[arg(long, default_value = "sonify")]
    pub tag: String,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SymdynArgs {
    #[command(subcommand)]
    pub action: SymdynAction,
    #[arg(long, default_value = "symdyn", global = true)]
    pub tag: String,
}

#[derive(Debug, Subcommand)]
pub enum SymdynAction {
    /// All sequences fixed by σ^m.
    Enumerate {
        #[arg(short = 'm', long)]
        m: u32,
    },
    /// Distance between two sequences, e.g. "100.101" or "(10)@0".
    Metric {
        d: String,
        e: String,
        #[arg(long, default_value_t = 16)]
        window: u32,
    },
    /// Apply the Bernoulli shift n times.
    Shift {
        d: String,
        #[arg(short = 'n', long, default_value_t = 1)]
        n: usize,
    },
    /// Sequence whose orbit visits every word up to the given length.
    Dense {
        #[arg(long, default_value_t = 8)]
        depth: u32,
    },
    /// A nearby sequence that separates after W + 1 shifts.
    Witness {
        d: String,
        #[arg(long, default_value_t = 8)]
        window: u32,
    },
    /// Symbols for comma-separated spacings (in units of π with --in-pi).
    Encode {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        spacings: Vec<f64>,
        #[arg(short = 'n', long)]
        n: u32,
        #[arg(long, default_value_t = 0.1)]
        tol: f64,
        /// Spacings and --tol are given as multiples of π.
        #[arg(long = "in-pi")]
        in_pi: bool,
    },
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// Figure name, e.g. fig4.3; omit with --list.
    #[arg(required_unless_present = "list")]
    pub name: Option<String>,
    /// List the available figures.
    #[arg(long)]
    pub list: bool,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}
