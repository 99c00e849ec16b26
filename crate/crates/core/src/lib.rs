//! Numerical and analytical laboratory for the autonomous and periodically
//! forced Van der Pol oscillator.
//!
//! * [`ode`]: system forms and the fixed-step RK4 integrator
//! * [`averaging`]: averaged amplitude equations and the forced-response algebra
//! * [`forced`]: Poincaré sections, period detection, bifurcation scans, Lyapunov exponents
//! * [`spectra`]: power spectra, peak extraction and regime classification
//! * [`sonify`]: peak-sum synthesis and 16-bit PCM WAV output
//! * [`symdyn`]: the binary shift space and its chaos properties

// `!(x > 0.0)` rejects NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod averaging;
pub mod error;
pub mod forced;
pub mod ode;
mod parallel;
pub mod sonify;
pub mod spectra;
pub mod symdyn;

pub use error::{Error, Result};
pub use ode::{Params, State, SystemForm, Trajectory};
pub use parallel::default_jobs;
