use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value at t = {t}")]
    NonFinite { t: f64 },
    #[error("solution left the bounded region (|x| or |y| > {limit:e}) at t = {t}")]
    BlowUp { t: f64, limit: f64 },
    #[error("invalid step size {0}: must be positive and finite")]
    InvalidStep(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("r = {0} is not an equilibrium of the averaged amplitude equation")]
    NotEquilibrium(f64),
    #[error("root finder did not converge after {iterations} iterations (residual {residual:e})")]
    ConvergenceFailure { iterations: usize, residual: f64 },
    #[error("Jacobian determinant {0:e} is too small to certify the solution")]
    SingularJacobian(f64),
    #[error("separation underflowed to {0:e}; increase d0 or shorten the renormalization interval")]
    DegenerateSeparation(f64),
    #[error("series of length {len} is too short (need at least {min})")]
    TooShort { len: usize, min: usize },
    #[error("sequence does not cover indices [{lo}, {hi}]")]
    Coverage { lo: i64, hi: i64 },
    #[error("window no longer covers the origin after shifting")]
    WindowExhausted,
    #[error("request exceeds the enumeration budget ({0})")]
    BudgetExceeded(String),
    #[error("spacing {value} at position {index} matches neither (2n-1)π nor (2n+1)π")]
    UnrecognizedSpacing { index: usize, value: f64 },
    #[error("cannot parse symbol sequence: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
