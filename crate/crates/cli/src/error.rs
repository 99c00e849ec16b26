use std::fmt;

/// Process exit status for each failure class.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const NUMERIC: i32 = 3;
    pub const IO: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] vdp_core::Error),
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("manifest: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn usage(msg: impl fmt::Display) -> Self {
        Self::Usage(msg.to_string())
    }

    pub fn file(path: impl fmt::Display, source: std::io::Error) -> Self {
        Self::File { path: path.to_string(), source }
    }

    pub fn exit_code(&self) -> i32 {
        use vdp_core::Error as E;
        match self {
            Self::Usage(_) | Self::Json(_) => exit::USAGE,
            Self::File { .. } => exit::IO,
            Self::Core(e) => match e {
                E::Io(_) => exit::IO,
                E::InvalidStep(_)
                | E::InvalidParams(_)
                | E::Domain(_)
                | E::NotEquilibrium(_)
                | E::Parse(_)
                | E::BudgetExceeded(_)
                | E::UnrecognizedSpacing { .. }
                | E::Coverage { .. }
                | E::TooShort { .. } => exit::USAGE,
                E::NonFinite { .. }
                | E::BlowUp { .. }
                | E::ConvergenceFailure { .. }
                | E::SingularJacobian(_)
                | E::DegenerateSeparation(_)
                | E::WindowExhausted => exit::NUMERIC,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
