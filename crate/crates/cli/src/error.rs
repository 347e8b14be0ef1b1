use std::fmt;

/// Failure of a command, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or unusable input files (exit 2).
    Config(String),
    /// Numerical or I/O failure during the run (exit 1).
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<tubalkit::Error> for CliError {
    fn from(e: tubalkit::Error) -> Self {
        use tubalkit::Error as E;
        match e {
            E::DimMismatch(_)
            | E::InvalidParam(_)
            | E::DomainError { .. }
            | E::RankTooLarge { .. }
            | E::InvalidRate(_)
            | E::InvalidPattern(_)
            | E::ZeroReference
            | E::Format(_) => CliError::Config(e.to_string()),
            E::ResidualImaginary { .. } | E::NoConvergence { .. } | E::MultiplierBoundViolated { .. } | E::Io(_) => {
                CliError::Runtime(e.to_string())
            }
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
