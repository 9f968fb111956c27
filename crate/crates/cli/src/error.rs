use std::fmt;

/// Command failure, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Malformed or inconsistent input; exit code 2.
    Input(String),
    /// An estimation or numerical step failed; exit code 3.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    /// Wraps an estimation error with the stage that raised it.
    pub fn stage(stage: &str, err: setclass::Error) -> Self {
        match err {
            setclass::Error::DimensionMismatch { .. }
            | setclass::Error::MissingClass(_)
            | setclass::Error::InvalidParameter(_)
            | setclass::Error::EmptySet => CliError::Input(format!("{stage}: {err}")),
            _ => CliError::Numerical(format!("{stage}: {err}")),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numerical(m) => write!(f, "estimation failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
