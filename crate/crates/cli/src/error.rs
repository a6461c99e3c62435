use cirlan_core::CirError;
use thiserror::Error;

/// Failure of a command, carrying the process exit code it maps to.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Domain(_) => 3,
            CliError::Data(_) => 4,
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<CirError> for CliError {
    fn from(e: CirError) -> Self {
        match e {
            CirError::InvalidScheme(_) | CirError::TooFewSamples { .. } => {
                CliError::Config(e.to_string())
            }
            CirError::DegenerateDesign | CirError::EmptySample => CliError::Data(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}
