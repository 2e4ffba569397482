use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),

    #[error("{0}")]
    Validation(String),

    #[error("{0}")]
    Solver(String),

    #[error("{0}")]
    Cap(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Solver(_) => 4,
            CliError::Cap(_) => 5,
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }
}

impl From<steerlp::Error> for CliError {
    fn from(e: steerlp::Error) -> Self {
        use steerlp::Error as E;
        let msg = e.to_string();
        match e {
            E::Io(_) => CliError::Io(msg),
            E::CapExceeded { .. } => CliError::Cap(msg),
            E::Solver(_) | E::Infeasible(_) => CliError::Solver(msg),
            _ => CliError::Validation(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
