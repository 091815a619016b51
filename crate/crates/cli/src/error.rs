use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error(transparent)]
    Core(#[from] thinlab::Error),
    #[error("{0}")]
    Mismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn config(line: usize, msg: impl Into<String>) -> Self {
        Self::Config { line, msg: msg.into() }
    }

    /// 1 for failed checks and numerical failures, 2 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Mismatch(_) => 1,
            Self::Core(e) => match e {
                thinlab::Error::NoConvergence { .. }
                | thinlab::Error::Unstable(_)
                | thinlab::Error::Refinement(_)
                | thinlab::Error::TGridTooCoarse
                | thinlab::Error::NotThin => 1,
                _ => 2,
            },
            _ => 2,
        }
    }
}
