use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config {path}: {message}")]
    Config { path: String, message: String },
    #[error("invalid setup: {0}")]
    Setup(String),
    #[error("{0}")]
    Contract(String),
    #[error("diverged at step {step}: {detail}")]
    Divergence { step: usize, detail: String },
    #[error("solver: {0}")]
    Solver(#[from] msmaxwell::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    /// 1 contract violation, 2 usage or config, 3 numerical divergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Contract(_) => 1,
            HarnessError::Divergence { .. } => 3,
            HarnessError::Solver(msmaxwell::Error::NonFinite { .. } | msmaxwell::Error::StageSolve { .. }) => 3,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(HarnessError::Contract("x".into()).exit_code(), 1);
        assert_eq!(HarnessError::Setup("x".into()).exit_code(), 2);
        assert_eq!(HarnessError::Divergence { step: 3, detail: "nan".into() }.exit_code(), 3);
        let nf = msmaxwell::Error::NonFinite { field: "ex", step: 2 };
        assert_eq!(HarnessError::from(nf).exit_code(), 3);
        let bad = msmaxwell::Error::InvalidGrid("n".into());
        assert_eq!(HarnessError::from(bad).exit_code(), 2);
    }
}
