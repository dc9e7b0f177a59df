use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("cfl_fraction out of range: {0} (expected 0 < cfl <= 1)")]
    CflOutOfRange(f64),
    #[error("index {raw} out of range on {axis:?} axis with {count} cells (non-periodic boundary)")]
    Boundary { axis: crate::Axis, raw: isize, count: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("site mismatch: {0}")]
    SiteMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("insufficient history: need {needed} levels, have {have}")]
    InsufficientHistory { needed: usize, have: usize },
    #[error("non-finite value in {field} after step {step}")]
    NonFinite { field: &'static str, step: usize },
    #[error("stage solve did not converge after {iterations} iterations (last increment {last_increment:e})")]
    StageSolve { iterations: usize, last_increment: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
