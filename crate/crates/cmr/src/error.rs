use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, Error)]
pub enum CmrError {
    /// Malformed call: bad index, mismatched dimensions or scalar modes.
    #[error("argument error: {0}")]
    Argument(String),
    /// Evaluation outside the admissible coordinate domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Numerically (or exactly) degenerate configuration, e.g. coincident
    /// diagonalizer nodes or a singular matrix.
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    /// Requested operation is undefined for the given model case or scalar mode.
    #[error("unsupported case: {0}")]
    Unsupported(String),
    /// Time evolution left the admissible domain; `step` is the last valid step.
    #[error("trajectory left the admissible domain after step {step} (t = {t})")]
    Evolution { step: usize, t: f64 },
    /// A diagnostic routine could not produce a trustworthy report.
    #[error("diagnostic failure: {0}")]
    Diagnostic(String),
}

pub type Result<T> = std::result::Result<T, CmrError>;
