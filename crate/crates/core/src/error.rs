use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    Parameter(String),

    #[error("outside the model domain: {0}")]
    Domain(String),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("no arctangent branch satisfies the crossing equation at omega = {omega}")]
    Branch { omega: f64 },

    #[error("Newton iteration did not converge after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("linear system is numerically singular (pivot ratio {ratio:e})")]
    SingularSystem { ratio: f64 },

    #[error("invalid step: {0}")]
    Step(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("reduced equation overflowed at t = {t}")]
    Overflow { t: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
