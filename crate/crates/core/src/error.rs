use thiserror::Error;

/// Errors raised by profile construction and the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A numerical routine failed to reach its tolerance.
    #[error("numeric failure: {message} (achieved {achieved:e})")]
    Numeric { message: String, achieved: f64 },
    /// Bisection ran out of iterations; `lo`/`hi` is the last bracket.
    #[error("bisection did not converge within {iterations} iterations, bracket [{lo}, {hi}]")]
    Bracket { iterations: usize, lo: f64, hi: f64 },
    /// The initial erosion speed is unbounded (`r0(lambda0-) = 0`).
    #[error("unbounded initial speed at level {level}: open case, enable exploratory mode")]
    OpenCase { level: f64 },
    /// The trajectory did not reach zero before `t_max`.
    #[error("no extinction before t_max = {t_max}")]
    NotExtinct { t_max: f64 },
    /// Exhaustive enumeration would exceed its budget.
    #[error("enumeration of {count} candidates exceeds the budget of {budget}")]
    Budget { count: u128, budget: u128 },
    /// Malformed profile or config text.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
