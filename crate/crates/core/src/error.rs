use crate::distribution::LLParams;
use thiserror::Error;

/// Errors produced by the distribution, estimation and goodness-of-fit routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Tied x values make a pairwise slope undefined.
    #[error("tied observations at {value}: pairwise slopes are undefined")]
    Ties { value: f64 },

    /// The two percentiles used by a percentile estimator coincide.
    #[error("percentile estimator exploded: t_low = t_high = {value}")]
    Explosion { value: f64 },

    /// A scale estimate of zero, so the shape estimate 1/scale is infinite.
    #[error("degenerate scale: {estimator} is zero")]
    DegenerateScale { estimator: &'static str },

    /// A regression fit produced a non-positive or non-finite shape.
    #[error("non-identifiable fit: regression slope {slope}")]
    NonIdentifiable { slope: f64 },

    /// The likelihood solver hit its iteration budget.
    #[error("MLE did not converge after {iterations} iterations (score norm {score_norm:e})")]
    NonConvergence { best: LLParams, iterations: usize, score_norm: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
