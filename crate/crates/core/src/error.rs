use thiserror::Error;

/// Errors raised by path construction, the analytic evaluators and the
/// Monte Carlo harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A prefix sum dropped below zero; the index is 1-based.
    #[error("prefix sum drops below zero at step {0}")]
    PrefixNegative(usize),

    #[error("path ends at height {0}, expected 0")]
    NonzeroEndpoint(i64),

    #[error("pair partition is crossing")]
    CrossingPartition,

    #[error("index set has odd cardinality {0}")]
    OddSupport(usize),

    #[error("step word sums to {0}, expected -1")]
    BadSum(i64),

    #[error("invalid pair partition: {0}")]
    InvalidPartition(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("transition kernel denominator is not positive at s={s}, x={x}, t={t}, y={y}")]
    SingularDenominator { s: f64, x: f64, t: f64, y: f64 },

    #[error("adaptive quadrature did not reach tolerance (estimated error {estimate:e})")]
    QuadratureFailure { estimate: f64 },

    /// Two evaluators that must agree did not; this signals a bug.
    #[error("internal mismatch in {what}: {detail}")]
    InternalMismatch { what: &'static str, detail: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
