use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// A size parameter exceeds what the routine can handle in memory or
    /// integer range. `parameter` names the offending input.
    #[error("capacity error: {parameter} = {value} exceeds limit {limit}")]
    Capacity {
        parameter: &'static str,
        value: u128,
        limit: u128,
    },

    #[error("range error: evaluation overflows for theta = {theta}; safe interval is [{min_theta}, {max_theta}]")]
    Range {
        theta: f64,
        min_theta: f64,
        max_theta: f64,
    },

    #[error("no convergence after {iterations} iterations; root bracket [{lo}, {hi}]")]
    NoConvergence { iterations: u32, lo: f64, hi: f64 },

    #[error("degenerate additive function: sigma_n^2 = 0")]
    DegenerateFunction,

    #[error("infeasible gap: delta = {delta} must be below {max_delta}")]
    InfeasibleGap { delta: f64, max_delta: f64 },

    #[error("unsupported spec: {0}")]
    UnsupportedSpec(String),

    /// The requested tail event has zero (or sub-representable) probability.
    #[error("infinite rate: tail probability {tail:e} at threshold {threshold}")]
    InfiniteRate { tail: f64, threshold: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn capacity(parameter: &'static str, value: impl Into<u128>, limit: impl Into<u128>) -> Self {
        Error::Capacity {
            parameter,
            value: value.into(),
            limit: limit.into(),
        }
    }
}
