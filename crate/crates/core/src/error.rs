use thiserror::Error;

/// Errors produced by the DMT evaluators, program builders and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DmtError {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("{what} = {value} is outside the domain [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// A configuration value is invalid (zero antennas, non-positive exponent, ...).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A theorem's hypotheses do not hold for the supplied configuration.
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    /// A piecewise-linear program violates its structural invariants.
    #[error("invalid program: {0}")]
    InvalidProgram(String),

    /// The grid oracle refuses instances above its dimension guard.
    #[error("grid oracle supports at most {max} variables, program has {got}")]
    DimensionGuard { max: usize, got: usize },

    /// No feasible point exists. Never expected for channel-generated programs.
    #[error("program is infeasible")]
    Infeasible,

    /// The simplex iteration did not converge within its pivot budget.
    #[error("simplex did not terminate after {0} pivots")]
    PivotLimit(usize),

    /// An eigen-exponent vector lies outside the support of its density.
    #[error("point lies outside the support: {0}")]
    OutsideSupport(String),

    /// Too few SNR points carry enough outage events for a slope fit.
    #[error("insufficient outage events: {usable} usable SNR points, need at least 3 with >= {min_hits} hits")]
    InsufficientOutageEvents { usable: usize, min_hits: u64 },
}

pub type Result<T, E = DmtError> = std::result::Result<T, E>;
