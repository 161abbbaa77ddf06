use thiserror::Error;

/// Errors surfaced by model construction, solvers, and the simulator.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid policy: {0}")]
    InvalidPolicy(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("truncation size {n} must exceed the largest threshold {max_threshold}")]
    TruncationTooSmall { n: u32, max_threshold: u32 },

    #[error("truncation size must be at least {min}, got {n}")]
    TruncationBelowMinimum { n: u32, min: u32 },

    #[error(
        "no truncation size up to {n_max} brings the cost gap below {epsilon:.3e} \
         (gap at {n_max} is {gap_at_max:.3e})"
    )]
    TruncationBudgetExceeded {
        n_max: u32,
        epsilon: f64,
        gap_at_max: f64,
    },

    #[error("value iteration did not converge after {iterations} sweeps (span {span:.3e})")]
    NonConvergence { iterations: u64, span: f64 },

    #[error("distribution horizons differ: {left} vs {right}")]
    HorizonMismatch { left: usize, right: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
