//! Shared fixtures for the solver benchmarks.

use remest_core::ModelParams;

/// Asymmetric prioritized source over a lossy channel; the heaviest of the
/// reference parameter sets.
pub fn asymmetric_params() -> ModelParams {
    ModelParams::new(0.2, 0.3, 0.9, 0.8, 8.0).expect("valid reference parameters")
}

/// Symmetric non-prioritized source, the diagonal fast-path regime.
pub fn symmetric_params() -> ModelParams {
    ModelParams::new(0.25, 0.25, 0.9, 0.5, 8.0).expect("valid reference parameters")
}
