//! Closed-form stationary distributions and average costs.
//!
//! Two policy families are evaluated exactly:
//!
//! * age-agnostic randomized policies, transmitting with a fixed probability
//!   per source state ([`randomized_stationary`], [`randomized_metrics`]);
//! * switching policies with one age threshold per error branch
//!   ([`switching_stationary`], [`switching_metrics`]), including the four
//!   threshold-zero regimes, the age-truncated variants
//!   ([`truncated_stationary`]) and the exact truncation cost gap
//!   ([`truncation_gap`]).

mod distribution;
mod randomized;
pub(crate) mod switching;
mod truncated;

pub use distribution::{GeometricTail, StationaryDistribution};
pub use randomized::{
    randomized_metrics, randomized_stationary, randomized_stationary_with_horizon,
};
pub use switching::{
    switching_metrics, switching_metrics_from_distribution, switching_stationary,
    switching_stationary_with_horizon,
};
pub use truncated::{truncated_stationary, truncation_gap};

use crate::error::{Error, Result};
use crate::model::{SourceState, SystemState};

/// Mass below which enumeration horizons are cut off; tails remain exact.
pub(crate) const HORIZON_MASS_CUTOFF: f64 = 1e-12;
/// Hard cap on enumeration horizons.
pub(crate) const HORIZON_CAP: usize = 100_000;

/// Age-agnostic policy transmitting with probability `f0` in source state 0
/// and `f1` in source state 1, independent of the error ages.
///
/// Both rates must be positive for the closed forms to apply (a rate of zero
/// disconnects part of the chain).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomizedPolicy {
    f0: f64,
    f1: f64,
}

impl RandomizedPolicy {
    pub fn new(f0: f64, f1: f64) -> Result<Self> {
        for (name, f) in [("f0", f0), ("f1", f1)] {
            if !(f > 0.0 && f <= 1.0) || !f.is_finite() {
                return Err(Error::InvalidPolicy(format!(
                    "transmission rate {name} must be in (0, 1], got {f}"
                )));
            }
        }
        Ok(Self { f0, f1 })
    }

    #[inline]
    pub fn f0(&self) -> f64 {
        self.f0
    }

    #[inline]
    pub fn f1(&self) -> f64 {
        self.f1
    }

    /// Transmission probability as a function of the current source state.
    pub fn rate(&self, source: SourceState) -> f64 {
        match source {
            SourceState::Normal => self.f0,
            SourceState::Alarm => self.f1,
        }
    }
}

/// Switching policy: transmit when the age of missed alarm reaches
/// `ma_threshold`, when the age of false alarm reaches `fa_threshold`, and in
/// a synced state when the corresponding threshold is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SwitchingPolicy {
    pub ma_threshold: u32,
    pub fa_threshold: u32,
}

impl SwitchingPolicy {
    pub fn new(ma_threshold: u32, fa_threshold: u32) -> Self {
        Self {
            ma_threshold,
            fa_threshold,
        }
    }

    pub fn max_threshold(&self) -> u32 {
        self.ma_threshold.max(self.fa_threshold)
    }

    /// Deterministic decision rule.
    pub fn transmits(&self, s: SystemState) -> bool {
        match s {
            SystemState::Synced(SourceState::Normal) => self.ma_threshold == 0,
            SystemState::Synced(SourceState::Alarm) => self.fa_threshold == 0,
            SystemState::MissedAlarm(age) => age >= self.ma_threshold,
            SystemState::FalseAlarm(age) => age >= self.fa_threshold,
        }
    }
}

impl std::fmt::Display for SwitchingPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.ma_threshold, self.fa_threshold)
    }
}

/// Long-run performance of a policy: average estimation cost `C`, average
/// transmission frequency `F`, and the combined objective `L = C + lambda F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyMetrics {
    pub avg_cost: f64,
    pub frequency: f64,
    pub objective: f64,
}

impl PolicyMetrics {
    pub fn new(avg_cost: f64, frequency: f64, lambda: f64) -> Self {
        Self {
            avg_cost,
            frequency,
            objective: avg_cost + lambda * frequency,
        }
    }
}

/// Shared horizon rule: `base` ages plus however many more it takes for a
/// geometric factor `ratio` to fall below the mass cutoff, capped.
pub(crate) fn default_horizon(base: u32, ratio: f64) -> usize {
    let extra = if ratio > 0.0 {
        (HORIZON_MASS_CUTOFF.ln() / ratio.ln()).ceil() as usize
    } else {
        0
    };
    (base as usize + extra).min(HORIZON_CAP)
}
