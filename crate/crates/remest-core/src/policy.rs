//! Unified view over the three policy representations the evaluators accept.

use crate::analytic::{RandomizedPolicy, SwitchingPolicy};
use crate::mdp::PolicyTable;
use crate::model::SystemState;

/// A transmission policy in any of its supported forms.
#[derive(Debug, Clone)]
pub enum Policy {
    Switching(SwitchingPolicy),
    Randomized(RandomizedPolicy),
    Table(PolicyTable),
}

impl Policy {
    /// Probability of transmitting in `s` (0 or 1 for the deterministic
    /// forms; table lookups clamp ages beyond the table's boundary).
    pub fn transmit_prob(&self, s: SystemState) -> f64 {
        match self {
            Policy::Switching(pol) => {
                if pol.transmits(s) {
                    1.0
                } else {
                    0.0
                }
            }
            Policy::Randomized(pol) => pol.rate(s.source()),
            Policy::Table(table) => {
                if table.action(s).transmits() {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn is_deterministic(&self) -> bool {
        !matches!(self, Policy::Randomized(_))
    }
}

impl From<SwitchingPolicy> for Policy {
    fn from(p: SwitchingPolicy) -> Self {
        Policy::Switching(p)
    }
}

impl From<RandomizedPolicy> for Policy {
    fn from(p: RandomizedPolicy) -> Self {
        Policy::Randomized(p)
    }
}

impl From<PolicyTable> for Policy {
    fn from(p: PolicyTable) -> Self {
        Policy::Table(p)
    }
}
