//! Exact stationary distribution and average cost of age-agnostic randomized
//! policies.
//!
//! With per-source-state transmission rates `f0`, `f1`, the effective sync
//! probability per slot is `p_s * f_i`; writing `fa_i = p_s * f_i` and
//! `fb_i = 1 - p_s * f_i`, the marginal chain over (source, estimate) has a
//! four-state product-form stationary law, and each error branch decays
//! geometrically from its synced anchor.

use super::distribution::{GeometricTail, StationaryDistribution};
use super::{default_horizon, PolicyMetrics, RandomizedPolicy};
use crate::error::Result;
use crate::model::ModelParams;

/// Stationary masses of the (source, estimate) chain, in the order
/// (0,0), (0,1), (1,0), (1,1).
fn marginal_masses(m: &ModelParams, pol: &RandomizedPolicy) -> [f64; 4] {
    let (p, q) = (m.p(), m.q());
    let (pb, qb) = (m.p_bar(), m.q_bar());
    let fa0 = m.ps() * pol.f0();
    let fa1 = m.ps() * pol.f1();
    let fb0 = 1.0 - fa0;
    let fb1 = 1.0 - fa1;
    let zeta = (p + q) * (q * fa0 + p * fa1 + (1.0 - p - q) * fa0 * fa1);
    [
        q * (pb * fa0 + p * fa1) * (q + qb * fa1) / zeta,
        p * q * fb1 * (q * fa0 + qb * fa1) / zeta,
        p * q * fb0 * (pb * fa0 + p * fa1) / zeta,
        p * (q * fa0 + qb * fa1) * (p + pb * fa0) / zeta,
    ]
}

/// Average cost, transmission frequency, and combined objective.
pub fn randomized_metrics(m: &ModelParams, pol: &RandomizedPolicy) -> PolicyMetrics {
    let [nu00, _, _, nu11] = marginal_masses(m, pol);
    let fb0 = 1.0 - m.ps() * pol.f0();
    let fb1 = 1.0 - m.ps() * pol.f1();
    let cost = m.beta() * m.p() * fb0 * nu00 / (1.0 - m.q_bar() * fb1).powi(2)
        + (1.0 - m.beta()) * m.q() * fb1 * nu11 / (1.0 - m.p_bar() * fb0).powi(2);
    let frequency = (m.q() * pol.f0() + m.p() * pol.f1()) / (m.p() + m.q());
    PolicyMetrics::new(cost, frequency, m.lambda())
}

/// Stationary distribution over the full (source, estimate, age) chain,
/// enumerated up to the default horizon.
pub fn randomized_stationary(m: &ModelParams, pol: &RandomizedPolicy) -> StationaryDistribution {
    let fb0 = 1.0 - m.ps() * pol.f0();
    let fb1 = 1.0 - m.ps() * pol.f1();
    let ratio = (m.q_bar() * fb1).max(m.p_bar() * fb0);
    let horizon = default_horizon(0, ratio);
    randomized_stationary_with_horizon(m, pol, horizon)
        .expect("any horizon is valid for a randomized policy")
}

/// Stationary distribution enumerated up to an explicit horizon.
pub fn randomized_stationary_with_horizon(
    m: &ModelParams,
    pol: &RandomizedPolicy,
    horizon: usize,
) -> Result<StationaryDistribution> {
    let [nu00, nu01, nu10, nu11] = marginal_masses(m, pol);
    let fb0 = 1.0 - m.ps() * pol.f0();
    let fb1 = 1.0 - m.ps() * pol.f1();

    // The marginal error masses split over ages as geometric series; their
    // totals must agree, which the oracle tests confirm.
    let _ = (nu01, nu10);

    let ma_first = m.p() * fb0 * nu00;
    let ma_ratio = m.q_bar() * fb1;
    let fa_first = m.q() * fb1 * nu11;
    let fa_ratio = m.p_bar() * fb0;

    let geometric = |first: f64, ratio: f64| -> (Vec<f64>, GeometricTail) {
        let mut masses = Vec::with_capacity(horizon);
        let mut current = first;
        for _ in 0..horizon {
            masses.push(current);
            current *= ratio;
        }
        (
            masses,
            GeometricTail {
                ratio,
                first_omitted_mass: current,
            },
        )
    };

    let (ma, ma_tail) = geometric(ma_first, ma_ratio);
    let (fa, fa_tail) = geometric(fa_first, fa_ratio);
    Ok(StationaryDistribution::new(
        nu00, nu11, ma, fa, ma_tail, fa_tail,
    ))
}
