//! Exact stationary distribution and average cost of switching policies.
//!
//! Both error branches behave the same way up to swapping the roles of the
//! two source states, so everything is computed through one per-branch
//! coefficient set: the entry probability into the branch (`flip`), the
//! persistence probability (`stay`), and the threshold. A branch with
//! threshold `d >= 1` holds mass ratios `stay` below the threshold and
//! `stay * p_f` at or above it; a branch with threshold 0 transmits already
//! in its synced anchor state, which scales the whole branch by `p_f`.

use super::distribution::{GeometricTail, StationaryDistribution};
use super::{default_horizon, PolicyMetrics, SwitchingPolicy};
use crate::error::{Error, Result};
use crate::model::{ErrorKind, ModelParams, SourceState};

/// Per-branch quantities, all normalized by the branch's anchor synced mass.
///
/// The missed-alarm branch is anchored at the synced-normal state, the
/// false-alarm branch at synced-alarm; each quantity is the corresponding
/// branch sum divided by its anchor's stationary mass.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BranchCoefficients {
    /// Probability of entering the branch from the anchor, `p` or `q`.
    pub flip: f64,
    /// Probability of persisting inside the branch, `1 - q` or `1 - p`.
    pub stay: f64,
    /// Total branch mass over anchor mass.
    pub mass_from_one: f64,
    /// Branch mass at or above the threshold over anchor mass. For a zero
    /// threshold this is the formal extension `mass_from_one / (stay * p_f)`,
    /// kept because the synced-mass formulas consume it in all regimes.
    pub mass_from_threshold: f64,
    /// Transmitting mass over anchor mass: `mass_from_threshold` when the
    /// threshold is positive, `1 + mass_from_one` when the anchor transmits.
    pub transmit_mass: f64,
    /// Age-weighted branch mass over `flip * anchor mass`.
    pub age_weight: f64,
}

pub(crate) fn branch_coefficients(
    flip: f64,
    stay: f64,
    pf: f64,
    threshold: u32,
) -> BranchCoefficients {
    if threshold >= 1 {
        let below = stay.powi(threshold as i32 - 1);
        let from_threshold = flip * below / (1.0 - stay * pf);
        let mass_from_one = flip * (1.0 - below) / (1.0 - stay) + from_threshold;
        BranchCoefficients {
            flip,
            stay,
            mass_from_one,
            mass_from_threshold: from_threshold,
            transmit_mass: from_threshold,
            age_weight: psi(stay, threshold, pf),
        }
    } else {
        let mass_from_one = flip * pf / (1.0 - stay * pf);
        BranchCoefficients {
            flip,
            stay,
            mass_from_one,
            mass_from_threshold: flip / (stay * (1.0 - stay * pf)),
            transmit_mass: 1.0 + mass_from_one,
            age_weight: pf / (1.0 - stay * pf).powi(2),
        }
    }
}

/// Age-weighted sum over a branch with persistence `x` and threshold `y >= 1`:
/// `sum_k k * nu_k / (flip * anchor)`.
pub(crate) fn psi(x: f64, y: u32, pf: f64) -> f64 {
    let y_f = f64::from(y);
    let x_pow = x.powi(y as i32 - 1);
    let xf = x * pf;
    (1.0 - (x + (1.0 - x) * y_f) * x_pow) / (1.0 - x).powi(2)
        + ((xf + (1.0 - xf) * y_f) * x_pow) / (1.0 - xf).powi(2)
}

pub(crate) fn ma_coefficients(m: &ModelParams, pol: &SwitchingPolicy) -> BranchCoefficients {
    branch_coefficients(m.p(), m.q_bar(), m.pf(), pol.ma_threshold)
}

pub(crate) fn fa_coefficients(m: &ModelParams, pol: &SwitchingPolicy) -> BranchCoefficients {
    branch_coefficients(m.q(), m.p_bar(), m.pf(), pol.fa_threshold)
}

/// Stationary masses of the two synced states.
pub(crate) fn synced_masses(
    m: &ModelParams,
    ma: &BranchCoefficients,
    fa: &BranchCoefficients,
) -> (f64, f64) {
    let ma_side = m.q_bar() * ma.mass_from_threshold;
    let fa_side = m.p_bar() * fa.mass_from_threshold;
    let denom = (1.0 + ma.mass_from_one) * fa_side + (1.0 + fa.mass_from_one) * ma_side;
    (fa_side / denom, ma_side / denom)
}

/// Average cost, transmission frequency, and combined objective of a
/// switching policy.
pub fn switching_metrics(m: &ModelParams, pol: &SwitchingPolicy) -> PolicyMetrics {
    let ma = ma_coefficients(m, pol);
    let fa = fa_coefficients(m, pol);
    let (nu_syn0, nu_syn1) = synced_masses(m, &ma, &fa);
    let cost = m.beta() * ma.flip * ma.age_weight * nu_syn0
        + (1.0 - m.beta()) * fa.flip * fa.age_weight * nu_syn1;
    let frequency = ma.transmit_mass * nu_syn0 + fa.transmit_mass * nu_syn1;
    PolicyMetrics::new(cost, frequency, m.lambda())
}

/// Stationary distribution of a switching policy, enumerated up to the
/// default horizon.
pub fn switching_stationary(m: &ModelParams, pol: &SwitchingPolicy) -> StationaryDistribution {
    let post_ratio = m.q_bar().max(m.p_bar()) * m.pf();
    let horizon = default_horizon(pol.max_threshold(), post_ratio);
    switching_stationary_with_horizon(m, pol, horizon)
        .expect("default horizon always covers the thresholds")
}

/// Stationary distribution enumerated up to an explicit horizon, which must
/// be at least the larger threshold so the omitted tails stay geometric.
pub fn switching_stationary_with_horizon(
    m: &ModelParams,
    pol: &SwitchingPolicy,
    horizon: usize,
) -> Result<StationaryDistribution> {
    if horizon < pol.max_threshold() as usize {
        return Err(Error::InvalidConfig(format!(
            "horizon {horizon} is below the largest threshold {}",
            pol.max_threshold()
        )));
    }
    let ma = ma_coefficients(m, pol);
    let fa = fa_coefficients(m, pol);
    let (nu_syn0, nu_syn1) = synced_masses(m, &ma, &fa);
    let (ma_masses, ma_tail) = branch_masses(&ma, m.pf(), pol.ma_threshold, nu_syn0, horizon);
    let (fa_masses, fa_tail) = branch_masses(&fa, m.pf(), pol.fa_threshold, nu_syn1, horizon);
    Ok(StationaryDistribution::new(
        nu_syn0, nu_syn1, ma_masses, fa_masses, ma_tail, fa_tail,
    ))
}

/// Per-age masses of one branch: `flip * anchor` at age 1 (scaled by `p_f`
/// when the anchor itself transmits), then ratio `stay` strictly below the
/// threshold and `stay * p_f` from the threshold on.
fn branch_masses(
    c: &BranchCoefficients,
    pf: f64,
    threshold: u32,
    anchor: f64,
    horizon: usize,
) -> (Vec<f64>, GeometricTail) {
    let mut masses = Vec::with_capacity(horizon);
    let first = c.flip * anchor * if threshold == 0 { pf } else { 1.0 };
    let mut current = first;
    for age in 1..=horizon {
        masses.push(current);
        current *= ratio_after(c, pf, threshold, age as u32);
    }
    // `current` is now the mass at `horizon + 1`; past any horizon >= the
    // threshold the ratio is constant.
    let tail = GeometricTail {
        ratio: c.stay * pf,
        first_omitted_mass: current,
    };
    (masses, tail)
}

/// Mass ratio from `age` to `age + 1`.
fn ratio_after(c: &BranchCoefficients, pf: f64, threshold: u32, age: u32) -> f64 {
    if age < threshold {
        c.stay
    } else {
        c.stay * pf
    }
}

/// Metrics recomputed by weighting a stationary distribution directly,
/// instead of through the closed forms; the two routes agree for exact
/// distributions and differ by the truncation gap for truncated ones.
pub fn switching_metrics_from_distribution(
    m: &ModelParams,
    pol: &SwitchingPolicy,
    dist: &StationaryDistribution,
) -> PolicyMetrics {
    let cost = m.beta() * dist.age_weighted_mass(ErrorKind::MissedAlarm)
        + (1.0 - m.beta()) * dist.age_weighted_mass(ErrorKind::FalseAlarm);
    let mut frequency = dist.mass_at_or_above(ErrorKind::MissedAlarm, pol.ma_threshold.max(1))
        + dist.mass_at_or_above(ErrorKind::FalseAlarm, pol.fa_threshold.max(1));
    if pol.ma_threshold == 0 {
        frequency += dist.synced_mass(SourceState::Normal);
    }
    if pol.fa_threshold == 0 {
        frequency += dist.synced_mass(SourceState::Alarm);
    }
    PolicyMetrics::new(cost, frequency, m.lambda())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ErrorKind;

    fn params(p: f64, q: f64, ps: f64, beta: f64, lambda: f64) -> ModelParams {
        ModelParams::new(p, q, ps, beta, lambda).unwrap()
    }

    #[test]
    fn symmetric_chain_gives_symmetric_masses() {
        let m = params(0.25, 0.25, 0.8, 0.5, 2.0);
        let pol = SwitchingPolicy::new(4, 4);
        let d = switching_stationary(&m, &pol);
        assert!(
            (d.synced_mass(SourceState::Normal) - d.synced_mass(SourceState::Alarm)).abs() < 1e-14
        );
        for k in 1..=30 {
            let diff =
                d.error_mass(ErrorKind::MissedAlarm, k) - d.error_mass(ErrorKind::FalseAlarm, k);
            assert!(diff.abs() < 1e-14);
        }
        let occ_diff =
            d.occupancy_rate(ErrorKind::MissedAlarm) - d.occupancy_rate(ErrorKind::FalseAlarm);
        assert!(occ_diff.abs() < 1e-13);
    }

    #[test]
    fn perfect_channel_always_transmit_has_no_error_mass() {
        let m = params(0.2, 0.3, 1.0, 0.8, 8.0);
        let pol = SwitchingPolicy::new(0, 0);
        let d = switching_stationary(&m, &pol);
        assert!((d.synced_mass(SourceState::Normal) - m.nu0()).abs() < 1e-14);
        assert!((d.synced_mass(SourceState::Alarm) - m.nu1()).abs() < 1e-14);
        assert_eq!(d.occupancy_rate(ErrorKind::MissedAlarm), 0.0);
        assert_eq!(d.occupancy_rate(ErrorKind::FalseAlarm), 0.0);
    }

    #[test]
    fn always_transmit_frequency_is_one() {
        for m in [
            params(0.2, 0.3, 0.9, 0.8, 8.0),
            params(0.4, 0.1, 0.6, 0.3, 0.5),
        ] {
            let metrics = switching_metrics(&m, &SwitchingPolicy::new(0, 0));
            assert!((metrics.frequency - 1.0).abs() < 1e-12);
            assert!((metrics.objective - metrics.avg_cost - m.lambda()).abs() < 1e-12);
        }
    }

    #[test]
    fn distributions_are_normalized() {
        let cases = [
            (params(0.2, 0.3, 0.9, 0.8, 8.0), SwitchingPolicy::new(3, 13)),
            (params(0.2, 0.3, 0.9, 0.8, 8.0), SwitchingPolicy::new(0, 5)),
            (
                params(0.05, 0.45, 0.5, 0.2, 1.0),
                SwitchingPolicy::new(7, 0),
            ),
            (
                params(0.45, 0.05, 0.75, 1.0, 0.0),
                SwitchingPolicy::new(0, 0),
            ),
            (params(0.3, 0.3, 1.0, 0.5, 2.0), SwitchingPolicy::new(2, 9)),
        ];
        for (m, pol) in &cases {
            let d = switching_stationary(m, pol);
            assert!(
                (d.total_mass() - 1.0).abs() < 1e-10,
                "total mass {} for {pol}",
                d.total_mass()
            );
        }
    }

    #[test]
    fn closed_form_metrics_match_distribution_weighting() {
        let cases = [
            (params(0.2, 0.3, 0.9, 0.8, 8.0), SwitchingPolicy::new(3, 13)),
            (params(0.2, 0.3, 0.9, 0.8, 8.0), SwitchingPolicy::new(1, 1)),
            (params(0.35, 0.1, 0.7, 0.6, 4.0), SwitchingPolicy::new(0, 6)),
            (params(0.1, 0.35, 0.7, 0.6, 4.0), SwitchingPolicy::new(6, 0)),
            (
                params(0.25, 0.25, 0.9, 0.5, 1.0),
                SwitchingPolicy::new(0, 0),
            ),
        ];
        for (m, pol) in &cases {
            let closed = switching_metrics(m, pol);
            let weighted =
                switching_metrics_from_distribution(m, pol, &switching_stationary(m, pol));
            assert!(
                (closed.avg_cost - weighted.avg_cost).abs() < 1e-11,
                "cost for {pol}"
            );
            assert!(
                (closed.frequency - weighted.frequency).abs() < 1e-11,
                "frequency for {pol}"
            );
            assert!(
                (closed.objective - weighted.objective).abs() < 1e-10,
                "objective for {pol}"
            );
        }
    }

    #[test]
    fn identical_thresholds_never_beat_the_better_diagonal() {
        // With a symmetric non-prioritized source, mixed thresholds cannot
        // outperform the better of the two matching diagonals.
        let m = params(0.25, 0.25, 0.9, 0.5, 8.0);
        for x in 1..=10u32 {
            for y in 1..=10u32 {
                let mixed = switching_metrics(&m, &SwitchingPolicy::new(x, y)).objective;
                let dx = switching_metrics(&m, &SwitchingPolicy::new(x, x)).objective;
                let dy = switching_metrics(&m, &SwitchingPolicy::new(y, y)).objective;
                assert!(mixed >= dx.min(dy) - 1e-12, "x={x} y={y}");
            }
        }
    }

    #[test]
    fn rejects_horizon_below_threshold() {
        let m = params(0.2, 0.3, 0.9, 0.8, 8.0);
        let pol = SwitchingPolicy::new(3, 13);
        assert!(switching_stationary_with_horizon(&m, &pol, 12).is_err());
        assert!(switching_stationary_with_horizon(&m, &pol, 13).is_ok());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_case() -> impl Strategy<Value = (ModelParams, SwitchingPolicy)> {
            (
                0.02f64..0.95,
                0.02f64..0.95,
                0.05f64..=1.0,
                0.0f64..=1.0,
                0.0f64..15.0,
                0u32..25,
                0u32..25,
            )
                .prop_map(|(p, q, ps, beta, lambda, dm, df)| {
                    (
                        ModelParams::new(p, q, ps, beta, lambda).unwrap(),
                        SwitchingPolicy::new(dm, df),
                    )
                })
        }

        proptest! {
            /// Balance-equation quotient identities behind the synced-mass
            /// formulas, valid in all four threshold regimes.
            #[test]
            fn quotient_identities_hold((m, pol) in arb_case()) {
                let ma = ma_coefficients(&m, &pol);
                let fa = fa_coefficients(&m, &pol);
                let lhs_ma = m.p() - m.q() * ma.mass_from_one;
                let rhs_ma = m.q_bar() * m.ps() * ma.mass_from_threshold;
                prop_assert!((lhs_ma - rhs_ma).abs() < 1e-12);
                let lhs_fa = m.q() - m.p() * fa.mass_from_one;
                let rhs_fa = m.p_bar() * m.ps() * fa.mass_from_threshold;
                prop_assert!((lhs_fa - rhs_fa).abs() < 1e-12);
            }

            #[test]
            fn stationary_distribution_is_normalized((m, pol) in arb_case()) {
                let d = switching_stationary(&m, &pol);
                prop_assert!((d.total_mass() - 1.0).abs() < 1e-10);
                prop_assert!(d.synced_mass(SourceState::Normal) > 0.0);
                prop_assert!(d.synced_mass(SourceState::Alarm) > 0.0);
            }
        }
    }
}
