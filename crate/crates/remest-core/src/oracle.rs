//! Linear-solve validation oracle.
//!
//! Computes the stationary distribution of the age-truncated chain under an
//! arbitrary policy by solving the balance equations directly, without any of
//! the closed-form algebra. The `crosscheck` workflow and the test suites
//! compare every analytic formula against this route.

use nalgebra::{DMatrix, DVector};

use crate::analytic::PolicyMetrics;
use crate::error::{Error, Result};
use crate::model::{stage_cost, transition_kernel, Action, ModelParams, StateSpace, SystemState};
use crate::policy::Policy;

/// Stationary distribution obtained by the linear solve, indexed over the
/// truncated state space.
#[derive(Debug, Clone)]
pub struct OracleDistribution {
    space: StateSpace,
    mass: Vec<f64>,
}

impl OracleDistribution {
    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn mass(&self, s: SystemState) -> f64 {
        self.mass[self.space.index(s)]
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    /// Objective components obtained by weighting stage costs and transmit
    /// probabilities with the solved masses.
    pub fn metrics(&self, params: &ModelParams, policy: &Policy) -> PolicyMetrics {
        let mut cost = 0.0;
        let mut frequency = 0.0;
        for (i, &mass) in self.mass.iter().enumerate() {
            let s = self.space.state(i);
            cost += mass * stage_cost(params, s);
            frequency += mass * policy.transmit_prob(s);
        }
        PolicyMetrics::new(cost, frequency, params.lambda())
    }
}

/// Solves `nu P = nu`, `sum nu = 1` on the `2n + 2`-state truncated chain
/// induced by `policy` (for a randomized policy the row is the rate-weighted
/// mix of the two action kernels).
pub fn solve_stationary(
    params: &ModelParams,
    policy: &Policy,
    n: u32,
) -> Result<OracleDistribution> {
    if n < 1 {
        return Err(Error::TruncationBelowMinimum { n, min: 1 });
    }
    let space = StateSpace::new(n);
    let len = space.len();

    // Column-stochastic generator: a[to][from] = P(from -> to).
    let mut a = DMatrix::<f64>::zeros(len, len);
    for (from, s) in space.iter().enumerate() {
        let rate = policy.transmit_prob(s);
        for (action, weight) in [(Action::Idle, 1.0 - rate), (Action::Transmit, rate)] {
            if weight == 0.0 {
                continue;
            }
            for e in transition_kernel(params, s, action) {
                let to = space.index(space.clamp(e.next));
                a[(to, from)] += weight * e.probability;
            }
        }
    }

    // (P^T - I) nu = 0 with the last balance row replaced by normalization.
    for i in 0..len {
        a[(i, i)] -= 1.0;
    }
    for j in 0..len {
        a[(len - 1, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(len);
    b[len - 1] = 1.0;

    let solution = a.lu().solve(&b).ok_or_else(|| {
        Error::InvalidConfig("singular balance system in the linear solve".into())
    })?;
    Ok(OracleDistribution {
        space,
        mass: solution.iter().copied().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{
        randomized_stationary_with_horizon, switching_stationary, truncated_stationary,
        RandomizedPolicy, SwitchingPolicy,
    };
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn params(p: f64, q: f64, ps: f64, beta: f64, lambda: f64) -> ModelParams {
        ModelParams::new(p, q, ps, beta, lambda).unwrap()
    }

    #[test]
    fn oracle_masses_form_a_distribution() {
        let m = params(0.2, 0.3, 0.9, 0.8, 8.0);
        let d = solve_stationary(&m, &SwitchingPolicy::new(3, 13).into(), 60).unwrap();
        let total: f64 = d.masses().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(d.masses().iter().all(|&v| v > -1e-13));
    }

    #[test]
    fn switching_closed_form_matches_the_oracle() {
        let m = params(0.2, 0.3, 0.9, 0.8, 8.0);
        let pol = SwitchingPolicy::new(2, 3);
        let n = 300;
        let oracle = solve_stationary(&m, &pol.into(), n).unwrap();
        let closed = switching_stationary(&m, &pol);
        let truncated = truncated_stationary(&m, &pol, n).unwrap();
        let mut worst: f64 = 0.0;
        for (i, s) in oracle.space().iter().enumerate() {
            // Interior states follow the untruncated closed form exactly; the
            // two boundary states follow the folded form.
            let expected = if s.age() == n {
                truncated.mass(s)
            } else {
                closed.mass(s)
            };
            worst = worst.max((oracle.masses()[i] - expected).abs());
        }
        assert!(worst < 1e-9, "worst deviation {worst}");
    }

    #[test]
    fn randomized_closed_form_matches_the_oracle() {
        let m = params(0.2, 0.3, 0.9, 0.8, 8.0);
        let pol = RandomizedPolicy::new(0.4, 0.7).unwrap();
        let n = 400usize;
        let oracle = solve_stationary(&m, &pol.into(), n as u32).unwrap();
        let closed = randomized_stationary_with_horizon(&m, &pol, n).unwrap();
        let mut worst: f64 = 0.0;
        for (i, s) in oracle.space().iter().enumerate() {
            if s.age() == n as u32 {
                continue; // boundary state holds the folded tail
            }
            worst = worst.max((oracle.masses()[i] - closed.mass(s)).abs());
        }
        assert!(worst < 1e-9, "worst deviation {worst}");
    }

    #[test]
    fn truncated_distribution_matches_a_small_linear_solve() {
        let m = params(0.2, 0.3, 0.9, 0.8, 8.0);
        let pol = SwitchingPolicy::new(2, 3);
        let n = 50;
        let oracle = solve_stationary(&m, &pol.into(), n).unwrap();
        let folded = truncated_stationary(&m, &pol, n).unwrap();
        for s in oracle.space().iter() {
            assert!(
                (oracle.mass(s) - folded.mass(s)).abs() < 1e-10,
                "state {s:?}"
            );
        }
    }

    #[test]
    fn random_draws_agree_across_both_routes() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..12 {
            let m = params(
                rng.gen_range(0.05..0.5),
                rng.gen_range(0.05..0.5),
                rng.gen_range(0.5..1.0),
                rng.gen_range(0.0..1.0),
                rng.gen_range(0.0..10.0),
            );
            let pol = SwitchingPolicy::new(rng.gen_range(0..15), rng.gen_range(0..15));
            let n = pol.max_threshold() + 60;
            let oracle = solve_stationary(&m, &pol.into(), n).unwrap();
            let closed = switching_stationary(&m, &pol);
            for s in oracle.space().iter().filter(|s| s.age() < n) {
                assert!(
                    (oracle.mass(s) - closed.mass(s)).abs() < 1e-9,
                    "mismatch at {s:?} for {pol}"
                );
            }
        }
    }

    #[test]
    fn metrics_route_matches_randomized_closed_form() {
        let m = params(0.2, 0.3, 0.9, 0.8, 8.0);
        let pol = RandomizedPolicy::new(0.4, 0.7).unwrap();
        let oracle = solve_stationary(&m, &pol.into(), 400).unwrap();
        let weighted = oracle.metrics(&m, &pol.into());
        let closed = crate::analytic::randomized_metrics(&m, &pol);
        assert!((weighted.avg_cost - closed.avg_cost).abs() < 1e-9);
        assert!((weighted.frequency - closed.frequency).abs() < 1e-12);
        assert!((weighted.objective - closed.objective).abs() < 1e-8);
    }
}
