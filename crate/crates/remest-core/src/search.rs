//! Threshold search over the switching-policy family.
//!
//! The objective restricted to one threshold axis, with the other held
//! fixed, is a ratio `g(x) / h(x)` of two smooth functions whose derivatives
//! have the shape `g'(x) = (alpha0 + alpha1 x) s^{x-1}` and
//! `h'(x) = alpha2 s^{x-1}` with `alpha1 > 0` and `alpha2 < 0` (`s` being the
//! branch persistence probability). Past the turn point where
//! `alpha0 + alpha1 x` becomes nonnegative, the slice is increasing, so each
//! slice only needs scanning up to its turn point: an O(N^2) search overall,
//! where N is picked so the truncation cost gap falls below a target.

use crate::analytic::randomized_metrics;
use crate::analytic::{
    switching_metrics, truncation_gap, PolicyMetrics, RandomizedPolicy, SwitchingPolicy,
};
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Which threshold an objective slice holds fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedAxis {
    /// The missed-alarm threshold is fixed; the false-alarm axis varies.
    MaThreshold,
    /// The false-alarm threshold is fixed; the missed-alarm axis varies.
    FaThreshold,
}

/// Monotonicity bound for one objective slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceBound {
    /// The threshold held fixed on the other axis.
    pub fixed_threshold: u32,
    /// The slice is nondecreasing from this point on.
    pub turn_point: f64,
    pub alpha0: f64,
    /// Positive whenever the varying branch carries weight.
    pub alpha1: f64,
    /// Always negative: more patience on one axis only sheds transmissions.
    pub alpha2: f64,
}

/// Slice derivative coefficients and turn point; `value >= 1` is required,
/// matching the regime where the derivative form is established.
pub fn slice_turn_point(params: &ModelParams, fixed: FixedAxis, value: u32) -> Result<SliceBound> {
    if value < 1 {
        return Err(Error::InvalidPolicy(
            "slice turn points require a fixed threshold of at least 1".into(),
        ));
    }
    Ok(slice_bound(params, fixed, value))
}

/// Internal variant also used for the threshold-zero slices, whose cost
/// formulas keep the same rational-in-x shape with adjusted constants.
fn slice_bound(params: &ModelParams, fixed: FixedAxis, value: u32) -> SliceBound {
    use crate::analytic::switching::branch_coefficients;

    let pf = params.pf();
    let ps = params.ps();
    // Orientation: `flip_v`/`stay_v` describe the varying branch, `other`
    // the fixed one, `w_v`/`w_f` the matching cost weights.
    let (flip_v, stay_v, w_v, w_f, other) = match fixed {
        FixedAxis::FaThreshold => (
            params.p(),
            params.q_bar(),
            params.beta(),
            1.0 - params.beta(),
            branch_coefficients(params.q(), params.p_bar(), pf, value),
        ),
        FixedAxis::MaThreshold => (
            params.q(),
            params.p_bar(),
            1.0 - params.beta(),
            params.beta(),
            branch_coefficients(params.p(), params.q_bar(), pf, value),
        ),
    };
    let stay_f = other.stay;
    let flip_f = other.flip;
    let fixed_mass = other.mass_from_threshold;
    let fixed_all = other.mass_from_one;
    let fixed_transmit = other.transmit_mass;
    let fixed_weight = other.age_weight;

    let ln_s = stay_v.ln();
    let d1 = 1.0 - stay_v;
    let dpf = 1.0 - stay_v * pf;

    // L(x) = g(x) / h(x) with
    // g(x) = w_v flip_v stay_f m_f psi(stay_v, x)
    //        + [lambda (stay_f m_f + stay_v t_f) + w_f flip_f stay_v psi_f] a(x)
    // h(x) = stay_f m_f (1 + zeta(x)) + [stay_v (1 + all_f) + stay_f m_f] a(x).
    let k = params.lambda() * (stay_f * fixed_mass + stay_v * fixed_transmit)
        + w_f * flip_f * stay_v * fixed_weight;
    let c1 = w_v * flip_v * stay_f * fixed_mass;

    let alpha0 = k * flip_v * ln_s / dpf
        + c1 * (-stay_v * ps / (d1 * dpf) + stay_v * pf * ln_s / (dpf * dpf)
            - stay_v * ln_s / (d1 * d1));
    let alpha1 = -c1 * stay_v * ps * ln_s / (d1 * dpf);
    let alpha2 = flip_v
        * ln_s
        * ((stay_v * (1.0 + fixed_all) + stay_f * fixed_mass) / dpf - stay_f * fixed_mass / d1);

    let turn_point = if alpha1 <= 0.0 {
        // Degenerate weight (beta at 0 or 1): the slice has no guaranteed
        // turn point and callers must scan it fully.
        f64::INFINITY
    } else if alpha0 >= 0.0 {
        1.0
    } else {
        -alpha0 / alpha1
    };
    SliceBound {
        fixed_threshold: value,
        turn_point,
        alpha0,
        alpha1,
        alpha2,
    }
}

/// Outcome of a threshold search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_policy: SwitchingPolicy,
    pub best_metrics: PolicyMetrics,
    /// Number of objective evaluations performed.
    pub evaluations: u64,
    /// Number of candidate policies considered (equal to `evaluations`).
    pub candidate_set_size: usize,
    /// Truncation size the candidate grid was limited to.
    pub truncation: u32,
    /// Set when the source is negatively correlated, where the two-threshold
    /// family is not guaranteed to contain the optimum; the MDP solver stays
    /// authoritative there.
    pub family_restricted: bool,
}

/// Smallest truncation size whose cost gap at thresholds (1, 1) is below
/// `epsilon`.
fn select_truncation(params: &ModelParams, epsilon: f64, n_max: u32) -> Result<u32> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if n_max < 2 {
        return Err(Error::TruncationBelowMinimum { n: n_max, min: 2 });
    }
    let probe = SwitchingPolicy::new(1, 1);
    for n in 2..=n_max {
        let gap = truncation_gap(params, &probe, n)?;
        if gap < epsilon {
            return Ok(n);
        }
    }
    Err(Error::TruncationBudgetExceeded {
        n_max,
        epsilon,
        gap_at_max: truncation_gap(params, &probe, n_max)?,
    })
}

/// An epsilon that makes the searches select exactly truncation `n`.
///
/// Useful for pinning the candidate-grid size; fails on a perfect channel,
/// where the gap is identically zero and any epsilon selects the minimum
/// size.
pub fn epsilon_for_target_truncation(params: &ModelParams, n: u32) -> Result<f64> {
    if n < 3 {
        return Err(Error::TruncationBelowMinimum { n, min: 3 });
    }
    let previous = truncation_gap(params, &SwitchingPolicy::new(1, 1), n - 1)?;
    if previous <= 0.0 {
        return Err(Error::InvalidConfig(
            "the truncation gap is identically zero; any epsilon selects the minimum size".into(),
        ));
    }
    Ok(previous)
}

fn better(
    candidate: &(SwitchingPolicy, PolicyMetrics),
    best: &(SwitchingPolicy, PolicyMetrics),
) -> bool {
    let (cp, cm) = candidate;
    let (bp, bm) = best;
    cm.objective < bm.objective
        || (cm.objective == bm.objective
            && (cp.ma_threshold, cp.fa_threshold) < (bp.ma_threshold, bp.fa_threshold))
}

/// Slice-pruned search over all switching policies with thresholds up to the
/// selected truncation size.
///
/// Every false-alarm slice is scanned from the missed-alarm threshold 0
/// upward and stops once the slice's turn point is passed; threshold-zero
/// candidates are always evaluated explicitly. Ties break toward the
/// lexicographically smallest threshold pair.
pub fn algorithm1(params: &ModelParams, epsilon: f64, n_max: u32) -> Result<SearchResult> {
    let n = select_truncation(params, epsilon, n_max)?;
    Ok(search_up_to(params, n))
}

/// The candidate scan behind [`algorithm1`], with the threshold grid bound
/// fixed directly instead of derived from a truncation-gap target.
pub fn search_up_to(params: &ModelParams, n: u32) -> SearchResult {
    let mut best: Option<(SwitchingPolicy, PolicyMetrics)> = None;
    let mut evaluations = 0u64;
    for fa_thr in 0..=n {
        let bound = slice_bound(params, FixedAxis::FaThreshold, fa_thr);
        let ma_hi = if bound.turn_point >= f64::from(n) {
            n
        } else {
            (bound.turn_point.ceil() as u32).max(1)
        };
        for ma_thr in 0..=ma_hi {
            let pol = SwitchingPolicy::new(ma_thr, fa_thr);
            let metrics = switching_metrics(params, &pol);
            evaluations += 1;
            let candidate = (pol, metrics);
            if best.as_ref().is_none_or(|b| better(&candidate, b)) {
                best = Some(candidate);
            }
        }
    }
    let (best_policy, best_metrics) = best.expect("at least one candidate is always evaluated");
    SearchResult {
        best_policy,
        best_metrics,
        evaluations,
        candidate_set_size: evaluations as usize,
        truncation: n,
        family_restricted: !(params.is_positively_correlated() || params.is_iid()),
    }
}

/// Diagonal-only search for symmetric non-prioritized sources, where
/// identical thresholds are optimal; rejects anything else.
pub fn symmetric_search(params: &ModelParams, epsilon: f64, n_max: u32) -> Result<SearchResult> {
    if !params.is_symmetric() || params.beta() != 0.5 {
        return Err(Error::InvalidParams(
            "the diagonal search requires a symmetric source (p = q) with beta = 0.5".into(),
        ));
    }
    let n = select_truncation(params, epsilon, n_max)?;
    let (best_policy, best_metrics) = best_diagonal(params, n);
    Ok(SearchResult {
        best_policy,
        best_metrics,
        evaluations: u64::from(n) + 1,
        candidate_set_size: n as usize + 1,
        truncation: n,
        family_restricted: false,
    })
}

/// Best policy with identical thresholds `(x, x)`, `x <= n`.
pub fn best_diagonal(params: &ModelParams, n: u32) -> (SwitchingPolicy, PolicyMetrics) {
    let mut best = None;
    for x in 0..=n {
        let pol = SwitchingPolicy::new(x, x);
        let metrics = switching_metrics(params, &pol);
        let candidate = (pol, metrics);
        if best.as_ref().is_none_or(|b| better(&candidate, b)) {
            best = Some(candidate);
        }
    }
    best.expect("diagonal scan is never empty")
}

/// Best age-agnostic randomized policy, found by nested grid refinement over
/// the two transmission rates.
pub fn best_randomized(params: &ModelParams) -> (RandomizedPolicy, PolicyMetrics) {
    const GRID: usize = 16;
    const LEVELS: usize = 6;
    const FLOOR: f64 = 1e-3;

    let mut lo = [FLOOR, FLOOR];
    let mut hi = [1.0, 1.0];
    let mut best: Option<(RandomizedPolicy, PolicyMetrics)> = None;
    for _ in 0..LEVELS {
        let mut level_best: Option<([f64; 2], PolicyMetrics)> = None;
        for i in 0..=GRID {
            for j in 0..=GRID {
                let f0 = lo[0] + (hi[0] - lo[0]) * i as f64 / GRID as f64;
                let f1 = lo[1] + (hi[1] - lo[1]) * j as f64 / GRID as f64;
                let pol = RandomizedPolicy::new(f0, f1).expect("grid stays inside (0, 1]");
                let metrics = randomized_metrics(params, &pol);
                if level_best
                    .as_ref()
                    .is_none_or(|(_, m)| metrics.objective < m.objective)
                {
                    level_best = Some(([f0, f1], metrics));
                }
            }
        }
        let (center, metrics) = level_best.expect("grid is never empty");
        let pol = RandomizedPolicy::new(center[0], center[1]).unwrap();
        if best
            .as_ref()
            .is_none_or(|(_, m)| metrics.objective < m.objective)
        {
            best = Some((pol, metrics));
        }
        for axis in 0..2 {
            let spacing = (hi[axis] - lo[axis]) / GRID as f64;
            lo[axis] = (center[axis] - 1.5 * spacing).max(FLOOR);
            hi[axis] = (center[axis] + 1.5 * spacing).min(1.0);
        }
    }
    best.expect("refinement always evaluates candidates")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn params(p: f64, q: f64, ps: f64, beta: f64, lambda: f64) -> ModelParams {
        ModelParams::new(p, q, ps, beta, lambda).unwrap()
    }

    fn fig5a() -> ModelParams {
        params(0.2, 0.3, 0.9, 0.8, 8.0)
    }

    #[test]
    fn rejects_fixed_threshold_below_one() {
        assert!(slice_turn_point(&fig5a(), FixedAxis::FaThreshold, 0).is_err());
        assert!(slice_turn_point(&fig5a(), FixedAxis::FaThreshold, 1).is_ok());
    }

    #[test]
    fn alpha_signs_hold_across_draws() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        for _ in 0..200 {
            let m = params(
                rng.gen_range(0.05..0.9),
                rng.gen_range(0.05..0.9),
                rng.gen_range(0.05..1.0),
                rng.gen_range(0.05..0.95),
                rng.gen_range(0.0..20.0),
            );
            for axis in [FixedAxis::FaThreshold, FixedAxis::MaThreshold] {
                let bound = slice_turn_point(&m, axis, rng.gen_range(1..20)).unwrap();
                assert!(bound.alpha1 > 0.0, "alpha1 {} for {m:?}", bound.alpha1);
                assert!(bound.alpha2 < 0.0, "alpha2 {} for {m:?}", bound.alpha2);
                assert!(bound.turn_point >= 1.0);
            }
        }
    }

    /// Continuous-x reconstructions of the slice numerator and denominator,
    /// differentiated numerically, pin the alpha coefficients down.
    #[test]
    fn alphas_match_finite_differences() {
        use crate::analytic::switching::branch_coefficients;
        let cases = [
            (fig5a(), 13u32),
            (params(0.35, 0.1, 0.7, 0.6, 3.0), 4),
            (params(0.1, 0.4, 0.55, 0.25, 0.7), 1),
        ];
        for (m, fixed_value) in cases {
            let bound = slice_turn_point(&m, FixedAxis::FaThreshold, fixed_value).unwrap();
            let other = branch_coefficients(m.q(), m.p_bar(), m.pf(), fixed_value);
            let (stay_v, flip_v) = (m.q_bar(), m.p());
            let psi_c = |x: f64| -> f64 {
                let pow = stay_v.powf(x - 1.0);
                let xf = stay_v * m.pf();
                (1.0 - (stay_v + (1.0 - stay_v) * x) * pow) / (1.0 - stay_v).powi(2)
                    + ((xf + (1.0 - xf) * x) * pow) / (1.0 - xf).powi(2)
            };
            let a_c = |x: f64| flip_v * stay_v.powf(x - 1.0) / (1.0 - stay_v * m.pf());
            let zeta_c = |x: f64| flip_v * (1.0 - stay_v.powf(x - 1.0)) / (1.0 - stay_v);
            let g = |x: f64| {
                m.beta() * flip_v * m.p_bar() * other.mass_from_threshold * psi_c(x)
                    + (m.lambda()
                        * (m.p_bar() * other.mass_from_threshold + stay_v * other.transmit_mass)
                        + (1.0 - m.beta()) * m.q() * stay_v * other.age_weight)
                        * a_c(x)
            };
            let h = |x: f64| {
                m.p_bar() * other.mass_from_threshold * (1.0 + zeta_c(x))
                    + (stay_v * (1.0 + other.mass_from_one) + m.p_bar() * other.mass_from_threshold)
                        * a_c(x)
            };
            let eps = 1e-6;
            for x in [1.0f64, 2.5, 7.0, 20.0] {
                let fd_g = (g(x + eps) - g(x - eps)) / (2.0 * eps);
                let fd_h = (h(x + eps) - h(x - eps)) / (2.0 * eps);
                let pred_g = (bound.alpha0 + bound.alpha1 * x) * stay_v.powf(x - 1.0);
                let pred_h = bound.alpha2 * stay_v.powf(x - 1.0);
                assert!(
                    (fd_g - pred_g).abs() <= 1e-5 * (1.0 + pred_g.abs()),
                    "g' at {x}: fd {fd_g} vs {pred_g}"
                );
                assert!(
                    (fd_h - pred_h).abs() <= 1e-5 * (1.0 + pred_h.abs()),
                    "h' at {x}: fd {fd_h} vs {pred_h}"
                );
            }
        }
    }

    #[test]
    fn slice_increases_past_the_turn_point() {
        let m = fig5a();
        let bound = slice_turn_point(&m, FixedAxis::FaThreshold, 13).unwrap();
        let start = bound.turn_point.ceil() as u32;
        let mut previous = switching_metrics(&m, &SwitchingPolicy::new(start, 13)).objective;
        for x in start + 1..=start + 50 {
            let current = switching_metrics(&m, &SwitchingPolicy::new(x, 13)).objective;
            assert!(current > previous, "not increasing at x={x}");
            previous = current;
        }
    }

    #[test]
    fn mirrored_slices_increase_past_their_turn_points() {
        let mut rng = ChaCha12Rng::seed_from_u64(97);
        for _ in 0..25 {
            let m = params(
                rng.gen_range(0.05..0.6),
                rng.gen_range(0.05..0.6),
                rng.gen_range(0.3..1.0),
                rng.gen_range(0.1..0.9),
                rng.gen_range(0.1..12.0),
            );
            let fixed = rng.gen_range(1..10);
            let bound = slice_turn_point(&m, FixedAxis::MaThreshold, fixed).unwrap();
            let start = if bound.turn_point >= 60.0 {
                continue;
            } else {
                bound.turn_point.ceil() as u32
            };
            let mut previous =
                switching_metrics(&m, &SwitchingPolicy::new(fixed, start.max(1))).objective;
            for y in start.max(1) + 1..=start.max(1) + 30 {
                let current = switching_metrics(&m, &SwitchingPolicy::new(fixed, y)).objective;
                assert!(current >= previous - 1e-13, "fixed {fixed}, y={y}");
                previous = current;
            }
        }
    }

    #[test]
    fn turn_point_is_one_when_alpha0_is_nonnegative() {
        // Strong alarm weight, cheap transmissions, fast source: the cost
        // slice rises from the start.
        let m = params(0.5, 0.9, 0.9, 0.99, 0.01);
        let bound = slice_turn_point(&m, FixedAxis::FaThreshold, 1).unwrap();
        assert!(bound.alpha0 >= 0.0, "alpha0 {}", bound.alpha0);
        assert_eq!(bound.turn_point, 1.0);
    }

    #[test]
    fn negative_alpha0_puts_the_turn_point_at_the_ratio() {
        let m = fig5a();
        let bound = slice_turn_point(&m, FixedAxis::FaThreshold, 13).unwrap();
        assert!(bound.alpha0 < 0.0);
        assert!((bound.turn_point - (-bound.alpha0 / bound.alpha1)).abs() < 1e-15);
    }

    /// Optima frozen from exhaustive evaluation of the closed-form objective
    /// over the full threshold grid, re-verified here before asserting.
    #[test]
    fn finds_the_exhaustive_grid_optima() {
        let cases = [
            (fig5a(), SwitchingPolicy::new(2, 22)),
            (
                params(0.25, 0.25, 0.9, 0.5, 8.0),
                SwitchingPolicy::new(7, 7),
            ),
            (
                params(0.25, 0.25, 0.9, 0.8, 8.0),
                SwitchingPolicy::new(1, 29),
            ),
        ];
        for (m, expected) in cases {
            let mut grid_best = (SwitchingPolicy::new(0, 0), f64::INFINITY);
            for dm in 0..=100 {
                for df in 0..=100 {
                    let pol = SwitchingPolicy::new(dm, df);
                    let l = switching_metrics(&m, &pol).objective;
                    if l < grid_best.1 {
                        grid_best = (pol, l);
                    }
                }
            }
            assert_eq!(grid_best.0, expected, "grid optimum moved for {m:?}");

            let eps = epsilon_for_target_truncation(&m, 100).unwrap();
            let result = algorithm1(&m, eps, 200).unwrap();
            assert_eq!(result.best_policy, expected);
            assert_eq!(result.truncation, 100);
            assert!(!result.family_restricted);
            assert!((result.best_metrics.objective - grid_best.1).abs() < 1e-14);
        }
    }

    #[test]
    fn pruned_search_equals_the_exhaustive_grid() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..15 {
            let m = params(
                rng.gen_range(0.05..0.5),
                rng.gen_range(0.05..0.5),
                rng.gen_range(0.4..1.0),
                rng.gen_range(0.1..0.9),
                rng.gen_range(0.0..10.0),
            );
            let n = 25;
            let eps = match epsilon_for_target_truncation(&m, n) {
                Ok(e) => e,
                Err(_) => continue,
            };
            let result = algorithm1(&m, eps, 100).unwrap();
            assert_eq!(result.truncation, n);
            let mut exhaustive: Option<(SwitchingPolicy, f64)> = None;
            for dm in 0..=n {
                for df in 0..=n {
                    let pol = SwitchingPolicy::new(dm, df);
                    let l = switching_metrics(&m, &pol).objective;
                    let replace = exhaustive.as_ref().is_none_or(|(bp, bl)| {
                        l < *bl
                            || (l == *bl
                                && (pol.ma_threshold, pol.fa_threshold)
                                    < (bp.ma_threshold, bp.fa_threshold))
                    });
                    if replace {
                        exhaustive = Some((pol, l));
                    }
                }
            }
            let (grid_pol, grid_l) = exhaustive.unwrap();
            assert_eq!(result.best_policy, grid_pol, "params {m:?}");
            assert!((result.best_metrics.objective - grid_l).abs() < 1e-14);
            assert!(result.evaluations <= u64::from(n + 1).pow(2));
        }
    }

    #[test]
    fn symmetric_search_matches_the_full_search() {
        let m = params(0.25, 0.25, 0.9, 0.5, 8.0);
        let eps = epsilon_for_target_truncation(&m, 100).unwrap();
        let diagonal = symmetric_search(&m, eps, 200).unwrap();
        let full = algorithm1(&m, eps, 200).unwrap();
        assert_eq!(diagonal.best_policy, full.best_policy);
        assert!((diagonal.best_metrics.objective - full.best_metrics.objective).abs() < 1e-14);
        assert_eq!(diagonal.best_policy, SwitchingPolicy::new(7, 7));
    }

    #[test]
    fn diagonal_minimum_equals_the_full_grid_minimum() {
        let m = params(0.2, 0.2, 0.9, 0.5, 1.0);
        let mut grid_min = f64::INFINITY;
        for x in 0..=40u32 {
            for y in 0..=40u32 {
                grid_min =
                    grid_min.min(switching_metrics(&m, &SwitchingPolicy::new(x, y)).objective);
            }
        }
        let (_, diag) = best_diagonal(&m, 40);
        assert!((diag.objective - grid_min).abs() < 1e-12);
    }

    #[test]
    fn symmetric_search_rejects_prioritized_sources() {
        assert!(symmetric_search(&params(0.25, 0.25, 0.9, 0.8, 8.0), 1e-9, 100).is_err());
        assert!(symmetric_search(&params(0.2, 0.3, 0.9, 0.5, 8.0), 1e-9, 100).is_err());
    }

    #[test]
    fn free_transmission_prefers_always_transmitting() {
        let m = params(0.25, 0.25, 0.9, 0.5, 0.0);
        let result = symmetric_search(&m, 1e-10, 400).unwrap();
        let always = switching_metrics(&m, &SwitchingPolicy::new(0, 0));
        assert!((result.best_metrics.objective - always.objective).abs() < 1e-12);
    }

    #[test]
    fn degenerate_beta_scans_the_full_axis() {
        // With beta = 0 missed alarms are free, so the search pushes the MA
        // threshold to the edge of the grid.
        let m = params(0.2, 0.3, 0.9, 0.0, 1.0);
        let bound = slice_bound(&m, FixedAxis::FaThreshold, 3);
        assert!(bound.turn_point.is_infinite());
        let result = algorithm1(&m, 1e-6, 400).unwrap();
        assert_eq!(result.best_policy.ma_threshold, result.truncation);
    }

    #[test]
    fn truncation_budget_failure_is_explicit() {
        let m = fig5a();
        match algorithm1(&m, 1e-300, 30) {
            Err(Error::TruncationBudgetExceeded { n_max, .. }) => assert_eq!(n_max, 30),
            other => panic!("expected budget failure, got {other:?}"),
        }
    }

    #[test]
    fn best_randomized_beats_its_neighbours() {
        let m = params(0.25, 0.25, 0.9, 0.5, 1.0);
        let (pol, metrics) = best_randomized(&m);
        for df0 in [-0.02f64, 0.02] {
            for df1 in [-0.02f64, 0.02] {
                let f0 = (pol.f0() + df0).clamp(1e-3, 1.0);
                let f1 = (pol.f1() + df1).clamp(1e-3, 1.0);
                let nearby = randomized_metrics(&m, &RandomizedPolicy::new(f0, f1).unwrap());
                assert!(metrics.objective <= nearby.objective + 1e-9);
            }
        }
    }
}
