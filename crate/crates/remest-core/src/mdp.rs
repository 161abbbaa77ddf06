//! Finite approximation of the transmission problem and its dynamic-
//! programming solution.
//!
//! Clamping both error ages at `N` yields a finite communicating MDP over
//! `2N + 2` states whose kernel agrees with the exact one everywhere except
//! at the boundary ages, where a persisting error re-enters age `N`. The
//! average-cost optimum of this MDP is found by relative value iteration and
//! serves as the ground truth the analytic threshold search is checked
//! against.

use crate::analytic::SwitchingPolicy;
use crate::error::{Error, Result};
use crate::model::{
    stage_cost, transition_kernel, Action, ErrorKind, ModelParams, SourceState, StateSpace,
    SystemState, TransitionEntry,
};

/// One kernel row: expected one-step cost plus up to three successors.
#[derive(Debug, Clone)]
struct Row {
    cost: f64,
    entries: Vec<(usize, f64)>,
}

/// Age-truncated MDP over the state space `{synced} U {errors with age <= N}`.
#[derive(Debug, Clone)]
pub struct TruncatedMdp {
    params: ModelParams,
    space: StateSpace,
    /// Indexed by `2 * state + action`.
    rows: Vec<Row>,
}

impl TruncatedMdp {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn n(&self) -> u32 {
        self.space.max_age()
    }

    fn row(&self, state_index: usize, a: Action) -> &Row {
        &self.rows[2 * state_index + a.transmits() as usize]
    }

    /// Transition row of the truncated kernel for inspection.
    pub fn transition_row(&self, s: SystemState, a: Action) -> Vec<TransitionEntry> {
        self.row(self.space.index(s), a)
            .entries
            .iter()
            .map(|&(j, probability)| TransitionEntry {
                next: self.space.state(j),
                probability,
            })
            .collect()
    }

    /// Expected one-step cost under the truncated kernel (boundary errors are
    /// priced at age `N` when they persist).
    pub fn expected_cost(&self, s: SystemState, a: Action) -> f64 {
        self.row(self.space.index(s), a).cost
    }
}

/// Builds the truncated MDP; `n >= 2` is required so boundaries and interior
/// are distinct.
pub fn build_truncated_mdp(params: &ModelParams, n: u32) -> Result<TruncatedMdp> {
    if n < 2 {
        return Err(Error::TruncationBelowMinimum { n, min: 2 });
    }
    let space = StateSpace::new(n);
    let mut rows = Vec::with_capacity(2 * space.len());
    for s in space.iter() {
        for a in [Action::Idle, Action::Transmit] {
            let mut cost = if a.transmits() { params.lambda() } else { 0.0 };
            let mut entries = Vec::with_capacity(3);
            for e in transition_kernel(params, s, a) {
                let clamped = space.clamp(e.next);
                cost += e.probability * stage_cost(params, clamped);
                entries.push((space.index(clamped), e.probability));
            }
            rows.push(Row { cost, entries });
        }
    }
    Ok(TruncatedMdp {
        params: *params,
        space,
        rows,
    })
}

/// Relative value function produced by value iteration, normalized to zero at
/// the reference state, together with the average-cost estimate.
#[derive(Debug, Clone)]
pub struct ValueFunction {
    space: StateSpace,
    values: Vec<f64>,
    pub average_cost: f64,
}

impl ValueFunction {
    pub fn relative_value(&self, s: SystemState) -> f64 {
        self.values[self.space.index(s)]
    }
}

/// Deterministic policy over the truncated state space; states beyond the
/// boundary are clamped to the boundary action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolicyTable {
    space: StateSpace,
    actions: Vec<Action>,
}

impl PolicyTable {
    pub fn new(space: StateSpace, actions: Vec<Action>) -> Result<Self> {
        if actions.len() != space.len() {
            return Err(Error::InvalidPolicy(format!(
                "policy table holds {} actions for {} states",
                actions.len(),
                space.len()
            )));
        }
        Ok(Self { space, actions })
    }

    pub fn from_fn(space: StateSpace, mut decide: impl FnMut(SystemState) -> Action) -> Self {
        let actions = space.iter().map(&mut decide).collect();
        Self { space, actions }
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    /// Action at a state; ages beyond the table's boundary reuse the
    /// boundary action.
    pub fn action(&self, s: SystemState) -> Action {
        self.actions[self.space.index(self.space.clamp(s))]
    }
}

/// Solver controls for [`rvi_solve`].
#[derive(Debug, Clone, Copy)]
pub struct RviOptions {
    /// Stop once the span of successive value differences falls below this.
    pub tol: f64,
    pub max_iter: u64,
    /// State at which the relative values are pinned to zero.
    pub reference: SystemState,
}

impl Default for RviOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 1_000_000,
            reference: SystemState::Synced(SourceState::Normal),
        }
    }
}

/// Output of [`rvi_solve`].
#[derive(Debug, Clone)]
pub struct RviSolution {
    pub value: ValueFunction,
    pub policy: PolicyTable,
    pub iterations: u64,
    /// Span of the final Bellman update differences.
    pub span: f64,
}

/// Relative value iteration with synchronous sweeps and a span stopping rule.
///
/// The average-cost estimate is the midpoint of the final difference span,
/// which makes it independent of the reference state; the greedy policy
/// breaks ties toward staying idle.
pub fn rvi_solve(mdp: &TruncatedMdp, opts: &RviOptions) -> Result<RviSolution> {
    let len = mdp.space.len();
    let ref_idx = mdp.space.index(mdp.space.clamp(opts.reference));
    let mut h = vec![0.0f64; len];
    let mut updated = vec![0.0f64; len];
    let mut span = f64::INFINITY;

    for iteration in 1..=opts.max_iter {
        let mut min_diff = f64::INFINITY;
        let mut max_diff = f64::NEG_INFINITY;
        for i in 0..len {
            let q_idle = backup(mdp.row(i, Action::Idle), &h);
            let q_transmit = backup(mdp.row(i, Action::Transmit), &h);
            let best = q_idle.min(q_transmit);
            updated[i] = best;
            let diff = best - h[i];
            min_diff = min_diff.min(diff);
            max_diff = max_diff.max(diff);
        }
        span = max_diff - min_diff;
        let offset = updated[ref_idx];
        for (hi, ui) in h.iter_mut().zip(&updated) {
            *hi = ui - offset;
        }
        if span < opts.tol {
            let average_cost = 0.5 * (max_diff + min_diff);
            let actions = (0..len)
                .map(|i| {
                    let q_idle = backup(mdp.row(i, Action::Idle), &h);
                    let q_transmit = backup(mdp.row(i, Action::Transmit), &h);
                    if q_transmit < q_idle {
                        Action::Transmit
                    } else {
                        Action::Idle
                    }
                })
                .collect();
            return Ok(RviSolution {
                value: ValueFunction {
                    space: mdp.space,
                    values: h,
                    average_cost,
                },
                policy: PolicyTable {
                    space: mdp.space,
                    actions,
                },
                iterations: iteration,
                span,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        span,
    })
}

fn backup(row: &Row, h: &[f64]) -> f64 {
    row.cost
        + row
            .entries
            .iter()
            .map(|&(j, prob)| prob * h[j])
            .sum::<f64>()
}

/// Shape of one error branch of a policy table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchReport {
    /// Whether the transmit set is an up-set in age: once the policy
    /// transmits at some age it transmits at every larger age.
    pub monotone: bool,
    /// Action taken in the branch's synced anchor state.
    pub synced_transmit: bool,
    /// Smallest error age at which the policy transmits, if any.
    pub first_transmit_age: Option<u32>,
    /// Threshold reproducing the branch when it has switching shape:
    /// 0 when the anchor transmits together with every error age, the first
    /// transmitting age when the anchor stays idle.
    pub threshold: Option<u32>,
}

/// Structure report for a full policy table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwitchingStructureReport {
    pub ma: BranchReport,
    pub fa: BranchReport,
}

impl SwitchingStructureReport {
    /// Whether both branches are monotone with a consistent threshold.
    pub fn is_switching(&self) -> bool {
        self.ma.threshold.is_some() && self.fa.threshold.is_some()
    }

    /// The equivalent two-threshold policy, when one exists.
    pub fn as_switching_policy(&self) -> Option<SwitchingPolicy> {
        Some(SwitchingPolicy::new(self.ma.threshold?, self.fa.threshold?))
    }
}

/// Reports, per error branch, whether the transmit set is monotone in age,
/// the inferred thresholds, and the synced-state actions. Non-monotone
/// policies are reported as such, not rejected.
pub fn check_switching_structure(policy: &PolicyTable) -> SwitchingStructureReport {
    let n = policy.space().max_age();
    let branch = |kind: ErrorKind| -> BranchReport {
        let (anchor, state_of): (SystemState, fn(u32) -> SystemState) = match kind {
            ErrorKind::MissedAlarm => (
                SystemState::Synced(SourceState::Normal),
                SystemState::MissedAlarm,
            ),
            ErrorKind::FalseAlarm => (
                SystemState::Synced(SourceState::Alarm),
                SystemState::FalseAlarm,
            ),
        };
        let synced_transmit = policy.action(anchor).transmits();
        let mut monotone = true;
        let mut first_transmit_age = None;
        let mut seen_transmit = false;
        for age in 1..=n {
            let transmits = policy.action(state_of(age)).transmits();
            if transmits && first_transmit_age.is_none() {
                first_transmit_age = Some(age);
            }
            if seen_transmit && !transmits {
                monotone = false;
            }
            seen_transmit |= transmits;
        }
        let threshold = match (monotone, synced_transmit, first_transmit_age) {
            (true, true, Some(1)) => Some(0),
            (true, false, Some(age)) => Some(age),
            _ => None,
        };
        BranchReport {
            monotone,
            synced_transmit,
            first_transmit_age,
            threshold,
        }
    };
    SwitchingStructureReport {
        ma: branch(ErrorKind::MissedAlarm),
        fa: branch(ErrorKind::FalseAlarm),
    }
}

/// Convenience: the policy table induced by a switching policy on `S_N`.
pub fn switching_policy_table(space: StateSpace, pol: &SwitchingPolicy) -> PolicyTable {
    PolicyTable::from_fn(space, |s| {
        if pol.transmits(s) {
            Action::Transmit
        } else {
            Action::Idle
        }
    })
}
