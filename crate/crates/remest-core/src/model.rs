//! System model: the two-state source, the unreliable channel, the joint
//! (source, estimate, age) state, the controlled transition kernel, and the
//! per-stage costs. Every other module consumes these definitions.
//!
//! The source is a binary Markov chain over {normal, alarm} with transition
//! probabilities `p` (normal -> alarm) and `q` (alarm -> normal). The receiver
//! holds the last delivered sample as its estimate. A transmit decision made
//! in slot `t` samples the *next* source value and delivers it at the start of
//! slot `t+1` with probability `p_s` (action delay). While source and estimate
//! disagree, exactly one of two error ages grows: the age of missed alarm
//! (source = alarm, estimate = normal) or the age of false alarm (source =
//! normal, estimate = alarm).

use crate::error::{Error, Result};

/// One of the two source values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SourceState {
    /// Low-priority state 0.
    Normal,
    /// High-priority state 1.
    Alarm,
}

impl SourceState {
    pub fn flip(self) -> Self {
        match self {
            SourceState::Normal => SourceState::Alarm,
            SourceState::Alarm => SourceState::Normal,
        }
    }

    pub fn as_bit(self) -> u8 {
        match self {
            SourceState::Normal => 0,
            SourceState::Alarm => 1,
        }
    }
}

/// The sensor's per-slot decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    /// Stay silent; the estimate keeps its current value.
    Idle,
    /// Sample-and-transmit, taking effect at the start of the next slot.
    Transmit,
}

impl Action {
    pub fn transmits(self) -> bool {
        matches!(self, Action::Transmit)
    }
}

/// Joint (source, estimate, age) state.
///
/// The two error ages can never be positive at the same time, so a single
/// age plus the error type is enough. The two synced states are kept distinct
/// because the transition kernel treats them asymmetrically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemState {
    /// Source and estimate agree; both ages are zero.
    Synced(SourceState),
    /// Source is in alarm, estimate says normal, for `age >= 1` slots.
    MissedAlarm(u32),
    /// Source is normal, estimate says alarm, for `age >= 1` slots.
    FalseAlarm(u32),
}

impl SystemState {
    pub fn source(self) -> SourceState {
        match self {
            SystemState::Synced(x) => x,
            SystemState::MissedAlarm(_) => SourceState::Alarm,
            SystemState::FalseAlarm(_) => SourceState::Normal,
        }
    }

    pub fn estimate(self) -> SourceState {
        match self {
            SystemState::Synced(x) => x,
            SystemState::MissedAlarm(_) => SourceState::Normal,
            SystemState::FalseAlarm(_) => SourceState::Alarm,
        }
    }

    /// The compact error age (zero in synced states).
    pub fn age(self) -> u32 {
        match self {
            SystemState::Synced(_) => 0,
            SystemState::MissedAlarm(age) | SystemState::FalseAlarm(age) => age,
        }
    }

    pub fn is_synced(self) -> bool {
        matches!(self, SystemState::Synced(_))
    }
}

/// Which error branch of the state space a state or mass belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    MissedAlarm,
    FalseAlarm,
}

/// Validated model parameters.
///
/// Holds the source transition probabilities `p` and `q`, the channel success
/// probability `p_s`, the missed-alarm significance `beta`, and the per-slot
/// communication cost `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    p: f64,
    q: f64,
    ps: f64,
    beta: f64,
    lambda: f64,
}

impl ModelParams {
    /// Builds parameters, rejecting anything outside the admissible ranges:
    /// `0 < p, q < 1` (irreducible source), `0 < p_s <= 1`, `0 <= beta <= 1`,
    /// `lambda >= 0`, all finite.
    pub fn new(p: f64, q: f64, ps: f64, beta: f64, lambda: f64) -> Result<Self> {
        let finite = [p, q, ps, beta, lambda].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParams("all parameters must be finite".into()));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParams(format!(
                "p must be in (0, 1), got {p}"
            )));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParams(format!(
                "q must be in (0, 1), got {q}"
            )));
        }
        if !(ps > 0.0 && ps <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "p_s must be in (0, 1], got {ps}"
            )));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidParams(format!(
                "beta must be in [0, 1], got {beta}"
            )));
        }
        if lambda < 0.0 {
            return Err(Error::InvalidParams(format!(
                "lambda must be >= 0, got {lambda}"
            )));
        }
        Ok(Self {
            p,
            q,
            ps,
            beta,
            lambda,
        })
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    #[inline]
    pub fn p_bar(&self) -> f64 {
        1.0 - self.p
    }

    #[inline]
    pub fn q_bar(&self) -> f64 {
        1.0 - self.q
    }

    /// Channel success probability.
    #[inline]
    pub fn ps(&self) -> f64 {
        self.ps
    }

    /// Channel failure probability.
    #[inline]
    pub fn pf(&self) -> f64 {
        1.0 - self.ps
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Stationary probability of the normal source state, `q / (p + q)`.
    #[inline]
    pub fn nu0(&self) -> f64 {
        self.q / (self.p + self.q)
    }

    /// Stationary probability of the alarm source state, `p / (p + q)`.
    #[inline]
    pub fn nu1(&self) -> f64 {
        self.p / (self.p + self.q)
    }

    /// Source transition probability from `from` to `to`.
    pub fn source_transition(&self, from: SourceState, to: SourceState) -> f64 {
        match (from, to) {
            (SourceState::Normal, SourceState::Alarm) => self.p,
            (SourceState::Normal, SourceState::Normal) => 1.0 - self.p,
            (SourceState::Alarm, SourceState::Normal) => self.q,
            (SourceState::Alarm, SourceState::Alarm) => 1.0 - self.q,
        }
    }

    /// Positive autocorrelation of the source, `p < 1 - q`.
    #[inline]
    pub fn is_positively_correlated(&self) -> bool {
        self.p < 1.0 - self.q
    }

    /// Slot-to-slot independence, `p = 1 - q`.
    #[inline]
    pub fn is_iid(&self) -> bool {
        self.p == 1.0 - self.q
    }

    #[inline]
    pub fn is_symmetric(&self) -> bool {
        self.p == self.q
    }
}

/// One outgoing transition of the controlled kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionEntry {
    pub next: SystemState,
    pub probability: f64,
}

/// The exact support of the one-step transition law from `(s, a)`.
///
/// An idle slot freezes the estimate, so the source move alone decides the
/// next state (two entries). A transmit slot adds the channel outcome: the
/// delivered sample is the *next* source value, so when the source moves onto
/// the current estimate the slot ends synced regardless of the channel, and
/// otherwise the channel decides between syncing and aging one more slot
/// (three entries, one of which may carry probability zero when `p_s = 1`).
pub fn transition_kernel(params: &ModelParams, s: SystemState, a: Action) -> Vec<TransitionEntry> {
    let x = s.source();
    let xhat = s.estimate();
    let age = s.age();
    let stay = params.source_transition(x, x);
    let moved = params.source_transition(x, x.flip());

    let next_given = |x_next: SourceState, delivered: bool| -> SystemState {
        let est = if delivered { x_next } else { xhat };
        if x_next == est {
            SystemState::Synced(x_next)
        } else if x_next == SourceState::Alarm {
            SystemState::MissedAlarm(age + 1)
        } else {
            SystemState::FalseAlarm(age + 1)
        }
    };

    match a {
        Action::Idle => vec![
            TransitionEntry {
                next: next_given(x, false),
                probability: stay,
            },
            TransitionEntry {
                next: next_given(x.flip(), false),
                probability: moved,
            },
        ],
        Action::Transmit => {
            // Group the source moves by whether the landing value equals the
            // frozen estimate: there the channel outcome is irrelevant.
            let (onto_estimate, away) = if x == xhat {
                (stay, moved)
            } else {
                (moved, stay)
            };
            let away_value = if x == xhat { x.flip() } else { x };
            vec![
                TransitionEntry {
                    next: SystemState::Synced(xhat),
                    probability: onto_estimate,
                },
                TransitionEntry {
                    next: next_given(away_value, true),
                    probability: away * params.ps(),
                },
                TransitionEntry {
                    next: next_given(away_value, false),
                    probability: away * params.pf(),
                },
            ]
        }
    }
}

/// Age-weighted cost of occupying a state for one slot:
/// `beta * age` for missed alarms, `(1 - beta) * age` for false alarms.
pub fn stage_cost(params: &ModelParams, s: SystemState) -> f64 {
    match s {
        SystemState::Synced(_) => 0.0,
        SystemState::MissedAlarm(age) => params.beta() * f64::from(age),
        SystemState::FalseAlarm(age) => (1.0 - params.beta()) * f64::from(age),
    }
}

/// Expected one-step cost of taking `a` in `s`: the kernel-weighted cost of
/// the landing state plus `lambda` when transmitting.
pub fn expected_stage_cost(params: &ModelParams, s: SystemState, a: Action) -> f64 {
    let expected_age_cost: f64 = transition_kernel(params, s, a)
        .iter()
        .map(|e| e.probability * stage_cost(params, e.next))
        .sum();
    let comms = if a.transmits() { params.lambda() } else { 0.0 };
    expected_age_cost + comms
}

/// Enumeration of the age-truncated state space: the two synced states plus
/// both error branches with ages `1..=max_age`, in that order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateSpace {
    max_age: u32,
}

impl StateSpace {
    pub fn new(max_age: u32) -> Self {
        Self { max_age }
    }

    #[inline]
    pub fn max_age(&self) -> u32 {
        self.max_age
    }

    /// Number of states, `2 * max_age + 2`.
    #[inline]
    pub fn len(&self) -> usize {
        2 * self.max_age as usize + 2
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, s: SystemState) -> usize {
        match s {
            SystemState::Synced(SourceState::Normal) => 0,
            SystemState::Synced(SourceState::Alarm) => 1,
            SystemState::MissedAlarm(age) => {
                debug_assert!(age >= 1 && age <= self.max_age);
                1 + age as usize
            }
            SystemState::FalseAlarm(age) => {
                debug_assert!(age >= 1 && age <= self.max_age);
                1 + self.max_age as usize + age as usize
            }
        }
    }

    pub fn state(&self, index: usize) -> SystemState {
        let n = self.max_age as usize;
        match index {
            0 => SystemState::Synced(SourceState::Normal),
            1 => SystemState::Synced(SourceState::Alarm),
            i if i <= 1 + n => SystemState::MissedAlarm((i - 1) as u32),
            i if i <= 1 + 2 * n => SystemState::FalseAlarm((i - 1 - n) as u32),
            _ => panic!("state index {index} out of range for max_age {n}"),
        }
    }

    /// Clamps an arbitrary state's age into this space.
    pub fn clamp(&self, s: SystemState) -> SystemState {
        match s {
            SystemState::MissedAlarm(age) => SystemState::MissedAlarm(age.min(self.max_age)),
            SystemState::FalseAlarm(age) => SystemState::FalseAlarm(age.min(self.max_age)),
            synced => synced,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = SystemState> + '_ {
        (0..self.len()).map(|i| self.state(i))
    }
}
