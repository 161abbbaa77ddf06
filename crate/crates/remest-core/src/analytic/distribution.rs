//! Stationary-distribution container shared by the closed-form evaluators.
//!
//! Masses are enumerated per error age up to a finite horizon; everything
//! past the horizon is a geometric tail captured exactly by its ratio and the
//! mass of the first omitted age, so totals and age-weighted sums lose nothing
//! to enumeration.

use crate::model::{ErrorKind, SourceState, SystemState};

/// Exact geometric tail of one error branch beyond the enumeration horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricTail {
    /// Mass ratio between consecutive ages past the horizon.
    pub ratio: f64,
    /// Mass of the first age past the horizon.
    pub first_omitted_mass: f64,
}

impl GeometricTail {
    pub const ZERO: GeometricTail = GeometricTail {
        ratio: 0.0,
        first_omitted_mass: 0.0,
    };

    /// Total mass carried by the tail.
    pub fn total_mass(&self) -> f64 {
        if self.first_omitted_mass == 0.0 {
            0.0
        } else {
            self.first_omitted_mass / (1.0 - self.ratio)
        }
    }
}

/// Probability mass over the joint (source, estimate, age) states, split into
/// the two synced atoms, per-age masses for each error branch up to a common
/// horizon, and exact geometric tails past it.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    synced_normal: f64,
    synced_alarm: f64,
    ma: Vec<f64>,
    fa: Vec<f64>,
    ma_tail: GeometricTail,
    fa_tail: GeometricTail,
}

impl StationaryDistribution {
    pub(crate) fn new(
        synced_normal: f64,
        synced_alarm: f64,
        ma: Vec<f64>,
        fa: Vec<f64>,
        ma_tail: GeometricTail,
        fa_tail: GeometricTail,
    ) -> Self {
        debug_assert_eq!(ma.len(), fa.len());
        Self {
            synced_normal,
            synced_alarm,
            ma,
            fa,
            ma_tail,
            fa_tail,
        }
    }

    /// Number of enumerated ages per error branch.
    pub fn horizon(&self) -> usize {
        self.ma.len()
    }

    pub fn synced_mass(&self, x: SourceState) -> f64 {
        match x {
            SourceState::Normal => self.synced_normal,
            SourceState::Alarm => self.synced_alarm,
        }
    }

    fn branch(&self, kind: ErrorKind) -> (&[f64], &GeometricTail) {
        match kind {
            ErrorKind::MissedAlarm => (&self.ma, &self.ma_tail),
            ErrorKind::FalseAlarm => (&self.fa, &self.fa_tail),
        }
    }

    /// Mass of one error state; ages past the horizon are extrapolated from
    /// the tail.
    pub fn error_mass(&self, kind: ErrorKind, age: u32) -> f64 {
        debug_assert!(age >= 1);
        let (masses, tail) = self.branch(kind);
        let idx = age as usize - 1;
        if idx < masses.len() {
            masses[idx]
        } else if tail.first_omitted_mass == 0.0 {
            0.0
        } else {
            tail.first_omitted_mass * tail.ratio.powi((age as i32 - 1) - masses.len() as i32)
        }
    }

    pub fn mass(&self, s: SystemState) -> f64 {
        match s {
            SystemState::Synced(x) => self.synced_mass(x),
            SystemState::MissedAlarm(age) => self.error_mass(ErrorKind::MissedAlarm, age),
            SystemState::FalseAlarm(age) => self.error_mass(ErrorKind::FalseAlarm, age),
        }
    }

    pub fn tail(&self, kind: ErrorKind) -> GeometricTail {
        *self.branch(kind).1
    }

    /// Total enumerated-plus-tail mass; 1 up to rounding for every
    /// distribution produced by this crate.
    pub fn total_mass(&self) -> f64 {
        let enumerated: f64 = self.synced_normal
            + self.synced_alarm
            + self.ma.iter().sum::<f64>()
            + self.fa.iter().sum::<f64>();
        enumerated + self.ma_tail.total_mass() + self.fa_tail.total_mass()
    }

    /// Total stationary mass of one error class, tail included.
    pub fn occupancy_rate(&self, kind: ErrorKind) -> f64 {
        self.mass_at_or_above(kind, 1)
    }

    /// Mass of all states of `kind` with age `>= age`, tail included.
    pub fn mass_at_or_above(&self, kind: ErrorKind, age: u32) -> f64 {
        let (masses, tail) = self.branch(kind);
        let start = (age.max(1) as usize) - 1;
        if start < masses.len() {
            masses[start..].iter().sum::<f64>() + tail.total_mass()
        } else if tail.first_omitted_mass == 0.0 {
            0.0
        } else {
            tail.first_omitted_mass * tail.ratio.powi(start as i32 - masses.len() as i32)
                / (1.0 - tail.ratio)
        }
    }

    /// Age-weighted mass `sum_k k * mass(kind, k)`, tail included.
    pub fn age_weighted_mass(&self, kind: ErrorKind) -> f64 {
        let (masses, tail) = self.branch(kind);
        let enumerated: f64 = masses
            .iter()
            .enumerate()
            .map(|(i, m)| (i as f64 + 1.0) * m)
            .sum();
        let tail_sum = if tail.first_omitted_mass == 0.0 {
            0.0
        } else {
            // sum_{j >= 0} (h + 1 + j) * first * ratio^j
            let h = masses.len() as f64;
            tail.first_omitted_mass
                * ((h + 1.0) / (1.0 - tail.ratio) + tail.ratio / (1.0 - tail.ratio).powi(2))
        };
        enumerated + tail_sum
    }

    /// Enumerated states in a fixed order: the two synced states, then each
    /// branch by increasing age.
    pub fn enumerated_states(&self) -> impl Iterator<Item = SystemState> + '_ {
        let h = self.horizon() as u32;
        [
            SystemState::Synced(SourceState::Normal),
            SystemState::Synced(SourceState::Alarm),
        ]
        .into_iter()
        .chain((1..=h).map(SystemState::MissedAlarm))
        .chain((1..=h).map(SystemState::FalseAlarm))
    }
}
