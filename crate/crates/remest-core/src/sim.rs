//! Monte Carlo trajectory engine and empirical policy metrics.
//!
//! Runs the slot-by-slot dynamics forward under any policy and reports
//! time-averaged metrics with batch-means standard errors, plus the empirical
//! state histogram. Three independent RNG streams (source, channel, policy)
//! are split from one seed, so changing the policy never perturbs the source
//! and channel sample paths.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::analytic::{PolicyMetrics, StationaryDistribution};
use crate::error::{Error, Result};
use crate::model::{stage_cost, ModelParams, SourceState, SystemState};
use crate::policy::Policy;

/// Trajectory controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    /// Number of simulated slots.
    pub horizon: u64,
    pub seed: u64,
    /// Slots discarded before metrics accumulate.
    pub burn_in: u64,
}

impl SimConfig {
    pub const DEFAULT_BURN_IN: u64 = 10_000;

    pub fn new(horizon: u64, seed: u64) -> Self {
        Self {
            horizon,
            seed,
            burn_in: Self::DEFAULT_BURN_IN.min(horizon.saturating_sub(1)),
        }
    }
}

const BATCHES: usize = 100;

/// Batch-means standard errors for the three metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricStandardErrors {
    pub avg_cost: f64,
    pub frequency: f64,
    pub objective: f64,
}

/// One empirical histogram entry with its batch-means standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramEntry {
    pub state: SystemState,
    pub mass: f64,
    pub std_error: f64,
}

/// Result of one simulated trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalReport {
    pub metrics: PolicyMetrics,
    pub standard_errors: MetricStandardErrors,
    /// Visited states with their empirical masses, synced states first, then
    /// each error branch by increasing age.
    pub histogram: Vec<HistogramEntry>,
    pub transmissions: u64,
    pub counted_slots: u64,
    pub batches: usize,
}

impl EmpiricalReport {
    pub fn histogram_mass(&self, s: SystemState) -> f64 {
        self.histogram
            .iter()
            .find(|e| e.state == s)
            .map_or(0.0, |e| e.mass)
    }

    pub fn histogram_entry(&self, s: SystemState) -> Option<&HistogramEntry> {
        self.histogram.iter().find(|e| e.state == s)
    }
}

/// Per-state visit counters, total plus per batch.
#[derive(Debug, Default)]
struct VisitCounts {
    total: Vec<u64>,
    batch: Vec<Vec<u32>>,
}

impl VisitCounts {
    fn record(&mut self, idx: usize, batch: Option<usize>, batches: usize) {
        if idx >= self.total.len() {
            self.total.resize(idx + 1, 0);
            self.batch.resize_with(idx + 1, || vec![0; batches]);
        }
        self.total[idx] += 1;
        if let Some(b) = batch {
            self.batch[idx][b] += 1;
        }
    }
}

/// Runs `cfg.horizon` slots from the synced-normal state and accumulates
/// stage costs, transmissions, and state visits after the burn-in.
///
/// The report is reproducible: identical inputs give bit-identical output.
pub fn simulate(params: &ModelParams, policy: &Policy, cfg: &SimConfig) -> Result<EmpiricalReport> {
    if cfg.horizon == 0 {
        return Err(Error::InvalidConfig(
            "simulation horizon must be positive".into(),
        ));
    }
    if cfg.burn_in >= cfg.horizon {
        return Err(Error::InvalidConfig(format!(
            "burn-in {} must be below the horizon {}",
            cfg.burn_in, cfg.horizon
        )));
    }

    let mut source_rng = stream(cfg.seed, 0);
    let mut channel_rng = stream(cfg.seed, 1);
    let mut policy_rng = stream(cfg.seed, 2);

    let counted = cfg.horizon - cfg.burn_in;
    let batches = BATCHES.min(counted as usize).max(1);
    let batch_len = counted / batches as u64;
    let batched_slots = batch_len * batches as u64;

    let mut cost_sum = 0.0f64;
    let mut transmissions = 0u64;
    let mut batch_cost = vec![0.0f64; batches];
    let mut batch_trans = vec![0u64; batches];
    let mut synced_counts = VisitCounts::default();
    let mut ma_counts = VisitCounts::default();
    let mut fa_counts = VisitCounts::default();

    let mut x = SourceState::Normal;
    let mut xhat = SourceState::Normal;
    let mut age = 0u32;

    for t in 1..=cfg.horizon {
        // Exactly one of the two error ages can be positive; the compact
        // (source, estimate, age) form enforces it, checked while running.
        debug_assert!((age == 0) == (x == xhat));
        let s = if x == xhat {
            SystemState::Synced(x)
        } else if x == SourceState::Alarm {
            SystemState::MissedAlarm(age)
        } else {
            SystemState::FalseAlarm(age)
        };

        let transmit = match policy {
            Policy::Switching(pol) => pol.transmits(s),
            Policy::Table(table) => table.action(s).transmits(),
            Policy::Randomized(pol) => policy_rng.gen_bool(pol.rate(x)),
        };

        if t > cfg.burn_in {
            let i = t - cfg.burn_in - 1;
            let batch = (i < batched_slots).then(|| (i / batch_len) as usize);
            cost_sum += stage_cost(params, s);
            transmissions += transmit as u64;
            if let Some(b) = batch {
                batch_cost[b] += stage_cost(params, s);
                batch_trans[b] += transmit as u64;
            }
            match s {
                SystemState::Synced(v) => synced_counts.record(v.as_bit() as usize, batch, batches),
                SystemState::MissedAlarm(a) => ma_counts.record(a as usize - 1, batch, batches),
                SystemState::FalseAlarm(a) => fa_counts.record(a as usize - 1, batch, batches),
            }
        }

        let flip_prob = match x {
            SourceState::Normal => params.p(),
            SourceState::Alarm => params.q(),
        };
        let x_next = if source_rng.gen_bool(flip_prob) {
            x.flip()
        } else {
            x
        };
        // The channel fires every slot so that policy changes cannot shift
        // the source/channel sample paths.
        let delivered = channel_rng.gen_bool(params.ps());
        let xhat_next = if transmit && delivered { x_next } else { xhat };
        age = if x_next == xhat_next { 0 } else { age + 1 };
        x = x_next;
        xhat = xhat_next;
    }

    let n = counted as f64;
    let avg_cost = cost_sum / n;
    let frequency = transmissions as f64 / n;
    let metrics = PolicyMetrics::new(avg_cost, frequency, params.lambda());

    let se_of = |means: &dyn Fn(usize) -> f64, overall: f64| -> f64 {
        if batches < 2 {
            return 0.0;
        }
        let var: f64 = (0..batches)
            .map(|b| (means(b) - overall).powi(2))
            .sum::<f64>()
            / (batches as f64 - 1.0);
        (var / batches as f64).sqrt()
    };
    let bl = batch_len as f64;
    let lambda = params.lambda();
    let standard_errors = MetricStandardErrors {
        avg_cost: se_of(&|b| batch_cost[b] / bl, mean_of(&batch_cost, bl)),
        frequency: se_of(
            &|b| batch_trans[b] as f64 / bl,
            mean_of_u64(&batch_trans, bl),
        ),
        objective: se_of(
            &|b| (batch_cost[b] + lambda * batch_trans[b] as f64) / bl,
            mean_of(&batch_cost, bl) + lambda * mean_of_u64(&batch_trans, bl),
        ),
    };

    let mut histogram = Vec::new();
    let mut push_entries = |counts: &VisitCounts, to_state: &dyn Fn(usize) -> SystemState| {
        for (idx, &total) in counts.total.iter().enumerate() {
            if total == 0 {
                continue;
            }
            let mass = total as f64 / n;
            let batch_means = &counts.batch[idx];
            let overall =
                batch_means.iter().map(|&c| c as f64).sum::<f64>() / (batches as f64 * bl);
            let std_error = se_of(&|b| batch_means[b] as f64 / bl, overall);
            histogram.push(HistogramEntry {
                state: to_state(idx),
                mass,
                std_error,
            });
        }
    };
    push_entries(&synced_counts, &|idx| {
        SystemState::Synced(if idx == 0 {
            SourceState::Normal
        } else {
            SourceState::Alarm
        })
    });
    push_entries(&ma_counts, &|idx| SystemState::MissedAlarm(idx as u32 + 1));
    push_entries(&fa_counts, &|idx| SystemState::FalseAlarm(idx as u32 + 1));

    Ok(EmpiricalReport {
        metrics,
        standard_errors,
        histogram,
        transmissions,
        counted_slots: counted,
        batches,
    })
}

fn stream(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn mean_of(batch: &[f64], bl: f64) -> f64 {
    batch.iter().sum::<f64>() / (batch.len() as f64 * bl)
}

fn mean_of_u64(batch: &[u64], bl: f64) -> f64 {
    batch.iter().map(|&v| v as f64).sum::<f64>() / (batch.len() as f64 * bl)
}

/// Objective difference `L(pi) - L(reference)`; nonnegative whenever the
/// reference is optimal.
pub fn performance_gap(metrics_pi: &PolicyMetrics, metrics_opt: &PolicyMetrics) -> f64 {
    metrics_pi.objective - metrics_opt.objective
}

/// Kullback-Leibler divergence between two stationary distributions over the
/// same enumerated horizon, `sum_s pi_s ln(pi_s / opt_s)`, with
/// `0 ln(0/x) = 0` and infinity when `pi` puts mass where `opt` has none.
///
/// Tails past the horizon are omitted; callers choose horizons so each
/// omitted tail carries negligible mass.
pub fn kl_policy_distance(
    dist_pi: &StationaryDistribution,
    dist_opt: &StationaryDistribution,
) -> Result<f64> {
    if dist_pi.horizon() != dist_opt.horizon() {
        return Err(Error::HorizonMismatch {
            left: dist_pi.horizon(),
            right: dist_opt.horizon(),
        });
    }
    let mut sum = 0.0;
    for s in dist_pi.enumerated_states() {
        let a = dist_pi.mass(s);
        let b = dist_opt.mass(s);
        if a <= 0.0 {
            continue;
        }
        if b <= 0.0 {
            return Ok(f64::INFINITY);
        }
        sum += a * (a / b).ln();
    }
    Ok(sum)
}
