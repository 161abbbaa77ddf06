//! Age-truncated counterparts of the switching-policy chain.
//!
//! Truncating both age processes at `N` folds each branch's geometric tail
//! into the boundary age: interior masses are unchanged and the boundary
//! holds `r / (1 - r)` times the mass one age below, `r` being the branch's
//! post-threshold ratio. The objective of the truncated chain then differs
//! from the exact one by a closed-form gap that decays exponentially in `N`.

use super::distribution::{GeometricTail, StationaryDistribution};
use super::switching::{fa_coefficients, ma_coefficients, synced_masses};
use super::SwitchingPolicy;
use crate::error::{Error, Result};
use crate::model::ModelParams;

fn check_truncation(pol: &SwitchingPolicy, n: u32) -> Result<()> {
    if n <= pol.max_threshold() {
        return Err(Error::TruncationTooSmall {
            n,
            max_threshold: pol.max_threshold(),
        });
    }
    Ok(())
}

/// Stationary distribution of the chain with both ages clamped at `n`.
///
/// Requires `n` strictly above both thresholds. The result enumerates ages
/// `1..=n` with zero tails; the age-`n` entries are the folded boundary
/// masses.
pub fn truncated_stationary(
    m: &ModelParams,
    pol: &SwitchingPolicy,
    n: u32,
) -> Result<StationaryDistribution> {
    check_truncation(pol, n)?;
    let ma = ma_coefficients(m, pol);
    let fa = fa_coefficients(m, pol);
    let (nu_syn0, nu_syn1) = synced_masses(m, &ma, &fa);

    let branch = |flip: f64, stay: f64, threshold: u32, anchor: f64| -> Vec<f64> {
        let mut masses = Vec::with_capacity(n as usize);
        let mut current = flip * anchor * if threshold == 0 { m.pf() } else { 1.0 };
        for age in 1..n {
            masses.push(current);
            current *= if age < threshold { stay } else { stay * m.pf() };
        }
        // Boundary absorption: all mass from age n on, folded into age n.
        let ratio = stay * m.pf();
        let below = *masses.last().unwrap_or(&(flip * anchor));
        let boundary = if ratio == 0.0 {
            0.0
        } else {
            ratio / (1.0 - ratio) * below
        };
        masses.push(boundary);
        masses
    };

    let ma_masses = branch(ma.flip, ma.stay, pol.ma_threshold, nu_syn0);
    let fa_masses = branch(fa.flip, fa.stay, pol.fa_threshold, nu_syn1);
    Ok(StationaryDistribution::new(
        nu_syn0,
        nu_syn1,
        ma_masses,
        fa_masses,
        GeometricTail::ZERO,
        GeometricTail::ZERO,
    ))
}

/// Exact objective gap between the untruncated chain and its `n`-truncation:
/// `L(pi) - L(pi, n)`, always nonnegative and exponentially small in `n`.
pub fn truncation_gap(m: &ModelParams, pol: &SwitchingPolicy, n: u32) -> Result<f64> {
    check_truncation(pol, n)?;
    let ma = ma_coefficients(m, pol);
    let fa = fa_coefficients(m, pol);
    let (nu_syn0, nu_syn1) = synced_masses(m, &ma, &fa);
    let n_i = n as i32;
    let ma_gap = m.beta()
        * nu_syn0
        * m.p()
        * m.q_bar().powi(n_i)
        * m.pf().powi(n_i - pol.ma_threshold as i32 + 1)
        / (1.0 - m.q_bar() * m.pf()).powi(2);
    let fa_gap = (1.0 - m.beta())
        * nu_syn1
        * m.q()
        * m.p_bar().powi(n_i)
        * m.pf().powi(n_i - pol.fa_threshold as i32 + 1)
        / (1.0 - m.p_bar() * m.pf()).powi(2);
    Ok(ma_gap + fa_gap)
}
