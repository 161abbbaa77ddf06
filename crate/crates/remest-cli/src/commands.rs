//! The six run modes behind the CLI.

use rayon::prelude::*;

use remest_core::analytic::{
    randomized_metrics, randomized_stationary, randomized_stationary_with_horizon,
    switching_metrics, switching_metrics_from_distribution, switching_stationary,
    switching_stationary_with_horizon, truncated_stationary, truncation_gap, PolicyMetrics,
    RandomizedPolicy, StationaryDistribution, SwitchingPolicy,
};
use remest_core::mdp::{build_truncated_mdp, check_switching_structure, rvi_solve, RviOptions};
use remest_core::model::{ErrorKind, ModelParams, SourceState};
use remest_core::oracle::solve_stationary;
use remest_core::search::{algorithm1, best_diagonal, best_randomized, search_up_to};
use remest_core::sim::{kl_policy_distance, performance_gap, simulate, SimConfig};
use remest_core::{Error, Policy};

use crate::config::{Axis, Mode, RunConfig, GRID_CAP};
use crate::csvout::{fmt_f64, Table};

/// Whether all requested checks passed (only crosscheck can say no).
pub enum Outcome {
    Done,
    ChecksFailed,
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, Error> {
    match cfg.mode {
        Mode::Evaluate => evaluate(cfg),
        Mode::Search => search(cfg),
        Mode::Rvi => rvi(cfg),
        Mode::Simulate => simulate_mode(cfg),
        Mode::Sweep => sweep(cfg),
        Mode::Crosscheck => crosscheck(cfg),
    }
}

fn describe_params(m: &ModelParams) -> String {
    format!(
        "p={} q={} ps={} beta={} lambda={}",
        m.p(),
        m.q(),
        m.ps(),
        m.beta(),
        m.lambda()
    )
}

fn evaluate(cfg: &RunConfig) -> Result<Outcome, Error> {
    if cfg.policy.is_none() && cfg.rates.is_none() {
        return Err(Error::InvalidConfig(
            "evaluate needs --policy MA,FA and/or --rates f0,f1".into(),
        ));
    }
    let m = &cfg.params;
    let mut table = Table::new(vec![
        "kind",
        "ma_threshold",
        "fa_threshold",
        "f0",
        "f1",
        "avg_cost",
        "frequency",
        "objective",
        "ma_occupancy",
        "fa_occupancy",
    ]);
    println!("model: {}", describe_params(m));
    if let Some(pol) = cfg.policy {
        let metrics = switching_metrics(m, &pol);
        let dist = switching_stationary(m, &pol);
        let ma_occ = dist.occupancy_rate(ErrorKind::MissedAlarm);
        let fa_occ = dist.occupancy_rate(ErrorKind::FalseAlarm);
        println!("switching policy {pol}:");
        print_metrics(&metrics, ma_occ, fa_occ);
        if cfg.nmax > pol.max_threshold() {
            let gap = truncation_gap(m, &pol, cfg.nmax)?;
            println!("  truncation_gap(N={})  {}", cfg.nmax, fmt_f64(gap));
        }
        table.push(vec![
            "switching".into(),
            pol.ma_threshold.to_string(),
            pol.fa_threshold.to_string(),
            String::new(),
            String::new(),
            fmt_f64(metrics.avg_cost),
            fmt_f64(metrics.frequency),
            fmt_f64(metrics.objective),
            fmt_f64(ma_occ),
            fmt_f64(fa_occ),
        ]);
    }
    if let Some(rates) = cfg.rates {
        let metrics = randomized_metrics(m, &rates);
        let dist = randomized_stationary(m, &rates);
        let ma_occ = dist.occupancy_rate(ErrorKind::MissedAlarm);
        let fa_occ = dist.occupancy_rate(ErrorKind::FalseAlarm);
        println!("randomized policy (f0={}, f1={}):", rates.f0(), rates.f1());
        print_metrics(&metrics, ma_occ, fa_occ);
        table.push(vec![
            "randomized".into(),
            String::new(),
            String::new(),
            fmt_f64(rates.f0()),
            fmt_f64(rates.f1()),
            fmt_f64(metrics.avg_cost),
            fmt_f64(metrics.frequency),
            fmt_f64(metrics.objective),
            fmt_f64(ma_occ),
            fmt_f64(fa_occ),
        ]);
    }
    if let Some(path) = &cfg.out {
        table.write(Some(path)).map_err(io_error)?;
        println!("wrote {} rows to {}", table.rows.len(), path.display());
    }
    Ok(Outcome::Done)
}

fn print_metrics(metrics: &PolicyMetrics, ma_occ: f64, fa_occ: f64) {
    println!("  avg_cost      {}", fmt_f64(metrics.avg_cost));
    println!("  frequency     {}", fmt_f64(metrics.frequency));
    println!("  objective     {}", fmt_f64(metrics.objective));
    println!("  ma_occupancy  {}", fmt_f64(ma_occ));
    println!("  fa_occupancy  {}", fmt_f64(fa_occ));
}

fn search(cfg: &RunConfig) -> Result<Outcome, Error> {
    let m = &cfg.params;
    println!("model: {}", describe_params(m));
    let result = match cfg.epsilon {
        Some(epsilon) => algorithm1(m, epsilon, cfg.nmax)?,
        None => {
            println!(
                "threshold grid bounded at N={} (give --epsilon to derive N from the \
                 truncation gap)",
                cfg.nmax
            );
            search_up_to(m, cfg.nmax)
        }
    };
    println!("best switching policy {}", result.best_policy);
    println!("  avg_cost      {}", fmt_f64(result.best_metrics.avg_cost));
    println!("  frequency     {}", fmt_f64(result.best_metrics.frequency));
    println!("  objective     {}", fmt_f64(result.best_metrics.objective));
    println!(
        "  truncation {}  evaluations {}  candidates {}",
        result.truncation, result.evaluations, result.candidate_set_size
    );
    if result.family_restricted {
        println!(
            "  note: negatively correlated source; the switching family may be suboptimal, \
             use --mode rvi for the authoritative optimum"
        );
    }
    if let Some(path) = &cfg.out {
        let mut table = Table::new(vec![
            "ma_threshold",
            "fa_threshold",
            "avg_cost",
            "frequency",
            "objective",
            "evaluations",
            "candidate_set_size",
            "truncation",
            "family_restricted",
        ]);
        table.push(vec![
            result.best_policy.ma_threshold.to_string(),
            result.best_policy.fa_threshold.to_string(),
            fmt_f64(result.best_metrics.avg_cost),
            fmt_f64(result.best_metrics.frequency),
            fmt_f64(result.best_metrics.objective),
            result.evaluations.to_string(),
            result.candidate_set_size.to_string(),
            result.truncation.to_string(),
            result.family_restricted.to_string(),
        ]);
        table.write(Some(path)).map_err(io_error)?;
        println!("wrote 1 row to {}", path.display());
    }
    Ok(Outcome::Done)
}

fn rvi(cfg: &RunConfig) -> Result<Outcome, Error> {
    let m = &cfg.params;
    println!("model: {}", describe_params(m));
    let mdp = build_truncated_mdp(m, cfg.nmax)?;
    let solution = rvi_solve(&mdp, &RviOptions::default())?;
    println!(
        "value iteration on {} states (N={}):",
        mdp.space().len(),
        cfg.nmax
    );
    println!("  average_cost  {}", fmt_f64(solution.value.average_cost));
    println!("  iterations    {}", solution.iterations);
    println!("  span          {}", fmt_f64(solution.span));
    let report = check_switching_structure(&solution.policy);
    for (name, branch) in [("missed-alarm", report.ma), ("false-alarm", report.fa)] {
        println!(
            "  {name}: monotone={} synced_transmit={} first_transmit_age={:?} threshold={:?}",
            branch.monotone, branch.synced_transmit, branch.first_transmit_age, branch.threshold
        );
    }
    if let Some(pol) = report.as_switching_policy() {
        println!("  switching-equivalent policy {pol}");
    }
    if let Some(path) = &cfg.out {
        let mut table = Table::new(vec![
            "average_cost",
            "iterations",
            "span",
            "ma_threshold",
            "fa_threshold",
            "ma_monotone",
            "fa_monotone",
        ]);
        let fmt_thr = |t: Option<u32>| t.map_or(String::new(), |v| v.to_string());
        table.push(vec![
            fmt_f64(solution.value.average_cost),
            solution.iterations.to_string(),
            fmt_f64(solution.span),
            fmt_thr(report.ma.threshold),
            fmt_thr(report.fa.threshold),
            report.ma.monotone.to_string(),
            report.fa.monotone.to_string(),
        ]);
        table.write(Some(path)).map_err(io_error)?;
        println!("wrote 1 row to {}", path.display());
    }
    Ok(Outcome::Done)
}

fn chosen_policy(cfg: &RunConfig) -> Result<Policy, Error> {
    match (&cfg.policy, &cfg.rates) {
        (Some(pol), None) => Ok((*pol).into()),
        (None, Some(rates)) => Ok((*rates).into()),
        (None, None) => Err(Error::InvalidConfig(
            "this mode needs --policy MA,FA or --rates f0,f1".into(),
        )),
        (Some(_), Some(_)) => Err(Error::InvalidConfig(
            "give either --policy or --rates, not both".into(),
        )),
    }
}

fn simulate_mode(cfg: &RunConfig) -> Result<Outcome, Error> {
    let m = &cfg.params;
    let policy = chosen_policy(cfg)?;
    let sim_cfg = SimConfig {
        horizon: cfg.horizon,
        seed: cfg.seed,
        burn_in: cfg.burn_in,
    };
    let report = simulate(m, &policy, &sim_cfg)?;
    println!("model: {}", describe_params(m));
    println!(
        "simulated {} slots (burn-in {}, seed {}):",
        cfg.horizon, cfg.burn_in, cfg.seed
    );
    println!(
        "  avg_cost      {}  (se {})",
        fmt_f64(report.metrics.avg_cost),
        fmt_f64(report.standard_errors.avg_cost)
    );
    println!(
        "  frequency     {}  (se {})",
        fmt_f64(report.metrics.frequency),
        fmt_f64(report.standard_errors.frequency)
    );
    println!(
        "  objective     {}  (se {})",
        fmt_f64(report.metrics.objective),
        fmt_f64(report.standard_errors.objective)
    );
    println!(
        "  transmissions {}  counted_slots {}",
        report.transmissions, report.counted_slots
    );
    if let Some(path) = &cfg.out {
        let mut table = Table::new(vec!["state", "age", "mass", "std_error"]);
        for entry in &report.histogram {
            let (kind, age) = match entry.state {
                remest_core::SystemState::Synced(SourceState::Normal) => ("synced_normal", 0),
                remest_core::SystemState::Synced(SourceState::Alarm) => ("synced_alarm", 0),
                remest_core::SystemState::MissedAlarm(age) => ("missed_alarm", age),
                remest_core::SystemState::FalseAlarm(age) => ("false_alarm", age),
            };
            table.push(vec![
                kind.into(),
                age.to_string(),
                fmt_f64(entry.mass),
                fmt_f64(entry.std_error),
            ]);
        }
        table.write(Some(path)).map_err(io_error)?;
        println!(
            "wrote {} histogram rows to {}",
            table.rows.len(),
            path.display()
        );
    }
    Ok(Outcome::Done)
}

fn sweep(cfg: &RunConfig) -> Result<Outcome, Error> {
    let table = match cfg.axis {
        Axis::Thresholds => threshold_sweep(cfg)?,
        axis => parameter_sweep(cfg, axis)?,
    };
    table.write(cfg.out.as_deref()).map_err(io_error)?;
    let summary = format!("swept {} grid points over {}", table.rows.len(), cfg.axis);
    match &cfg.out {
        Some(path) => println!("{summary}; wrote {}", path.display()),
        // CSV went to stdout; keep the summary off it.
        None => eprintln!("{summary}"),
    }
    Ok(Outcome::Done)
}

fn threshold_sweep(cfg: &RunConfig) -> Result<Table, Error> {
    let m = cfg.params;
    let r = cfg.grid_max;
    let points = (r as usize + 1).pow(2);
    if points > GRID_CAP {
        return Err(Error::InvalidConfig(format!(
            "threshold grid holds {points} points, above the cap of {GRID_CAP}"
        )));
    }
    let pairs: Vec<(u32, u32)> = (0..=r)
        .flat_map(|dm| (0..=r).map(move |df| (dm, df)))
        .collect();
    let rows: Vec<Vec<String>> = pairs
        .par_iter()
        .map(|&(dm, df)| {
            let metrics = switching_metrics(&m, &SwitchingPolicy::new(dm, df));
            vec![
                dm.to_string(),
                df.to_string(),
                fmt_f64(metrics.avg_cost),
                fmt_f64(metrics.frequency),
                fmt_f64(metrics.objective),
            ]
        })
        .collect();
    let mut table = Table::new(vec![
        "ma_threshold",
        "fa_threshold",
        "avg_cost",
        "frequency",
        "objective",
    ]);
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

/// One row of a parameter sweep: optimal switching vs best diagonal vs best
/// age-agnostic policy, with objective gaps, stationary-law divergences, and
/// missed-alarm occupancies.
fn parameter_sweep(cfg: &RunConfig, axis: Axis) -> Result<Table, Error> {
    let grid = cfg.grid.as_ref().ok_or_else(|| {
        Error::InvalidConfig("parameter sweeps need --grid start:stop:step".into())
    })?;
    let values = grid.values().map_err(Error::InvalidConfig)?;
    let base = cfg.params;
    let params_at = |v: f64| -> Result<ModelParams, Error> {
        match axis {
            Axis::Lambda => ModelParams::new(base.p(), base.q(), base.ps(), base.beta(), v),
            Axis::Beta => ModelParams::new(base.p(), base.q(), base.ps(), v, base.lambda()),
            Axis::Q => ModelParams::new(base.p(), v, base.ps(), base.beta(), base.lambda()),
            Axis::Thresholds => unreachable!("handled by threshold_sweep"),
        }
    };
    // Validate the whole grid up front so failures happen before any work.
    for &v in &values {
        params_at(v)?;
    }
    let n = cfg.nmax;
    let rows: Vec<Vec<String>> = values
        .par_iter()
        .map(|&v| {
            let m = params_at(v).expect("validated above");
            let opt = search_up_to(&m, n);
            let (diag_pol, diag_metrics) = best_diagonal(&m, n);
            let (rand_pol, rand_metrics) = best_randomized(&m);

            let opt_dist = switching_stationary(&m, &opt.best_policy);
            let diag_dist = switching_stationary(&m, &diag_pol);
            let rand_dist = randomized_stationary(&m, &rand_pol);
            let horizon = opt_dist
                .horizon()
                .max(diag_dist.horizon())
                .max(rand_dist.horizon());
            let opt_dist = switching_stationary_with_horizon(&m, &opt.best_policy, horizon)
                .expect("horizon covers the thresholds");
            let diag_dist = switching_stationary_with_horizon(&m, &diag_pol, horizon)
                .expect("horizon covers the thresholds");
            let rand_dist = randomized_stationary_with_horizon(&m, &rand_pol, horizon)
                .expect("any horizon is valid");

            let diag_kl = kl_policy_distance(&diag_dist, &opt_dist).expect("same horizon");
            let rand_kl = kl_policy_distance(&rand_dist, &opt_dist).expect("same horizon");
            vec![
                fmt_f64(v),
                opt.best_policy.ma_threshold.to_string(),
                opt.best_policy.fa_threshold.to_string(),
                fmt_f64(opt.best_metrics.avg_cost),
                fmt_f64(opt.best_metrics.frequency),
                fmt_f64(opt.best_metrics.objective),
                diag_pol.ma_threshold.to_string(),
                fmt_f64(diag_metrics.objective),
                fmt_f64(performance_gap(&diag_metrics, &opt.best_metrics)),
                fmt_f64(diag_kl),
                fmt_f64(rand_pol.f0()),
                fmt_f64(rand_pol.f1()),
                fmt_f64(rand_metrics.objective),
                fmt_f64(performance_gap(&rand_metrics, &opt.best_metrics)),
                fmt_f64(rand_kl),
                fmt_f64(opt_dist.occupancy_rate(ErrorKind::MissedAlarm)),
                fmt_f64(diag_dist.occupancy_rate(ErrorKind::MissedAlarm)),
                fmt_f64(rand_dist.occupancy_rate(ErrorKind::MissedAlarm)),
            ]
        })
        .collect();
    let mut table = Table::new(vec![
        axis.to_string(),
        "opt_ma_threshold".into(),
        "opt_fa_threshold".into(),
        "opt_avg_cost".into(),
        "opt_frequency".into(),
        "opt_objective".into(),
        "diag_threshold".into(),
        "diag_objective".into(),
        "diag_gap".into(),
        "diag_kl".into(),
        "rand_f0".into(),
        "rand_f1".into(),
        "rand_objective".into(),
        "rand_gap".into(),
        "rand_kl".into(),
        "opt_ma_occupancy".into(),
        "diag_ma_occupancy".into(),
        "rand_ma_occupancy".into(),
    ]);
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

struct Check {
    name: &'static str,
    deviation: f64,
    tolerance: f64,
}

impl Check {
    fn passes(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

/// Cost mass past age `n` in a randomized policy's stationary law.
fn randomized_tail_cost(m: &ModelParams, dist: &StationaryDistribution, n: u32) -> f64 {
    let branch = |kind: ErrorKind, weight: f64| {
        let tail = dist.tail(kind);
        weight * dist.error_mass(kind, n) * tail.ratio / (1.0 - tail.ratio).powi(2)
    };
    branch(ErrorKind::MissedAlarm, m.beta()) + branch(ErrorKind::FalseAlarm, 1.0 - m.beta())
}

fn crosscheck(cfg: &RunConfig) -> Result<Outcome, Error> {
    let m = &cfg.params;
    println!("model: {}", describe_params(m));
    let mut checks: Vec<Check> = Vec::new();

    // Reference switching policy: the given one, or the searched optimum.
    let pol = match cfg.policy {
        Some(pol) => pol,
        None => search_up_to(m, cfg.nmax.max(200)).best_policy,
    };
    println!("switching policy under test: {pol}");

    // 1. Closed-form switching masses against the linear solve.
    let mut n = pol.max_threshold() + 60;
    while truncation_gap(m, &pol, n)? >= 1e-12 {
        n += 60;
    }
    let oracle = solve_stationary(m, &pol.into(), n)?;
    let closed = switching_stationary(m, &pol);
    let folded = truncated_stationary(m, &pol, n)?;
    let mut worst = 0.0f64;
    for s in oracle.space().iter() {
        let expected = if s.age() == n {
            folded.mass(s)
        } else {
            closed.mass(s)
        };
        worst = worst.max((oracle.mass(s) - expected).abs());
    }
    checks.push(Check {
        name: "switching masses vs linear solve",
        deviation: worst,
        tolerance: 1e-8,
    });
    let weighted = oracle.metrics(m, &pol.into());
    let analytic = switching_metrics(m, &pol);
    checks.push(Check {
        name: "switching objective vs linear solve",
        deviation: (weighted.objective - analytic.objective).abs(),
        tolerance: 1e-8,
    });

    // 2. Closed-form randomized masses against the linear solve.
    let rates = cfg
        .rates
        .unwrap_or_else(|| RandomizedPolicy::new(0.5, 0.5).expect("valid rates"));
    let dist = randomized_stationary(m, &rates);
    let mut rn = 200u32;
    while randomized_tail_cost(m, &dist, rn) >= 1e-12 {
        rn += 100;
    }
    let oracle = solve_stationary(m, &rates.into(), rn)?;
    let mut worst = 0.0f64;
    for s in oracle.space().iter().filter(|s| s.age() < rn) {
        worst = worst.max((oracle.mass(s) - dist.mass(s)).abs());
    }
    checks.push(Check {
        name: "randomized masses vs linear solve",
        deviation: worst,
        tolerance: 1e-8,
    });
    let weighted = oracle.metrics(m, &rates.into());
    let analytic_rand = randomized_metrics(m, &rates);
    checks.push(Check {
        name: "randomized objective vs linear solve",
        deviation: (weighted.objective - analytic_rand.objective).abs(),
        tolerance: 1e-8,
    });

    // 3. Truncation identity: exact objective minus truncated equals the gap.
    let tn = pol.max_threshold() + 40;
    let truncated =
        switching_metrics_from_distribution(m, &pol, &truncated_stationary(m, &pol, tn)?);
    let gap = truncation_gap(m, &pol, tn)?;
    checks.push(Check {
        name: "truncation identity",
        deviation: (analytic.objective - truncated.objective - gap).abs(),
        tolerance: 1e-10,
    });

    // 4. Threshold search against value iteration.
    let search = search_up_to(m, cfg.nmax.max(100));
    let rvi_n = cfg.nmax.max(100) + 50;
    let solution = rvi_solve(&build_truncated_mdp(m, rvi_n)?, &RviOptions::default())?;
    let sigma = truncation_gap(m, &search.best_policy, rvi_n)?;
    checks.push(Check {
        name: "search objective vs value iteration",
        deviation: (search.best_metrics.objective - solution.value.average_cost).abs(),
        tolerance: 1e-6 + sigma,
    });
    let report = check_switching_structure(&solution.policy);
    let matches = report.as_switching_policy() == Some(search.best_policy);
    checks.push(Check {
        name: "value-iteration policy matches the search",
        deviation: if matches { 0.0 } else { 1.0 },
        tolerance: 0.5,
    });

    // 5. Simulation against the closed forms (tolerance: five standard errors).
    let sim_cfg = SimConfig {
        horizon: cfg.horizon,
        seed: cfg.seed,
        burn_in: cfg.burn_in,
    };
    let sim_report = simulate(m, &pol.into(), &sim_cfg)?;
    checks.push(Check {
        name: "simulated objective vs closed form",
        deviation: (sim_report.metrics.objective - analytic.objective).abs(),
        tolerance: 5.0 * sim_report.standard_errors.objective,
    });

    let mut all_pass = true;
    for check in &checks {
        let verdict = if check.passes() { "PASS" } else { "FAIL" };
        all_pass &= check.passes();
        println!(
            "CHECK {}: {verdict} (deviation {} , tolerance {})",
            check.name,
            fmt_f64(check.deviation),
            fmt_f64(check.tolerance)
        );
    }
    Ok(if all_pass {
        Outcome::Done
    } else {
        Outcome::ChecksFailed
    })
}

fn io_error(e: std::io::Error) -> Error {
    Error::InvalidConfig(format!("output error: {e}"))
}
