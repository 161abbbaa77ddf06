//! Flag, preset, and config-file resolution.
//!
//! Precedence, lowest to highest: built-in defaults, preset values, config
//! file entries, explicit command-line flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::Parser;
use remest_core::{ModelParams, RandomizedPolicy, SwitchingPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Evaluate,
    Search,
    Rvi,
    Sweep,
    Crosscheck,
    Simulate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Axis {
    Lambda,
    Beta,
    Q,
    Thresholds,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Axis::Lambda => "lambda",
            Axis::Beta => "beta",
            Axis::Q => "q",
            Axis::Thresholds => "thresholds",
        };
        f.write_str(name)
    }
}

/// A `start:stop:step` range, inclusive of both ends up to rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>, String> {
        if self.step.is_nan() || self.step <= 0.0 || self.stop < self.start {
            return Err(format!(
                "invalid grid {}:{}:{}; need start <= stop and step > 0",
                self.start, self.stop, self.step
            ));
        }
        let count = ((self.stop - self.start) / self.step + 1.0 + 1e-9).floor() as usize;
        if count > GRID_CAP {
            return Err(format!(
                "grid holds {count} points, above the cap of {GRID_CAP}"
            ));
        }
        Ok((0..count)
            .map(|i| self.start + i as f64 * self.step)
            .collect())
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected start:stop:step, got '{s}'"));
        }
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad grid number '{v}': {e}"))
        };
        Ok(GridSpec {
            start: parse(parts[0])?,
            stop: parse(parts[1])?,
            step: parse(parts[2])?,
        })
    }
}

/// Hard cap on the number of sweep rows.
pub const GRID_CAP: usize = 100_000;

fn parse_pair_u32(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected A,B, got '{s}'"))?;
    Ok((
        a.trim()
            .parse()
            .map_err(|e| format!("bad threshold '{a}': {e}"))?,
        b.trim()
            .parse()
            .map_err(|e| format!("bad threshold '{b}': {e}"))?,
    ))
}

fn parse_pair_f64(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected A,B, got '{s}'"))?;
    Ok((
        a.trim()
            .parse()
            .map_err(|e| format!("bad rate '{a}': {e}"))?,
        b.trim()
            .parse()
            .map_err(|e| format!("bad rate '{b}': {e}"))?,
    ))
}

/// Computes optimal transmission policies for remote estimation of a
/// two-state Markov source over an unreliable channel.
#[derive(Debug, Parser, Default, Clone)]
#[command(name = "remest", version, disable_help_flag = false)]
pub struct Cli {
    /// What to run: evaluate | search | rvi | sweep | crosscheck | simulate.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,

    /// Bundled experiment: fig5a | fig5b | fig5c | fig6 | fig7.
    #[arg(long)]
    pub preset: Option<String>,

    /// Optional key = value config file; explicit flags win over it.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Probability the source moves normal -> alarm.
    #[arg(long)]
    pub p: Option<f64>,

    /// Probability the source moves alarm -> normal.
    #[arg(long)]
    pub q: Option<f64>,

    /// Channel success probability.
    #[arg(long)]
    pub ps: Option<f64>,

    /// Missed-alarm significance weight in [0, 1].
    #[arg(long)]
    pub beta: Option<f64>,

    /// Communication cost per transmission.
    #[arg(long)]
    pub lambda: Option<f64>,

    /// Switching-policy thresholds "MA,FA" (0 = transmit in the synced state).
    #[arg(long, value_parser = parse_pair_u32)]
    pub policy: Option<(u32, u32)>,

    /// Age-agnostic transmission rates "f0,f1" in (0, 1].
    #[arg(long, value_parser = parse_pair_f64)]
    pub rates: Option<(f64, f64)>,

    /// Truncation-gap target for the search mode.
    #[arg(long)]
    pub epsilon: Option<f64>,

    /// Truncation / threshold-grid bound (search cap, rvi and sweep size).
    #[arg(long)]
    pub nmax: Option<u32>,

    /// Simulation length in slots.
    #[arg(long)]
    pub horizon: Option<u64>,

    /// RNG seed for simulations.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Slots discarded before accumulating simulation metrics.
    #[arg(long = "burn-in")]
    pub burn_in: Option<u64>,

    /// Sweep axis: lambda | beta | q | thresholds.
    #[arg(long, value_enum)]
    pub axis: Option<Axis>,

    /// Sweep grid as start:stop:step (parameter axes).
    #[arg(long)]
    pub grid: Option<GridSpec>,

    /// Threshold-grid bound for `--axis thresholds`.
    #[arg(long = "grid-max")]
    pub grid_max: Option<u32>,

    /// CSV output path; some modes write CSV to stdout without it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Cli {
    /// Folds `other`'s values in wherever `self` has none.
    fn fill_from(&mut self, other: Cli) {
        macro_rules! fill {
            ($($field:ident),*) => {
                $(if self.$field.is_none() { self.$field = other.$field; })*
            };
        }
        fill!(
            mode, preset, p, q, ps, beta, lambda, policy, rates, epsilon, nmax, horizon, seed,
            burn_in, axis, grid, grid_max, out
        );
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub params: ModelParams,
    pub policy: Option<SwitchingPolicy>,
    pub rates: Option<RandomizedPolicy>,
    /// Truncation-gap target; when absent the search scans the full
    /// `nmax` threshold grid directly.
    pub epsilon: Option<f64>,
    pub nmax: u32,
    pub horizon: u64,
    pub seed: u64,
    pub burn_in: u64,
    pub axis: Axis,
    pub grid: Option<GridSpec>,
    pub grid_max: u32,
    pub out: Option<PathBuf>,
}

fn preset(name: &str) -> Result<Cli, String> {
    let mut cli = Cli::default();
    match name {
        "fig5a" | "fig5b" | "fig5c" => {
            cli.mode = Some(Mode::Sweep);
            cli.axis = Some(Axis::Thresholds);
            cli.grid_max = Some(30);
            cli.ps = Some(0.9);
            cli.lambda = Some(8.0);
            match name {
                "fig5a" => {
                    cli.p = Some(0.2);
                    cli.q = Some(0.3);
                    cli.beta = Some(0.8);
                }
                "fig5b" => {
                    cli.p = Some(0.25);
                    cli.q = Some(0.25);
                    cli.beta = Some(0.5);
                }
                _ => {
                    cli.p = Some(0.25);
                    cli.q = Some(0.25);
                    cli.beta = Some(0.8);
                }
            }
        }
        "fig6" => {
            cli.mode = Some(Mode::Sweep);
            cli.axis = Some(Axis::Beta);
            cli.grid = Some(GridSpec {
                start: 0.05,
                stop: 0.95,
                step: 0.05,
            });
            cli.p = Some(0.25);
            cli.q = Some(0.25);
            cli.ps = Some(0.9);
            cli.beta = Some(0.5);
            cli.lambda = Some(1.0);
            cli.nmax = Some(100);
        }
        "fig7" => {
            cli.mode = Some(Mode::Sweep);
            cli.axis = Some(Axis::Lambda);
            cli.grid = Some(GridSpec {
                start: 0.01,
                stop: 0.4,
                step: 0.01,
            });
            cli.p = Some(0.2);
            cli.q = Some(0.25);
            cli.ps = Some(0.9);
            cli.beta = Some(0.5);
            cli.lambda = Some(0.1);
            cli.nmax = Some(100);
        }
        other => return Err(format!("unknown preset '{other}'")),
    }
    Ok(cli)
}

/// Parses a `key = value` config file into the same shape as the flags.
fn parse_config_file(path: &PathBuf) -> Result<Cli, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut cli = Cli::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value", lineno + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let err = |e: String| format!("line {}: {e}", lineno + 1);
        match key {
            "mode" => {
                cli.mode = Some(match value {
                    "evaluate" => Mode::Evaluate,
                    "search" => Mode::Search,
                    "rvi" => Mode::Rvi,
                    "sweep" => Mode::Sweep,
                    "crosscheck" => Mode::Crosscheck,
                    "simulate" => Mode::Simulate,
                    other => return Err(err(format!("unknown mode '{other}'"))),
                })
            }
            "preset" => cli.preset = Some(value.to_string()),
            "p" => cli.p = Some(value.parse().map_err(|e| err(format!("{e}")))?),
            "q" => cli.q = Some(value.parse().map_err(|e| err(format!("{e}")))?),
            "ps" => cli.ps = Some(value.parse().map_err(|e| err(format!("{e}")))?),
            "beta" => cli.beta = Some(value.parse().map_err(|e| err(format!("{e}")))?),
            "lambda" => cli.lambda = Some(value.parse().map_err(|e| err(format!("{e}")))?),
            "policy" => cli.policy = Some(parse_pair_u32(value).map_err(err)?),
            "rates" => cli.rates = Some(parse_pair_f64(value).map_err(err)?),
            "epsilon" => cli.epsilon = Some(value.parse().map_err(|e| err(format!("{e}")))?),
            "nmax" => cli.nmax = Some(value.parse().map_err(|e| err(format!("{e}")))?),
            "horizon" => cli.horizon = Some(value.parse().map_err(|e| err(format!("{e}")))?),
            "seed" => cli.seed = Some(value.parse().map_err(|e| err(format!("{e}")))?),
            "burn_in" => cli.burn_in = Some(value.parse().map_err(|e| err(format!("{e}")))?),
            "axis" => {
                cli.axis = Some(match value {
                    "lambda" => Axis::Lambda,
                    "beta" => Axis::Beta,
                    "q" => Axis::Q,
                    "thresholds" => Axis::Thresholds,
                    other => return Err(err(format!("unknown axis '{other}'"))),
                })
            }
            "grid" => cli.grid = Some(value.parse().map_err(err)?),
            "grid_max" => cli.grid_max = Some(value.parse().map_err(|e| err(format!("{e}")))?),
            "out" => cli.out = Some(PathBuf::from(value)),
            other => return Err(err(format!("unknown config key '{other}'"))),
        }
    }
    Ok(cli)
}

/// Resolves flags, config file, and preset into a runnable configuration.
pub fn resolve(mut cli: Cli) -> Result<RunConfig, String> {
    if let Some(path) = cli.config.clone() {
        cli.fill_from(parse_config_file(&path)?);
    }
    if let Some(name) = cli.preset.clone() {
        cli.fill_from(preset(&name)?);
    }

    let mode = cli.mode.ok_or("no mode given; use --mode or --preset")?;
    let need = |name: &str, v: Option<f64>| v.ok_or(format!("missing parameter --{name}"));
    let params = ModelParams::new(
        need("p", cli.p)?,
        need("q", cli.q)?,
        need("ps", cli.ps)?,
        need("beta", cli.beta)?,
        need("lambda", cli.lambda)?,
    )
    .map_err(|e| e.to_string())?;

    let policy = cli.policy.map(|(ma, fa)| SwitchingPolicy::new(ma, fa));
    let rates = match cli.rates {
        Some((f0, f1)) => Some(RandomizedPolicy::new(f0, f1).map_err(|e| e.to_string())?),
        None => None,
    };

    Ok(RunConfig {
        mode,
        params,
        policy,
        rates,
        epsilon: cli.epsilon,
        nmax: cli.nmax.unwrap_or(match mode {
            Mode::Search => 500,
            _ => 100,
        }),
        horizon: cli.horizon.unwrap_or(1_000_000),
        seed: cli.seed.unwrap_or(1),
        burn_in: cli.burn_in.unwrap_or(10_000),
        axis: cli.axis.unwrap_or(Axis::Thresholds),
        grid: cli.grid,
        grid_max: cli.grid_max.unwrap_or(30),
        out: cli.out,
    })
}
