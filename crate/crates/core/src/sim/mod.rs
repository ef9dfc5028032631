//! Monte Carlo estimates of time to data loss.
//!
//! [`simulate_chain`] races the exponential clocks of a [`MarkovChainSpec`]
//! directly and is a stochastic check on the analytic routes.
//! [`simulate_farm`] tracks every disk of a farm through an event queue, so
//! it also handles non-exponential lifetimes, where no chain exists.
//!
//! Every trial draws from its own ChaCha stream, selected by trial index
//! under the master seed, and results are aggregated in trial order. The
//! output is therefore a pure function of the inputs regardless of how rayon
//! schedules the trials.

mod lifetime;
mod stats;

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::markov::MarkovChainSpec;
use crate::scheme::ProtectionScheme;

pub use lifetime::LifetimeDistribution;
pub use stats::{summarize, Summary, TrialOutcome};

/// Censored fraction above which an estimate is flagged unreliable.
pub const MAX_RELIABLE_CENSORING: f64 = 0.01;
/// Per-trial event cap used when none is given.
pub const DEFAULT_EVENT_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulation input: {0}")]
    InvalidSpec(String),
    #[error("no samples")]
    NoSamples,
    #[error("all {trials} trials were censored")]
    AllCensored { trials: u64 },
    #[error("only {completed} uncensored trial(s); at least 2 are needed for an interval")]
    TooFewSamples { completed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    pub trials: u64,
    pub event_cap: u64,
}

impl SimConfig {
    pub fn new(seed: u64, trials: u64) -> Self {
        Self {
            seed,
            trials,
            event_cap: DEFAULT_EVENT_CAP,
        }
    }

    pub fn with_event_cap(mut self, event_cap: u64) -> Self {
        self.event_cap = event_cap;
        self
    }

    fn validate(&self) -> Result<(), SimError> {
        if self.trials == 0 {
            return Err(SimError::InvalidSpec(
                "at least one trial is required".into(),
            ));
        }
        if self.event_cap == 0 {
            return Err(SimError::InvalidSpec("event cap must be positive".into()));
        }
        Ok(())
    }

    fn trial_rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        rng
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub seed: u64,
    pub trials: u64,
    pub event_cap: u64,
    pub censored: u64,
    /// `None` when every trial was censored: no loss was ever observed and
    /// the estimate is unbounded.
    pub summary: Option<Summary>,
    /// Censoring above [`MAX_RELIABLE_CENSORING`] biases the mean low.
    pub unreliable: bool,
}

impl SimResult {
    fn from_outcomes(config: &SimConfig, outcomes: &[TrialOutcome]) -> Result<Self, SimError> {
        let censored = outcomes
            .iter()
            .filter(|o| matches!(o, TrialOutcome::Censored))
            .count();
        let summary = match summarize(outcomes) {
            Ok(s) => Some(s),
            Err(SimError::AllCensored { .. }) => None,
            Err(e) => return Err(e),
        };
        let fraction = censored as f64 / outcomes.len() as f64;
        Ok(Self {
            seed: config.seed,
            trials: config.trials,
            event_cap: config.event_cap,
            censored: censored as u64,
            unreliable: summary.is_some() && fraction > MAX_RELIABLE_CENSORING,
            summary,
        })
    }

    pub fn is_unbounded(&self) -> bool {
        self.summary.is_none()
    }

    pub fn mean_ttdl_hours(&self) -> Option<f64> {
        self.summary.map(|s| s.mean)
    }
}

fn run_trials<F>(config: &SimConfig, trial: F) -> Result<SimResult, SimError>
where
    F: Fn(&mut ChaCha8Rng) -> TrialOutcome + Sync,
{
    config.validate()?;
    let outcomes: Vec<TrialOutcome> = (0..config.trials)
        .into_par_iter()
        .map(|i| trial(&mut config.trial_rng(i)))
        .collect();
    SimResult::from_outcomes(config, &outcomes)
}

/// Event simulation of the chain itself, from state 0 until absorption.
pub fn simulate_chain(chain: &MarkovChainSpec, config: SimConfig) -> Result<SimResult, SimError> {
    let rates: Vec<(f64, f64, f64)> = (0..=chain.k()).map(|i| chain.rates(i)).collect();
    let cap = config.event_cap;
    run_trials(&config, |rng| {
        let (mut state, mut t) = (0usize, 0.0f64);
        for _ in 0..cap {
            let (up, loss, down) = rates[state];
            let total = up + loss + down;
            if total == 0.0 {
                break;
            }
            let hold: f64 = Exp1.sample(rng);
            t += hold / total;
            let pick = rng.random::<f64>() * total;
            let to_down = down > 0.0 && pick >= up + loss;
            let to_loss = !to_down && loss > 0.0 && pick >= up;
            if to_loss {
                return TrialOutcome::Loss(t);
            } else if to_down {
                state -= 1;
            } else {
                state += 1;
            }
        }
        TrialOutcome::Censored
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepairMode {
    /// Exponential repair with the given mean, matching the chain.
    #[default]
    Exponential,
    /// Every repair takes exactly the mean. Sensitivity runs only.
    Fixed,
}

/// A farm to simulate disk by disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskFarmSpec {
    pub scheme: ProtectionScheme,
    pub lifetime: LifetimeDistribution,
    pub repair_mean_hours: f64,
    /// Fraction of failures predicted and replaced before they happen.
    pub tpr: f64,
    #[serde(default)]
    pub repair: RepairMode,
}

impl DiskFarmSpec {
    pub fn new(
        scheme: ProtectionScheme,
        lifetime: LifetimeDistribution,
        repair_mean_hours: f64,
        tpr: f64,
    ) -> Result<Self, SimError> {
        let spec = Self {
            scheme,
            lifetime,
            repair_mean_hours,
            tpr,
            repair: RepairMode::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_repair_mode(mut self, repair: RepairMode) -> Self {
        self.repair = repair;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.lifetime.validate()?;
        if !(self.repair_mean_hours > 0.0 && self.repair_mean_hours.is_finite()) {
            return Err(SimError::InvalidSpec(format!(
                "repair mean must be positive, got {}",
                self.repair_mean_hours
            )));
        }
        if !(0.0..=1.0).contains(&self.tpr) {
            return Err(SimError::InvalidSpec(format!(
                "tpr {} is not a probability",
                self.tpr
            )));
        }
        if self.scheme.total_disks() > u32::MAX as u64 {
            return Err(SimError::InvalidSpec("farm too large to simulate".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum EventKind {
    Failure,
    RepairDone,
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    disk: u32,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.disk.cmp(&other.disk))
            .then(self.kind.cmp(&other.kind))
    }
}

/// Per-disk discrete-event simulation until some array holds more than `m`
/// concurrently failed disks.
///
/// Each disk carries exactly one pending event. A failure is intercepted
/// with probability `tpr` (the disk is swapped for a new one on the spot);
/// otherwise the array degrades until its repair completes, at which point a
/// new disk with a fresh lifetime takes the slot.
pub fn simulate_farm(farm: &DiskFarmSpec, config: SimConfig) -> Result<SimResult, SimError> {
    farm.validate()?;
    let sampler = farm.lifetime.sampler()?;
    let per_array = farm.scheme.disks_per_array() as u32;
    let total = farm.scheme.total_disks() as u32;
    let tolerance = farm.scheme.fault_tolerance() as u32;
    let arrays = farm.scheme.array_count() as usize;
    let (tpr, mean_repair, mode) = (farm.tpr, farm.repair_mean_hours, farm.repair);
    let cap = config.event_cap;

    run_trials(&config, |rng| {
        let mut queue = BinaryHeap::with_capacity(total as usize);
        for disk in 0..total {
            let time = sampler.sample(rng);
            queue.push(Reverse(Event {
                time,
                disk,
                kind: EventKind::Failure,
            }));
        }
        let mut failed = vec![0u32; arrays];
        for _ in 0..cap {
            let Some(Reverse(event)) = queue.pop() else {
                break;
            };
            let array = (event.disk / per_array) as usize;
            let next = match event.kind {
                EventKind::Failure => {
                    if tpr > 0.0 && (tpr >= 1.0 || rng.random::<f64>() < tpr) {
                        Event {
                            time: event.time + sampler.sample(rng),
                            ..event
                        }
                    } else {
                        failed[array] += 1;
                        if failed[array] > tolerance {
                            return TrialOutcome::Loss(event.time);
                        }
                        let repair = match mode {
                            RepairMode::Exponential => {
                                let draw: f64 = Exp1.sample(rng);
                                draw * mean_repair
                            }
                            RepairMode::Fixed => mean_repair,
                        };
                        Event {
                            time: event.time + repair,
                            kind: EventKind::RepairDone,
                            ..event
                        }
                    }
                }
                EventKind::RepairDone => {
                    failed[array] -= 1;
                    Event {
                        time: event.time + sampler.sample(rng),
                        kind: EventKind::Failure,
                        ..event
                    }
                }
            };
            queue.push(Reverse(next));
        }
        TrialOutcome::Censored
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::mttdl_hitting_time;
    use crate::scheme::{AlphaVector, ProtectionScheme};

    fn k1_chain(n: u64, lambda: f64, mu: f64) -> MarkovChainSpec {
        MarkovChainSpec::new(n, lambda, mu, AlphaVector::new(vec![1.0]).unwrap()).unwrap()
    }

    #[test]
    fn chain_k1_against_closed_form() {
        let (n, lambda, mu) = (6u64, 0.1, 0.5);
        let r = simulate_chain(&k1_chain(n, lambda, mu), SimConfig::new(11, 10_000)).unwrap();
        let s = r.summary.unwrap();
        let nf = n as f64;
        let want = ((2.0 * nf - 1.0) * lambda + mu) / (nf * (nf - 1.0) * lambda * lambda);
        assert!(
            (s.mean - want).abs() < 3.0 * s.std_error,
            "{} vs {want}",
            s.mean
        );
        assert_eq!(r.censored, 0);
    }

    #[test]
    fn chain_erlang_without_repair() {
        let lambda = 2.0;
        let r = simulate_chain(&k1_chain(2, lambda, 1e-12), SimConfig::new(3, 10_000)).unwrap();
        let s = r.summary.unwrap();
        let want = 1.0 / (2.0 * lambda) + 1.0 / lambda;
        assert!((s.mean - want).abs() < 3.0 * s.std_error);
    }

    #[test]
    fn chain_is_deterministic() {
        let chain = k1_chain(10, 0.01, 0.3);
        let a = simulate_chain(&chain, SimConfig::new(99, 2_000)).unwrap();
        let b = simulate_chain(&chain, SimConfig::new(99, 2_000)).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            a.summary.unwrap().mean.to_bits(),
            b.summary.unwrap().mean.to_bits()
        );
        let c = simulate_chain(&chain, SimConfig::new(100, 2_000)).unwrap();
        assert_ne!(a.summary.unwrap().mean, c.summary.unwrap().mean);
    }

    #[test]
    fn chain_result_independent_of_thread_count() {
        let chain = k1_chain(10, 0.01, 0.3);
        let config = SimConfig::new(5, 3_000);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let a = single.install(|| simulate_chain(&chain, config)).unwrap();
        let b = simulate_chain(&chain, config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn event_cap_censors() {
        let chain = k1_chain(10, 1e-3, 10.0);
        let r = simulate_chain(&chain, SimConfig::new(1, 100).with_event_cap(2)).unwrap();
        assert!(r.censored > 0);
        assert!(r.unreliable || r.summary.is_none());
    }

    fn exp_farm(n: u64, m: u64, mttf: f64, mttr: f64, tpr: f64) -> DiskFarmSpec {
        DiskFarmSpec::new(
            ProtectionScheme::new(n, m, 1).unwrap(),
            LifetimeDistribution::Exponential { rate: 1.0 / mttf },
            mttr,
            tpr,
        )
        .unwrap()
    }

    #[test]
    fn farm_matches_chain_for_exponential_single_array() {
        // small, fast-failing array so trials stay short
        let farm = exp_farm(4, 1, 100.0, 5.0, 0.0);
        let chain = MarkovChainSpec::new(5, 1.0 / 100.0, 1.0 / 5.0, farm.scheme.alpha()).unwrap();
        let analytic = mttdl_hitting_time(&chain).unwrap().mttdl_hours;
        let f = simulate_farm(&farm, SimConfig::new(21, 4_000))
            .unwrap()
            .summary
            .unwrap();
        let c = simulate_chain(&chain, SimConfig::new(22, 4_000))
            .unwrap()
            .summary
            .unwrap();
        assert!(f.ci95.0 <= c.ci95.1 && c.ci95.0 <= f.ci95.1);
        assert!((f.mean - analytic).abs() < 3.0 * f.std_error);
    }

    #[test]
    fn full_interception_never_loses_data() {
        let farm = exp_farm(4, 1, 100.0, 5.0, 1.0);
        let r = simulate_farm(&farm, SimConfig::new(1, 20).with_event_cap(10_000)).unwrap();
        assert_eq!(r.censored, 20);
        assert!(r.is_unbounded());
    }

    #[test]
    fn interception_never_hurts() {
        let config = SimConfig::new(8, 2_000);
        let mut prev = 0.0;
        for tpr in [0.0, 0.3, 0.6] {
            let mean = simulate_farm(&exp_farm(4, 1, 100.0, 5.0, tpr), config)
                .unwrap()
                .mean_ttdl_hours()
                .unwrap();
            assert!(mean > prev);
            prev = mean;
        }
    }

    #[test]
    fn weibull_shape_one_is_exponential() {
        let scheme = ProtectionScheme::new(4, 1, 1).unwrap();
        let w = DiskFarmSpec::new(
            scheme,
            LifetimeDistribution::Weibull {
                scale: 100.0,
                shape: 1.0,
            },
            5.0,
            0.0,
        )
        .unwrap();
        let a = simulate_farm(&w, SimConfig::new(31, 4_000))
            .unwrap()
            .summary
            .unwrap();
        let b = simulate_farm(&exp_farm(4, 1, 100.0, 5.0, 0.0), SimConfig::new(32, 4_000))
            .unwrap()
            .summary
            .unwrap();
        assert!(a.ci95.0 <= b.ci95.1 && b.ci95.0 <= a.ci95.1);
    }

    #[test]
    fn fixed_repair_mode_runs() {
        let farm = exp_farm(4, 1, 100.0, 5.0, 0.0).with_repair_mode(RepairMode::Fixed);
        let r = simulate_farm(&farm, SimConfig::new(4, 500)).unwrap();
        assert!(r.summary.unwrap().mean > 0.0);
    }

    #[test]
    fn invalid_inputs() {
        let scheme = ProtectionScheme::new(4, 1, 1).unwrap();
        let exp = LifetimeDistribution::Exponential { rate: 1.0 };
        assert!(DiskFarmSpec::new(scheme, exp, 0.0, 0.0).is_err());
        assert!(DiskFarmSpec::new(scheme, exp, 1.0, 1.5).is_err());
        let bad = LifetimeDistribution::Weibull {
            scale: 1.0,
            shape: -2.0,
        };
        assert!(DiskFarmSpec::new(scheme, bad, 1.0, 0.0).is_err());
        let farm = exp_farm(4, 1, 100.0, 5.0, 0.0);
        assert!(simulate_farm(&farm, SimConfig::new(1, 0)).is_err());
    }
}
