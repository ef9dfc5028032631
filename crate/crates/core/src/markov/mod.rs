//! MTTDL of the birth-death chain with an absorbing data-loss state.
//!
//! States `0..=K` count concurrently failed disks; `L` is data loss. From
//! state `i` the chain moves up at `(1 - alpha_i)(N - i)lambda`, is absorbed
//! at `alpha_i (N - i) lambda` and moves down at `i mu` (every failed disk is
//! repaired in parallel).
//!
//! Two independent routes compute the expected absorption time from state 0:
//!
//! * [`mttdl_laplace`] differentiates the Laplace transform of the loss
//!   density at `s = 0`, using the backward `beta` determinant recursion.
//! * [`mttdl_hitting_time`] solves the tridiagonal hitting-time system by
//!   direct elimination.

mod arith;
mod hitting;
mod laplace;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scheme::AlphaVector;

pub use hitting::mttdl_hitting_time;
pub use laplace::{
    beta_at_zero, laplace_parts, mttdl_laplace, mttdl_laplace_with, BetaPair, LaplaceOptions,
    LaplaceParts, Precision, ProductConvention,
};

pub const HOURS_PER_DAY: f64 = 24.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MarkovError {
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("degenerate chain: V(0) = 0")]
    Degenerate,
    #[error("non-finite intermediate in {stage} (K = {k})")]
    Conditioning { stage: &'static str, k: usize },
    #[error("quotient-rule numerator has the wrong sign ({value:e}); expected negative")]
    SignFlip { value: f64 },
    #[error("no path to the data-loss state: MTTDL is unbounded")]
    NoAbsorbingPath,
}

/// `(N, lambda, mu, alpha)` defining the chain. Rates are per hour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovChainSpec {
    total_disks: u64,
    failure_rate: f64,
    repair_rate: f64,
    alpha: AlphaVector,
}

impl MarkovChainSpec {
    pub fn new(
        total_disks: u64,
        failure_rate: f64,
        repair_rate: f64,
        alpha: AlphaVector,
    ) -> Result<Self, MarkovError> {
        if !(failure_rate > 0.0 && failure_rate.is_finite()) {
            return Err(MarkovError::InvalidChain(format!(
                "failure rate must be positive and finite, got {failure_rate}"
            )));
        }
        if !(repair_rate > 0.0 && repair_rate.is_finite()) {
            return Err(MarkovError::InvalidChain(format!(
                "repair rate must be positive and finite, got {repair_rate}"
            )));
        }
        if total_disks < alpha.k() as u64 + 1 {
            return Err(MarkovError::InvalidChain(format!(
                "N = {total_disks} disks cannot reach state K + 1 = {}",
                alpha.k() + 1
            )));
        }
        if total_disks >= 1 << 53 {
            return Err(MarkovError::InvalidChain("N exceeds 2^53".into()));
        }
        Ok(Self {
            total_disks,
            failure_rate,
            repair_rate,
            alpha,
        })
    }

    pub fn total_disks(&self) -> u64 {
        self.total_disks
    }

    pub fn failure_rate(&self) -> f64 {
        self.failure_rate
    }

    pub fn repair_rate(&self) -> f64 {
        self.repair_rate
    }

    pub fn alpha(&self) -> &AlphaVector {
        &self.alpha
    }

    pub fn k(&self) -> usize {
        self.alpha.k()
    }

    /// Same chain with another failure rate, e.g. after prediction.
    pub fn with_failure_rate(&self, failure_rate: f64) -> Result<Self, MarkovError> {
        Self::new(
            self.total_disks,
            failure_rate,
            self.repair_rate,
            self.alpha.clone(),
        )
    }

    /// `(up, loss, down)` transition rates out of state `i`.
    pub fn rates(&self, i: usize) -> (f64, f64, f64) {
        let a = self.alpha.get(i);
        let alive = (self.total_disks - i as u64) as f64 * self.failure_rate;
        let up = if i < self.k() { (1.0 - a) * alive } else { 0.0 };
        (up, a * alive, i as f64 * self.repair_rate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Laplace,
    HittingTime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub k: usize,
    pub alpha: Vec<f64>,
    pub precision: Precision,
    /// Bound on the relative error of `mttdl_hours`.
    pub relative_error_bound: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MttdlResult {
    pub mttdl_hours: f64,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl MttdlResult {
    pub fn mttdl_days(&self) -> f64 {
        self.mttdl_hours / HOURS_PER_DAY
    }
}

/// An MTTDL that may be unbounded (no failure ever reaches the chain).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mttdl {
    Hours(f64),
    Unbounded,
}

impl Mttdl {
    pub fn hours(self) -> Option<f64> {
        match self {
            Mttdl::Hours(h) => Some(h),
            Mttdl::Unbounded => None,
        }
    }

    pub fn days(self) -> Option<f64> {
        self.hours().map(|h| h / HOURS_PER_DAY)
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, Mttdl::Unbounded)
    }

    /// Hours, with `+inf` standing in for an unbounded value.
    pub fn hours_or_inf(self) -> f64 {
        self.hours().unwrap_or(f64::INFINITY)
    }

    pub fn days_or_inf(self) -> f64 {
        self.days().unwrap_or(f64::INFINITY)
    }
}

impl PartialOrd for Mttdl {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.hours_or_inf().partial_cmp(&other.hours_or_inf())
    }
}

/// MTTDL of `N` disks failing at `failure_rate` (possibly zero after
/// prediction), via the Laplace route.
pub fn farm_mttdl(
    total_disks: u64,
    failure_rate: f64,
    repair_rate: f64,
    alpha: &AlphaVector,
) -> Result<Mttdl, MarkovError> {
    if failure_rate == 0.0 {
        return Ok(Mttdl::Unbounded);
    }
    let chain = MarkovChainSpec::new(total_disks, failure_rate, repair_rate, alpha.clone())?;
    Ok(Mttdl::Hours(mttdl_laplace(&chain)?.mttdl_hours))
}
