//! Failure-prediction quality and what it buys.
//!
//! The ROC family is `TPR^p + (1 - FPR)^p = 1` with `p >= 1`: `p = 1` is a
//! coin flip and `p -> inf` the ideal predictor. Intercepted failures scale
//! the failure rate by `1 - TPR`; false alarms replace healthy disks at a
//! cost linear in FPR.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::markov::{mttdl_laplace, MarkovChainSpec, MarkovError, Mttdl};

/// Absolute error target for AUC quadrature.
pub const AUC_TOLERANCE: f64 = 1e-8;
/// `|auc(p_for_auc(x)) - x|` target.
pub const AUC_INVERSION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PredictionError {
    #[error("ROC shape p must be finite and >= 1, got {0}")]
    InvalidShape(f64),
    #[error("AUC target {0} outside [0.5, 1)")]
    AucDomain(f64),
    #[error("{name} = {value} is not a probability")]
    NotProbability { name: &'static str, value: f64 },
    #[error("invalid cost model: {0}")]
    InvalidCost(String),
    #[error("budget must be non-negative and finite, got {0}")]
    InvalidBudget(f64),
    #[error(transparent)]
    Markov(#[from] MarkovError),
}

fn check_probability(name: &'static str, value: f64) -> Result<f64, PredictionError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(PredictionError::NotProbability { name, value })
    }
}

/// Parametric ROC curve `TPR^p + (1 - FPR)^p = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocModel {
    p: f64,
}

impl RocModel {
    pub fn new(p: f64) -> Result<Self, PredictionError> {
        if p.is_finite() && p >= 1.0 {
            Ok(Self { p })
        } else {
            Err(PredictionError::InvalidShape(p))
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn tpr_for_fpr(&self, fpr: f64) -> Result<f64, PredictionError> {
        tpr_for_fpr(self, fpr)
    }

    pub fn auc(&self) -> f64 {
        auc(self)
    }
}

/// Either side of the `p <-> AUC` correspondence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RocSelector {
    P(f64),
    Auc(f64),
}

impl RocSelector {
    pub fn model(self) -> Result<RocModel, PredictionError> {
        match self {
            RocSelector::P(p) => RocModel::new(p),
            RocSelector::Auc(a) => p_for_auc(a),
        }
    }
}

/// `(1 - (1 - fpr)^p)^(1/p)`.
pub fn tpr_for_fpr(model: &RocModel, fpr: f64) -> Result<f64, PredictionError> {
    let fpr = check_probability("fpr", fpr)?;
    let p = model.p;
    if p == 1.0 {
        return Ok(fpr);
    }
    // 1 - (1 - fpr)^p without cancellation for small fpr
    let complement = -(p * (-fpr).ln_1p()).exp_m1();
    Ok(complement.powf(1.0 / p).clamp(0.0, 1.0))
}

/// Area under the ROC curve.
///
/// With `x = 1 - FPR` the curve is the quadrant `x^p + y^p <= 1`, symmetric
/// about the diagonal, which it crosses at `c = 2^(-1/p)`. The area is twice
/// the strip `0 <= x <= c` minus the `c x c` square the two strips share;
/// on that strip the integrand has no endpoint singularity.
pub fn auc(model: &RocModel) -> f64 {
    let p = model.p;
    if p == 1.0 {
        return 0.5;
    }
    let c = (-std::f64::consts::LN_2 / p).exp();
    let height = |x: f64| {
        if x <= 0.0 {
            return 1.0;
        }
        let xp = (p * x.ln()).exp();
        ((-xp).ln_1p() / p).exp()
    };
    let strip = quadrature::double_exponential::integrate(height, 0.0, c, AUC_TOLERANCE / 8.0);
    (2.0 * strip.integral - c * c).clamp(0.5, 1.0)
}

/// Inverts [`auc`] by bisection on `ln p`.
pub fn p_for_auc(target: f64) -> Result<RocModel, PredictionError> {
    if !(0.5..1.0).contains(&target) {
        return Err(PredictionError::AucDomain(target));
    }
    if target == 0.5 {
        return RocModel::new(1.0);
    }
    let area = |log_p: f64| auc(&RocModel { p: log_p.exp() });
    let (mut lo, mut hi) = (0.0f64, std::f64::consts::LN_2);
    while area(hi) < target {
        lo = hi;
        hi *= 2.0;
        if hi > 700.0 {
            return Err(PredictionError::AucDomain(target));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let a = area(mid);
        if (a - target).abs() <= AUC_INVERSION_TOLERANCE * 1e-3 {
            return RocModel::new(mid.exp());
        }
        if a < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    RocModel::new((0.5 * (lo + hi)).exp())
}

/// `lambda (1 - tpr)`.
pub fn effective_failure_rate(failure_rate: f64, tpr: f64) -> Result<f64, PredictionError> {
    let tpr = check_probability("tpr", tpr)?;
    if failure_rate.is_nan() || failure_rate < 0.0 {
        return Err(PredictionError::InvalidCost(format!(
            "failure rate must be non-negative, got {failure_rate}"
        )));
    }
    if tpr == 1.0 {
        return Ok(0.0);
    }
    Ok(failure_rate * (1.0 - tpr))
}

/// Replacement-cost parameters. Times are in replacement-window units: `T`
/// is the service life in windows and `lambda` the failure rate per window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    replacement_cost: f64,
    disk_lifetime: f64,
    total_disks: u64,
    failure_rate: f64,
}

impl CostModel {
    pub fn new(
        replacement_cost: f64,
        disk_lifetime: f64,
        total_disks: u64,
        failure_rate: f64,
    ) -> Result<Self, PredictionError> {
        if !(replacement_cost > 0.0 && replacement_cost.is_finite()) {
            return Err(PredictionError::InvalidCost(format!(
                "replacement cost must be positive, got {replacement_cost}"
            )));
        }
        if !(disk_lifetime > 0.0 && disk_lifetime.is_finite()) {
            return Err(PredictionError::InvalidCost(format!(
                "disk lifetime must be positive, got {disk_lifetime}"
            )));
        }
        if total_disks == 0 {
            return Err(PredictionError::InvalidCost(
                "at least one disk required".into(),
            ));
        }
        if !(failure_rate >= 0.0 && failure_rate.is_finite()) {
            return Err(PredictionError::InvalidCost(format!(
                "failure rate must be non-negative, got {failure_rate}"
            )));
        }
        let model = Self {
            replacement_cost,
            disk_lifetime,
            total_disks,
            failure_rate,
        };
        if model.non_failing_disks() <= 0.0 {
            return Err(PredictionError::InvalidCost(
                "more disks fail per window than exist; shorten the window".into(),
            ));
        }
        Ok(model)
    }

    /// Builds the window-unit model from hour-denominated inputs.
    pub fn from_hours(
        replacement_cost: f64,
        lifetime_hours: f64,
        total_disks: u64,
        mttf_hours: f64,
        window_hours: f64,
    ) -> Result<Self, PredictionError> {
        if !(window_hours > 0.0 && window_hours.is_finite()) {
            return Err(PredictionError::InvalidCost(format!(
                "replacement window must be positive, got {window_hours}"
            )));
        }
        if mttf_hours.is_nan() || mttf_hours <= 0.0 {
            return Err(PredictionError::InvalidCost(format!(
                "MTTF must be positive, got {mttf_hours}"
            )));
        }
        Self::new(
            replacement_cost,
            lifetime_hours / window_hours,
            total_disks,
            window_hours / mttf_hours,
        )
    }

    pub fn replacement_cost(&self) -> f64 {
        self.replacement_cost
    }

    pub fn disk_lifetime(&self) -> f64 {
        self.disk_lifetime
    }

    pub fn total_disks(&self) -> u64 {
        self.total_disks
    }

    pub fn failure_rate(&self) -> f64 {
        self.failure_rate
    }

    /// Disks failing per window: `(N / T)(1 - e^(-lambda T))`.
    pub fn failing_disks(&self) -> f64 {
        let n = self.total_disks as f64;
        n / self.disk_lifetime * -(-self.failure_rate * self.disk_lifetime).exp_m1()
    }

    /// Healthy disks at any instant: `N - (N / T)(1 - e^(-lambda T))`.
    pub fn non_failing_disks(&self) -> f64 {
        self.total_disks as f64 - self.failing_disks()
    }

    /// Cost per unit of FPR.
    pub fn slope(&self) -> f64 {
        self.replacement_cost * self.non_failing_disks()
    }

    /// FPR that a per-window budget pays for, clamped to `[0, 1]`.
    pub fn fpr_for_budget(&self, budget: f64) -> Result<f64, PredictionError> {
        if !(budget >= 0.0 && budget.is_finite()) {
            return Err(PredictionError::InvalidBudget(budget));
        }
        Ok((budget / self.slope()).clamp(0.0, 1.0))
    }
}

/// `c * fpr * [N - (N / T)(1 - e^(-lambda T))]` per window.
pub fn false_replacement_cost(model: &CostModel, fpr: f64) -> Result<f64, PredictionError> {
    let fpr = check_probability("fpr", fpr)?;
    Ok(fpr * model.slope())
}

/// Operating point reached by spending a budget on false replacements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoupledOutcome {
    pub p: f64,
    pub fpr: f64,
    pub tpr: f64,
    pub failure_rate: f64,
    pub mttdl: Mttdl,
}

/// Budget -> FPR -> TPR -> `lambda (1 - TPR)` -> MTTDL.
pub fn roc_coupled_mttdl(
    roc: RocSelector,
    budget: f64,
    cost_model: &CostModel,
    base_chain: &MarkovChainSpec,
) -> Result<CoupledOutcome, PredictionError> {
    let model = roc.model()?;
    let fpr = cost_model.fpr_for_budget(budget)?;
    let tpr = tpr_for_fpr(&model, fpr)?;
    let failure_rate = effective_failure_rate(base_chain.failure_rate(), tpr)?;
    let mttdl = if failure_rate == 0.0 {
        Mttdl::Unbounded
    } else {
        Mttdl::Hours(mttdl_laplace(&base_chain.with_failure_rate(failure_rate)?)?.mttdl_hours)
    };
    Ok(CoupledOutcome {
        p: model.p,
        fpr,
        tpr,
        failure_rate,
        mttdl,
    })
}
