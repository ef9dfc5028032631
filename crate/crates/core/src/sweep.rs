//! Scenario evaluation and parameter sweeps.
//!
//! A [`Scenario`] is one farm configuration plus an operating point for the
//! failure predictor. [`run_sweep`] evaluates the Cartesian product of any
//! number of axes over a base scenario; [`table1`] and [`figure_series`]
//! are the fixed sweeps behind the standard comparison tables and plots.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::markov::{farm_mttdl, MarkovError, Mttdl, HOURS_PER_DAY};
use crate::prediction::{
    effective_failure_rate, false_replacement_cost, CostModel, PredictionError, RocSelector,
};
use crate::scheme::{ProtectionScheme, SchemeError};

/// MTTDL cells above this many days print as `--`.
pub const DASH_THRESHOLD_DAYS: f64 = 1e13;
/// Five years of 365 days, in hours.
pub const FIVE_YEARS_HOURS: f64 = 1825.0 * 24.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("{field}: {reason}")]
    InvalidScenario { field: &'static str, reason: String },
    #[error("unknown sweep parameter `{0}`")]
    UnknownParameter(String),
    #[error("at point [{point}]: {source}")]
    AtPoint {
        point: String,
        source: Box<SweepError>,
    },
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Markov(#[from] MarkovError),
    #[error(transparent)]
    Prediction(#[from] PredictionError),
}

impl SweepError {
    /// Numerical breakdown, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        match self {
            SweepError::Markov(e) | SweepError::Prediction(PredictionError::Markov(e)) => matches!(
                e,
                MarkovError::Conditioning { .. }
                    | MarkovError::SignFlip { .. }
                    | MarkovError::Degenerate
            ),
            SweepError::AtPoint { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}

fn invalid(field: &'static str, reason: impl Into<String>) -> SweepError {
    SweepError::InvalidScenario {
        field,
        reason: reason.into(),
    }
}

/// Replacement-cost inputs, hour-denominated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    pub replacement_cost: f64,
    pub lifetime_hours: f64,
    pub window_hours: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub scheme: ProtectionScheme,
    pub mttf_hours: f64,
    pub mttr_hours: f64,
    /// Fixed TPR. Excludes `roc`.
    pub tpr: Option<f64>,
    /// ROC curve the operating point lies on; needs `fpr` or `budget`.
    pub roc: Option<RocSelector>,
    pub fpr: Option<f64>,
    /// Per-window spend on false replacements; needs `roc` and `cost`.
    pub budget: Option<f64>,
    pub cost: Option<CostParams>,
}

impl Scenario {
    pub fn new(scheme: ProtectionScheme, mttf_hours: f64, mttr_hours: f64) -> Self {
        Self {
            scheme,
            mttf_hours,
            mttr_hours,
            tpr: None,
            roc: None,
            fpr: None,
            budget: None,
            cost: None,
        }
    }

    pub fn with_tpr(mut self, tpr: f64) -> Self {
        self.tpr = Some(tpr);
        self
    }

    pub fn failure_rate(&self) -> f64 {
        1.0 / self.mttf_hours
    }

    pub fn repair_rate(&self) -> f64 {
        1.0 / self.mttr_hours
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let positive = |field, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(
                    field,
                    format!("must be positive and finite, got {v}"),
                ))
            }
        };
        let probability = |field, v: Option<f64>| match v {
            Some(p) if !(0.0..=1.0).contains(&p) => {
                Err(invalid(field, format!("must lie in [0, 1], got {p}")))
            }
            _ => Ok(()),
        };
        positive("mttf_hours", self.mttf_hours)?;
        positive("mttr_hours", self.mttr_hours)?;
        probability("tpr", self.tpr)?;
        probability("fpr", self.fpr)?;
        if self.tpr.is_some() && self.roc.is_some() {
            return Err(invalid(
                "tpr",
                "conflicts with auc/p: give a TPR or an ROC curve",
            ));
        }
        if self.fpr.is_some() && self.budget.is_some() {
            return Err(invalid("budget", "conflicts with fpr"));
        }
        if let Some(b) = self.budget {
            if !(b >= 0.0 && b.is_finite()) {
                return Err(invalid("budget", format!("must be non-negative, got {b}")));
            }
            if self.roc.is_none() {
                return Err(invalid("budget", "needs an ROC curve (auc or p)"));
            }
            if self.cost.is_none() {
                return Err(invalid("budget", "needs cost parameters"));
            }
        }
        if let Some(roc) = self.roc {
            roc.model().map_err(|e| invalid("roc", e.to_string()))?;
            if self.fpr.is_none() && self.budget.is_none() {
                return Err(invalid("roc", "needs an operating point (fpr or budget)"));
            }
        }
        if let Some(c) = self.cost {
            positive("cost.replacement_cost", c.replacement_cost)?;
            positive("cost.lifetime_hours", c.lifetime_hours)?;
            positive("cost.window_hours", c.window_hours)?;
            self.cost_model()
                .map_err(|e| invalid("cost", e.to_string()))?;
        }
        Ok(())
    }

    pub fn cost_model(&self) -> Result<Option<CostModel>, SweepError> {
        self.cost
            .map(|c| {
                CostModel::from_hours(
                    c.replacement_cost,
                    c.lifetime_hours,
                    self.scheme.total_disks(),
                    self.mttf_hours,
                    c.window_hours,
                )
                .map_err(SweepError::from)
            })
            .transpose()
    }

    /// `(tpr, fpr)` implied by the prediction settings.
    pub fn operating_point(&self) -> Result<(f64, Option<f64>), SweepError> {
        if let Some(tpr) = self.tpr {
            return Ok((tpr, self.fpr));
        }
        let Some(roc) = self.roc else {
            return Ok((0.0, self.fpr));
        };
        let model = roc.model()?;
        let fpr = match (self.fpr, self.budget) {
            (Some(f), _) => f,
            (None, Some(b)) => {
                let cost = self
                    .cost_model()?
                    .ok_or_else(|| invalid("budget", "needs cost"))?;
                cost.fpr_for_budget(b)?
            }
            (None, None) => return Err(invalid("roc", "needs fpr or budget")),
        };
        Ok((model.tpr_for_fpr(fpr)?, Some(fpr)))
    }

    pub fn evaluate(&self, output: OutputSelector) -> Result<Evaluation, SweepError> {
        self.validate()?;
        let (tpr, fpr) = self.operating_point()?;
        let mttdl = if output.wants_mttdl() {
            let lambda = effective_failure_rate(self.failure_rate(), tpr)?;
            let alpha = self.scheme.alpha();
            Some(farm_mttdl(
                self.scheme.total_disks(),
                lambda,
                self.repair_rate(),
                &alpha,
            )?)
        } else {
            None
        };
        let cost = match (output.wants_cost(), self.cost_model()?, fpr) {
            (true, Some(model), Some(f)) => Some(false_replacement_cost(&model, f)?),
            _ => None,
        };
        Ok(Evaluation {
            tpr,
            fpr,
            mttdl,
            cost,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub tpr: f64,
    pub fpr: Option<f64>,
    pub mttdl: Option<Mttdl>,
    /// Per replacement window.
    pub cost: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputSelector {
    #[default]
    Mttdl,
    Cost,
    Both,
}

impl OutputSelector {
    pub fn wants_mttdl(self) -> bool {
        matches!(self, OutputSelector::Mttdl | OutputSelector::Both)
    }

    pub fn wants_cost(self) -> bool {
        matches!(self, OutputSelector::Cost | OutputSelector::Both)
    }
}

impl FromStr for OutputSelector {
    type Err = SweepError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mttdl" => Ok(Self::Mttdl),
            "cost" => Ok(Self::Cost),
            "both" => Ok(Self::Both),
            other => Err(SweepError::UnknownParameter(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Tpr,
    Fpr,
    Budget,
    Auc,
    P,
    MttrHours,
    MttfHours,
    Arrays,
}

impl SweepParam {
    pub const ALL: [SweepParam; 8] = [
        SweepParam::Tpr,
        SweepParam::Fpr,
        SweepParam::Budget,
        SweepParam::Auc,
        SweepParam::P,
        SweepParam::MttrHours,
        SweepParam::MttfHours,
        SweepParam::Arrays,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Tpr => "tpr",
            SweepParam::Fpr => "fpr",
            SweepParam::Budget => "budget",
            SweepParam::Auc => "auc",
            SweepParam::P => "p",
            SweepParam::MttrHours => "mttr_hours",
            SweepParam::MttfHours => "mttf_hours",
            SweepParam::Arrays => "arrays",
        }
    }

    fn apply(self, scenario: &mut Scenario, value: f64) -> Result<(), SweepError> {
        match self {
            SweepParam::Tpr => scenario.tpr = Some(value),
            SweepParam::Fpr => scenario.fpr = Some(value),
            SweepParam::Budget => scenario.budget = Some(value),
            SweepParam::Auc => scenario.roc = Some(RocSelector::Auc(value)),
            SweepParam::P => scenario.roc = Some(RocSelector::P(value)),
            SweepParam::MttrHours => scenario.mttr_hours = value,
            SweepParam::MttfHours => scenario.mttf_hours = value,
            SweepParam::Arrays => {
                if !(value >= 1.0 && value.fract() == 0.0 && value < 1e15) {
                    return Err(invalid(
                        "arrays",
                        format!("must be a positive integer, got {value}"),
                    ));
                }
                let s = scenario.scheme;
                scenario.scheme = ProtectionScheme::new(
                    s.data_disks_per_array(),
                    s.redundancy_disks_per_array(),
                    value as u64,
                )?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = SweepError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SweepParam::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| SweepError::UnknownParameter(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: Scenario,
    pub axes: Vec<Axis>,
    pub output: OutputSelector,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub point: Vec<(SweepParam, f64)>,
    pub tpr: f64,
    pub fpr: Option<f64>,
    pub mttdl: Option<Mttdl>,
    pub cost: Option<f64>,
}

fn describe(point: &[(SweepParam, f64)]) -> String {
    point
        .iter()
        .map(|(p, v)| format!("{p}={v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// One row per point of the Cartesian product; the first axis varies
/// slowest, values keep their given order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, SweepError> {
    let mut points: Vec<Vec<(SweepParam, f64)>> = vec![Vec::new()];
    for axis in &spec.axes {
        points = points
            .into_iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push((axis.param, v));
                    p
                })
            })
            .collect();
    }
    let at = |point: &[(SweepParam, f64)], e: SweepError| SweepError::AtPoint {
        point: describe(point),
        source: Box::new(e),
    };
    let scenarios = points
        .iter()
        .map(|point| {
            let mut s = spec.base;
            for &(param, value) in point {
                param.apply(&mut s, value).map_err(|e| at(point, e))?;
            }
            s.validate().map_err(|e| at(point, e))?;
            Ok(s)
        })
        .collect::<Result<Vec<_>, SweepError>>()?;
    scenarios
        .par_iter()
        .zip(points.par_iter())
        .map(|(s, point)| {
            let e = s.evaluate(spec.output).map_err(|e| at(point, e))?;
            Ok(SweepRow {
                point: point.clone(),
                tpr: e.tpr,
                fpr: e.fpr,
                mttdl: e.mttdl,
                cost: e.cost,
            })
        })
        .collect()
}

/// The three 80,000-data-disk layouts compared side by side.
pub fn comparison_schemes() -> [(&'static str, ProtectionScheme); 3] {
    [
        (
            "raid6_8+2",
            ProtectionScheme::raid6(8, 10_000).expect("valid"),
        ),
        (
            "raid_tp_8+3",
            ProtectionScheme::raid_tp(8, 10_000).expect("valid"),
        ),
        (
            "rs_20_16",
            ProtectionScheme::reed_solomon(16, 4, 5_000).expect("valid"),
        ),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table1Row {
    pub tpr: f64,
    pub mttr_hours: f64,
    pub raid6: Mttdl,
    pub raid_tp: Mttdl,
    pub rs: Mttdl,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1 {
    pub mttf_hours: f64,
    pub rows: Vec<Table1Row>,
}

/// MTTDL grid for RAID6 (8+2), RAID-TP (8+3) and RS (20,16) at equal data
/// capacity. Rows run over `tprs` (outer) then `mttrs_hours` (inner).
pub fn table1(mttf_hours: f64, tprs: &[f64], mttrs_hours: &[f64]) -> Result<Table1, SweepError> {
    if tprs.is_empty() || mttrs_hours.is_empty() {
        return Err(invalid("table1", "TPR and MTTR lists must be non-empty"));
    }
    let [(_, raid6), (_, raid_tp), (_, rs)] = comparison_schemes();
    let grid: Vec<(f64, f64)> = tprs
        .iter()
        .flat_map(|&t| mttrs_hours.iter().map(move |&r| (t, r)))
        .collect();
    let cell = |scheme, tpr, mttr| -> Result<Mttdl, SweepError> {
        let e = Scenario::new(scheme, mttf_hours, mttr)
            .with_tpr(tpr)
            .evaluate(OutputSelector::Mttdl)?;
        Ok(e.mttdl.expect("mttdl requested"))
    };
    let rows = grid
        .par_iter()
        .map(|&(tpr, mttr)| {
            Ok(Table1Row {
                tpr,
                mttr_hours: mttr,
                raid6: cell(raid6, tpr, mttr)?,
                raid_tp: cell(raid_tp, tpr, mttr)?,
                rs: cell(rs, tpr, mttr)?,
            })
        })
        .collect::<Result<Vec<_>, SweepError>>()?;
    Ok(Table1 { mttf_hours, rows })
}

/// Days, or `--` beyond [`DASH_THRESHOLD_DAYS`] or when unbounded.
pub fn format_days(mttdl: Mttdl) -> String {
    match mttdl.days() {
        Some(d) if d <= DASH_THRESHOLD_DAYS => {
            if d < 1e4 {
                format!("{d:.2}")
            } else {
                let exp = d.log10().floor() as i32;
                format!("{:.2}e{exp}", d / 10f64.powi(exp))
            }
        }
        _ => "--".to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FigureId {
    /// MTTDL vs TPR for several MTTRs.
    MttdlVsTpr = 3,
    /// False-replacement cost vs FPR.
    CostVsFpr = 4,
    /// MTTDL vs budget for several AUCs.
    MttdlVsBudget = 5,
    /// MTTDL vs AUC for several budgets.
    MttdlVsAuc = 6,
}

impl FigureId {
    pub fn from_number(n: u32) -> Option<Self> {
        match n {
            3 => Some(Self::MttdlVsTpr),
            4 => Some(Self::CostVsFpr),
            5 => Some(Self::MttdlVsBudget),
            6 => Some(Self::MttdlVsAuc),
            _ => None,
        }
    }

    pub fn number(self) -> u32 {
        self as u32
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub label: String,
    /// `(x, y)`; unbounded MTTDL appears as `+inf`.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Figure {
    pub id: FigureId,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

/// Figure setups share the 10,000 x (8+2) RAID6 farm, 5-year MTTF, $375 per
/// replacement, 5-year service life and a 6-hour replacement window.
pub mod figure_defaults {
    pub const REPLACEMENT_COST: f64 = 375.0;
    pub const WINDOW_HOURS: f64 = 6.0;
    pub const MTTRS_HOURS: [f64; 6] = [5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
    /// MTTR used by the budget/AUC figures.
    pub const COUPLED_MTTR_HOURS: f64 = 10.0;
    pub const AUCS: [f64; 4] = [0.90, 0.95, 0.97, 0.99];
    /// Budgets as the FPR they would buy on their own.
    pub const BUDGET_FPRS: [f64; 4] = [0.001, 0.005, 0.01, 0.02];
    pub const MAX_BUDGET_FPR: f64 = 0.05;
    pub const AUC_RANGE: (f64, f64) = (0.90, 0.995);
}

fn figure_base(mttr_hours: f64) -> Scenario {
    let mut s = Scenario::new(
        ProtectionScheme::raid6(8, 10_000).expect("valid"),
        FIVE_YEARS_HOURS,
        mttr_hours,
    );
    s.cost = Some(CostParams {
        replacement_cost: figure_defaults::REPLACEMENT_COST,
        lifetime_hours: FIVE_YEARS_HOURS,
        window_hours: figure_defaults::WINDOW_HOURS,
    });
    s
}

fn days(m: Option<Mttdl>) -> f64 {
    m.map_or(f64::NAN, |m| m.hours_or_inf() / HOURS_PER_DAY)
}

/// Numeric series for one of the standard figures; `resolution` is the
/// number of x samples per series (at least 2).
pub fn figure_series(id: FigureId, resolution: usize) -> Result<Figure, SweepError> {
    use figure_defaults as d;
    if resolution < 2 {
        return Err(invalid("resolution", "need at least 2 points per series"));
    }
    let unit = |k: usize| k as f64 / (resolution - 1) as f64;
    let run = |base: Scenario, axis: Axis, output| -> Result<Vec<SweepRow>, SweepError> {
        run_sweep(&SweepSpec {
            base,
            axes: vec![axis],
            output,
        })
    };
    let mut series = Vec::new();
    let (title, x_label, y_label) = match id {
        FigureId::MttdlVsTpr => {
            // TPR in [0, 1): TPR = 1 is unbounded
            let tprs: Vec<f64> = (0..resolution)
                .map(|k| k as f64 / resolution as f64)
                .collect();
            for mttr in d::MTTRS_HOURS {
                let rows = run(
                    figure_base(mttr),
                    Axis {
                        param: SweepParam::Tpr,
                        values: tprs.clone(),
                    },
                    OutputSelector::Mttdl,
                )?;
                series.push(Series {
                    label: format!("mttr_hours={mttr}"),
                    points: rows.iter().map(|r| (r.tpr, days(r.mttdl))).collect(),
                });
            }
            ("MTTDL vs true positive rate", "tpr", "mttdl_days")
        }
        FigureId::CostVsFpr => {
            let fprs: Vec<f64> = (0..resolution).map(unit).collect();
            let rows = run(
                figure_base(d::COUPLED_MTTR_HOURS),
                Axis {
                    param: SweepParam::Fpr,
                    values: fprs,
                },
                OutputSelector::Cost,
            )?;
            series.push(Series {
                label: format!("c={} window_hours={}", d::REPLACEMENT_COST, d::WINDOW_HOURS),
                points: rows
                    .iter()
                    .map(|r| (r.fpr.unwrap_or(0.0), r.cost.unwrap_or(0.0)))
                    .collect(),
            });
            (
                "False-replacement cost vs false positive rate",
                "fpr",
                "cost_per_window",
            )
        }
        FigureId::MttdlVsBudget => {
            let base = figure_base(d::COUPLED_MTTR_HOURS);
            let slope = base.cost_model()?.expect("cost set").slope();
            let budgets: Vec<f64> = (0..resolution)
                .map(|k| unit(k) * d::MAX_BUDGET_FPR * slope)
                .collect();
            for auc in d::AUCS {
                let mut s = base;
                s.roc = Some(RocSelector::Auc(auc));
                let rows = run(
                    s,
                    Axis {
                        param: SweepParam::Budget,
                        values: budgets.clone(),
                    },
                    OutputSelector::Mttdl,
                )?;
                series.push(Series {
                    label: format!("auc={auc}"),
                    points: rows.iter().map(|r| (r.point[0].1, days(r.mttdl))).collect(),
                });
            }
            (
                "MTTDL vs false-replacement budget",
                "budget_per_window",
                "mttdl_days",
            )
        }
        FigureId::MttdlVsAuc => {
            let base = figure_base(d::COUPLED_MTTR_HOURS);
            let slope = base.cost_model()?.expect("cost set").slope();
            let (lo, hi) = d::AUC_RANGE;
            let aucs: Vec<f64> = (0..resolution).map(|k| lo + unit(k) * (hi - lo)).collect();
            for fpr in d::BUDGET_FPRS {
                let mut s = base;
                s.budget = Some(fpr * slope);
                let rows = run(
                    s,
                    Axis {
                        param: SweepParam::Auc,
                        values: aucs.clone(),
                    },
                    OutputSelector::Mttdl,
                )?;
                series.push(Series {
                    label: format!("budget={}", fpr * slope),
                    points: rows.iter().map(|r| (r.point[0].1, days(r.mttdl))).collect(),
                });
            }
            ("MTTDL vs AUC", "auc", "mttdl_days")
        }
    };
    Ok(Figure {
        id,
        title: title.to_string(),
        x_label: x_label.to_string(),
        y_label: y_label.to_string(),
        series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raid6_base() -> Scenario {
        Scenario::new(
            ProtectionScheme::raid6(8, 10_000).unwrap(),
            FIVE_YEARS_HOURS,
            5.0,
        )
    }

    #[test]
    fn empty_axes_give_single_row() {
        let spec = SweepSpec {
            base: raid6_base().with_tpr(0.8),
            axes: vec![],
            output: OutputSelector::Mttdl,
        };
        let rows = run_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].point.is_empty());
        assert!(rows[0].mttdl.unwrap().hours().unwrap() > 0.0);
    }

    #[test]
    fn product_order_and_cardinality() {
        let spec = SweepSpec {
            base: raid6_base(),
            axes: vec![
                Axis {
                    param: SweepParam::MttrHours,
                    values: vec![5.0, 10.0, 15.0],
                },
                Axis {
                    param: SweepParam::Tpr,
                    values: vec![0.8, 0.85, 0.9, 0.95],
                },
            ],
            output: OutputSelector::Mttdl,
        };
        let rows = run_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 12);
        assert_eq!(
            rows[0].point,
            vec![(SweepParam::MttrHours, 5.0), (SweepParam::Tpr, 0.8)]
        );
        assert_eq!(
            rows[1].point,
            vec![(SweepParam::MttrHours, 5.0), (SweepParam::Tpr, 0.85)]
        );
        assert_eq!(
            rows[4].point,
            vec![(SweepParam::MttrHours, 10.0), (SweepParam::Tpr, 0.8)]
        );
        assert_eq!(run_sweep(&spec).unwrap(), rows);
    }

    #[test]
    fn invalid_point_is_named() {
        let spec = SweepSpec {
            base: raid6_base(),
            axes: vec![
                Axis {
                    param: SweepParam::Tpr,
                    values: vec![0.5],
                },
                Axis {
                    param: SweepParam::MttrHours,
                    values: vec![5.0, -1.0],
                },
            ],
            output: OutputSelector::Mttdl,
        };
        let err = run_sweep(&spec).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("mttr_hours=-1"), "{msg}");
        assert!(!err.is_numeric());
    }

    #[test]
    fn tpr_one_is_unbounded() {
        let e = raid6_base()
            .with_tpr(1.0)
            .evaluate(OutputSelector::Mttdl)
            .unwrap();
        assert_eq!(e.mttdl, Some(Mttdl::Unbounded));
        assert_eq!(format_days(Mttdl::Unbounded), "--");
    }

    #[test]
    fn conflicts_are_rejected() {
        let mut s = raid6_base().with_tpr(0.9);
        s.roc = Some(RocSelector::Auc(0.9));
        s.fpr = Some(0.01);
        assert!(matches!(
            s.validate(),
            Err(SweepError::InvalidScenario { field: "tpr", .. })
        ));
        let mut s = raid6_base();
        s.roc = Some(RocSelector::P(2.0));
        assert!(s.validate().is_err());
        s.budget = Some(10.0);
        assert!(matches!(
            s.validate(),
            Err(SweepError::InvalidScenario {
                field: "budget",
                ..
            })
        ));
    }

    #[test]
    fn roc_operating_point() {
        let mut s = raid6_base();
        s.roc = Some(RocSelector::P(2.0));
        s.fpr = Some(0.2);
        let (tpr, fpr) = s.operating_point().unwrap();
        assert!((tpr - 0.6).abs() < 1e-15);
        assert_eq!(fpr, Some(0.2));
    }

    #[test]
    fn arrays_axis_rebuilds_scheme() {
        let spec = SweepSpec {
            base: raid6_base().with_tpr(0.9),
            axes: vec![Axis {
                param: SweepParam::Arrays,
                values: vec![1.0, 100.0, 10_000.0],
            }],
            output: OutputSelector::Mttdl,
        };
        let rows = run_sweep(&spec).unwrap();
        assert!(rows[0].mttdl > rows[1].mttdl && rows[1].mttdl > rows[2].mttdl);
        let bad = SweepSpec {
            axes: vec![Axis {
                param: SweepParam::Arrays,
                values: vec![2.5],
            }],
            ..spec
        };
        assert!(run_sweep(&bad).is_err());
    }

    #[test]
    fn param_names_round_trip() {
        for p in SweepParam::ALL {
            assert_eq!(p.name().parse::<SweepParam>().unwrap(), p);
        }
        assert!("bogus".parse::<SweepParam>().is_err());
    }

    #[test]
    fn table1_ordering_and_formatting() {
        let t = table1(FIVE_YEARS_HOURS, &[0.8, 0.9], &[5.0, 10.0]).unwrap();
        assert_eq!(t.rows.len(), 4);
        assert_eq!((t.rows[1].tpr, t.rows[1].mttr_hours), (0.8, 10.0));
        for r in &t.rows {
            assert!(r.raid_tp >= r.raid6);
        }
        assert_eq!(format_days(Mttdl::Hours(24.0 * 192.94)), "192.94");
        assert_eq!(format_days(Mttdl::Hours(24.0 * 7.5e4)), "7.50e4");
        assert_eq!(format_days(Mttdl::Hours(24.0 * 2e13)), "--");
        assert!(table1(FIVE_YEARS_HOURS, &[], &[5.0]).is_err());
    }

    #[test]
    fn fig3_shape() {
        let f = figure_series(FigureId::MttdlVsTpr, 50).unwrap();
        assert_eq!(f.series.len(), 6);
        let mut knees = Vec::new();
        for s in &f.series {
            assert_eq!(s.points.len(), 50);
            let ln: Vec<f64> = s.points.iter().map(|p| p.1.ln()).collect();
            assert!(ln.windows(2).all(|w| w[1] > w[0]), "{}", s.label);
            assert!(
                ln.windows(3).all(|w| w[2] - 2.0 * w[1] + w[0] > -1e-9),
                "{}",
                s.label
            );
            let knee = s
                .points
                .iter()
                .find(|p| p.1 >= 1825.0)
                .map(|p| p.0)
                .unwrap();
            knees.push(knee);
        }
        assert!(knees.windows(2).all(|w| w[1] >= w[0]), "{knees:?}");
        assert!(knees[5] > knees[0]);
    }

    #[test]
    fn fig4_is_linear_through_origin() {
        let f = figure_series(FigureId::CostVsFpr, 11).unwrap();
        let pts = &f.series[0].points;
        assert_eq!(pts[0], (0.0, 0.0));
        let slope = pts[10].1 / pts[10].0;
        for &(x, y) in &pts[1..] {
            assert!(((y / x - slope) / slope).abs() < 1e-14);
        }
    }

    #[test]
    fn coupled_figures_are_monotone() {
        for id in [FigureId::MttdlVsBudget, FigureId::MttdlVsAuc] {
            let f = figure_series(id, 8).unwrap();
            for s in &f.series {
                assert!(s.points.windows(2).all(|w| w[1].1 >= w[0].1), "{}", s.label);
            }
        }
        let f = figure_series(FigureId::MttdlVsBudget, 6).unwrap();
        for k in 1..6 {
            let ys: Vec<f64> = f.series.iter().map(|s| s.points[k].1).collect();
            assert!(
                ys.windows(2).all(|w| w[1] > w[0]),
                "AUC ordering at budget index {k}"
            );
        }
    }
}
