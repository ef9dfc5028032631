//! Scenario files: TOML documents describing one farm, its predictor and
//! optional cost and simulation settings.

use std::ops::Range;

use mttdl_core::prediction::RocSelector;
use mttdl_core::scheme::ProtectionScheme;
use mttdl_core::sim::{LifetimeDistribution, RepairMode, SimConfig, DEFAULT_EVENT_CAP};
use mttdl_core::sweep::{CostParams, Scenario, SweepError};
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum SchemeKind {
    Raid6,
    RaidTp,
    Rs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionKind {
    #[default]
    Exponential,
    Weibull,
    Mixture,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSection {
    pub kind: Spanned<SchemeKind>,
    /// Data disks per array.
    pub n: Spanned<u64>,
    /// Redundancy disks per array; implied by `raid6` and `raid_tp`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Spanned<u64>>,
    pub arrays: Spanned<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesSection {
    pub mttf_hours: Spanned<f64>,
    pub mttr_hours: Spanned<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tpr: Option<Spanned<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub auc: Option<Spanned<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Spanned<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fpr: Option<Spanned<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<Spanned<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostSection {
    /// Price of one disk replacement.
    pub c: Spanned<f64>,
    pub lifetime_hours: Spanned<f64>,
    pub window_hours: Spanned<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<Spanned<DistributionKind>>,
    /// Weibull scale in hours.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Spanned<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<Spanned<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<Spanned<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<Spanned<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event_cap: Option<Spanned<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repair: Option<Spanned<RepairMode>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub scheme: SchemeSection,
    pub rates: RatesSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prediction: Option<PredictionSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<CostSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimSection>,
}

pub const DEFAULT_TRIALS: u64 = 1000;

/// Where a value came from, for error messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Flag(&'static str),
    Default,
}

fn spanned<T>(v: T) -> Spanned<T> {
    Spanned::new(0..0, v)
}

/// A scenario plus the provenance of each field.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub file: ScenarioFile,
    source: Option<String>,
    flags: Vec<(&'static str, &'static str)>,
}

impl ScenarioFile {
    /// Ten thousand (8+2) RAID6 arrays, 5-year MTTF, 24-hour MTTR.
    pub fn reference() -> Self {
        Self {
            scheme: SchemeSection {
                kind: spanned(SchemeKind::Raid6),
                n: spanned(8),
                m: None,
                arrays: spanned(10_000),
            },
            rates: RatesSection {
                mttf_hours: spanned(43_800.0),
                mttr_hours: spanned(24.0),
            },
            prediction: None,
            cost: None,
            sim: None,
        }
    }

    pub fn parse(src: &str) -> Result<LoadedScenario, CliError> {
        let file: ScenarioFile =
            toml::from_str(src).map_err(|e| CliError::Validation(e.to_string()))?;
        let loaded = LoadedScenario {
            file,
            source: Some(src.to_string()),
            flags: Vec::new(),
        };
        loaded.scenario()?;
        loaded.sim_settings()?;
        Ok(loaded)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario files always serialize")
    }

    /// `m` is missing for `rs` or disagrees with a RAID kind.
    fn m_mismatch(&self) -> bool {
        let m = self.scheme.m.as_ref().map(|m| *m.get_ref());
        match *self.scheme.kind.get_ref() {
            SchemeKind::Rs => m.is_none(),
            SchemeKind::Raid6 => m.is_some_and(|m| m != 2),
            SchemeKind::RaidTp => m.is_some_and(|m| m != 3),
        }
    }

    pub fn scheme(&self) -> Result<ProtectionScheme, mttdl_core::scheme::SchemeError> {
        let s = &self.scheme;
        let n = *s.n.get_ref();
        let arrays = *s.arrays.get_ref();
        let m = s.m.as_ref().map(|m| *m.get_ref());
        match (*s.kind.get_ref(), m) {
            (SchemeKind::Raid6, None | Some(2)) => ProtectionScheme::raid6(n, arrays),
            (SchemeKind::RaidTp, None | Some(3)) => ProtectionScheme::raid_tp(n, arrays),
            (SchemeKind::Rs, Some(m)) => ProtectionScheme::reed_solomon(n, m, arrays),
            (SchemeKind::Rs, None) => Err(mttdl_core::scheme::SchemeError::Geometry(
                "rs needs the number of code disks m".into(),
            )),
            (kind, Some(m)) => Err(mttdl_core::scheme::SchemeError::Geometry(format!(
                "{kind:?} implies m = {}, got {m}",
                if kind == SchemeKind::Raid6 { 2 } else { 3 }
            ))),
        }
    }
}

impl LoadedScenario {
    pub fn from_file(file: ScenarioFile) -> Self {
        Self {
            file,
            source: None,
            flags: Vec::new(),
        }
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        ScenarioFile::parse(&src).map_err(|e| e.context(&path.display().to_string()))
    }

    /// Record that `field` was set by `flag` on the command line.
    pub fn mark_flag(&mut self, field: &'static str, flag: &'static str) {
        self.flags.retain(|(f, _)| *f != field);
        self.flags.push((field, flag));
    }

    fn span_of(&self, field: &str) -> Option<Range<usize>> {
        let f = &self.file;
        let p = f.prediction.as_ref();
        let c = f.cost.as_ref();
        let s = f.sim.as_ref();
        let span = |o: Option<&Spanned<f64>>| o.map(|v| v.span());
        match field {
            "scheme" | "scheme.kind" => Some(f.scheme.kind.span()),
            "scheme.n" => Some(f.scheme.n.span()),
            "scheme.m" => f.scheme.m.as_ref().map(|v| v.span()),
            "scheme.arrays" => Some(f.scheme.arrays.span()),
            "mttf_hours" => Some(f.rates.mttf_hours.span()),
            "mttr_hours" => Some(f.rates.mttr_hours.span()),
            "tpr" => span(p.and_then(|p| p.tpr.as_ref())),
            "fpr" => span(p.and_then(|p| p.fpr.as_ref())),
            "budget" => span(p.and_then(|p| p.budget.as_ref())),
            "roc" => span(p.and_then(|p| p.auc.as_ref().or(p.p.as_ref()))),
            "cost" | "cost.replacement_cost" => span(c.map(|c| &c.c)),
            "cost.lifetime_hours" => span(c.map(|c| &c.lifetime_hours)),
            "cost.window_hours" => span(c.map(|c| &c.window_hours)),
            "sim.scale" => span(s.and_then(|s| s.scale.as_ref())),
            "sim.shape" => span(s.and_then(|s| s.shape.as_ref())),
            "sim.trials" => s.and_then(|s| s.trials.as_ref()).map(|v| v.span()),
            "sim.event_cap" => s.and_then(|s| s.event_cap.as_ref()).map(|v| v.span()),
            "sim.distribution" => s.and_then(|s| s.distribution.as_ref()).map(|v| v.span()),
            _ => None,
        }
        .filter(|r| r.end > 0)
    }

    pub fn origin(&self, field: &str) -> Origin {
        if let Some((_, flag)) = self.flags.iter().find(|(f, _)| *f == field) {
            return Origin::Flag(flag);
        }
        match (&self.source, self.span_of(field)) {
            (Some(src), Some(span)) => Origin::Line(src[..span.start].matches('\n').count() + 1),
            _ => Origin::Default,
        }
    }

    fn locate(&self, field: &str, message: String) -> CliError {
        let msg = match self.origin(field) {
            Origin::Line(n) => format!("line {n}: {field}: {message}"),
            Origin::Flag(flag) => format!("{flag}: {message}"),
            Origin::Default => format!("{field}: {message}"),
        };
        CliError::Validation(msg)
    }

    /// The validated core scenario.
    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let f = &self.file;
        let scheme = f.scheme().map_err(|e| {
            let field = if f.m_mismatch() { "scheme.m" } else { "scheme" };
            self.locate(field, e.to_string())
        })?;
        let mut s = Scenario::new(
            scheme,
            *f.rates.mttf_hours.get_ref(),
            *f.rates.mttr_hours.get_ref(),
        );
        if let Some(p) = &f.prediction {
            let v = |o: &Option<Spanned<f64>>| o.as_ref().map(|x| *x.get_ref());
            if p.auc.is_some() && p.p.is_some() {
                return Err(self.locate("roc", "give either auc or p, not both".into()));
            }
            s.tpr = v(&p.tpr);
            s.roc = v(&p.auc)
                .map(RocSelector::Auc)
                .or(v(&p.p).map(RocSelector::P));
            s.fpr = v(&p.fpr);
            s.budget = v(&p.budget);
        }
        if let Some(c) = &f.cost {
            s.cost = Some(CostParams {
                replacement_cost: *c.c.get_ref(),
                lifetime_hours: *c.lifetime_hours.get_ref(),
                window_hours: *c.window_hours.get_ref(),
            });
        }
        s.validate().map_err(|e| match e {
            SweepError::InvalidScenario { field, reason } => self.locate(field, reason),
            other => CliError::from(other),
        })?;
        Ok(s)
    }

    /// Lifetime law and run settings for `simulate`.
    pub fn sim_settings(&self) -> Result<(LifetimeDistribution, SimConfig, RepairMode), CliError> {
        let default = SimSection::default();
        let sim = self.file.sim.as_ref().unwrap_or(&default);
        let rate = 1.0 / *self.file.rates.mttf_hours.get_ref();
        let get = |o: &Option<Spanned<f64>>, name: &'static str| {
            o.as_ref()
                .map(|v| *v.get_ref())
                .ok_or_else(|| self.locate("sim.distribution", format!("needs sim.{name}")))
        };
        let kind = sim
            .distribution
            .as_ref()
            .map(|d| *d.get_ref())
            .unwrap_or_default();
        let lifetime = match kind {
            DistributionKind::Exponential => LifetimeDistribution::Exponential { rate },
            DistributionKind::Weibull => LifetimeDistribution::Weibull {
                scale: get(&sim.scale, "scale")?,
                shape: get(&sim.shape, "shape")?,
            },
            DistributionKind::Mixture => LifetimeDistribution::Mixture {
                rate,
                scale: get(&sim.scale, "scale")?,
                shape: get(&sim.shape, "shape")?,
            },
        };
        lifetime.validate().map_err(|e| {
            let msg = e.to_string();
            let field = if msg.starts_with("scale") {
                "sim.scale"
            } else if msg.starts_with("shape") {
                "sim.shape"
            } else {
                "mttf_hours"
            };
            self.locate(field, msg)
        })?;
        let int = |o: &Option<Spanned<u64>>| o.as_ref().map(|v| *v.get_ref());
        let trials = int(&sim.trials).unwrap_or(DEFAULT_TRIALS);
        if trials == 0 {
            return Err(self.locate("sim.trials", "must be at least 1".into()));
        }
        let cap = int(&sim.event_cap).unwrap_or(DEFAULT_EVENT_CAP);
        if cap == 0 {
            return Err(self.locate("sim.event_cap", "must be positive".into()));
        }
        let config = SimConfig::new(int(&sim.seed).unwrap_or(0), trials).with_event_cap(cap);
        let repair = sim
            .repair
            .as_ref()
            .map(|r| *r.get_ref())
            .unwrap_or_default();
        Ok((lifetime, config, repair))
    }
}
