//! Command-line front end: scenario files in, CSV/JSON/text tables out.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use mttdl_core::markov::{
    farm_mttdl, mttdl_hitting_time, mttdl_laplace, MarkovChainSpec, MarkovError, Mttdl,
    MttdlResult, HOURS_PER_DAY,
};
use mttdl_core::prediction::{false_replacement_cost, PredictionError, RocSelector};
use mttdl_core::sim::{
    simulate_chain, simulate_farm, DiskFarmSpec, LifetimeDistribution, SimError, SimResult,
};
use mttdl_core::sweep::{
    figure_series, run_sweep, table1, Axis, FigureId, OutputSelector, SweepError, SweepParam,
    SweepSpec, FIVE_YEARS_HOURS,
};
use thiserror::Error;

use config::{CostSection, LoadedScenario, PredictionSection, ScenarioFile, SchemeKind};
use output::{Cell, Format, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_CENSORING: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Censoring(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Numeric(_) => EXIT_NUMERIC,
            CliError::Censoring(_) => EXIT_CENSORING,
        }
    }

    pub fn context(self, ctx: &str) -> Self {
        match self {
            CliError::Validation(m) => CliError::Validation(format!("{ctx}: {m}")),
            CliError::Numeric(m) => CliError::Numeric(format!("{ctx}: {m}")),
            CliError::Censoring(m) => CliError::Censoring(format!("{ctx}: {m}")),
        }
    }
}

fn markov_is_numeric(e: &MarkovError) -> bool {
    matches!(
        e,
        MarkovError::Conditioning { .. } | MarkovError::SignFlip { .. } | MarkovError::Degenerate
    )
}

impl From<MarkovError> for CliError {
    fn from(e: MarkovError) -> Self {
        if markov_is_numeric(&e) {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<PredictionError> for CliError {
    fn from(e: PredictionError) -> Self {
        match e {
            PredictionError::Markov(m) => m.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        if e.is_numeric() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::InvalidSpec(_) | SimError::NoSamples => CliError::Validation(e.to_string()),
            SimError::AllCensored { .. } | SimError::TooFewSamples { .. } => {
                CliError::Censoring(e.to_string())
            }
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mttdl",
    version,
    about = "Storage-farm MTTDL under disk failure prediction"
)]
pub struct Cli {
    /// Scenario file (TOML). Without one, the reference farm is used:
    /// 10,000 x (8+2) RAID6, MTTF 43,800 h, MTTR 24 h.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output format; `text` for mttdl and table1, `csv` otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Simulation seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Simulation trial count.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct ScenarioArgs {
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeKind>,
    /// Data disks per array.
    #[arg(long)]
    pub n: Option<u64>,
    /// Redundancy disks per array.
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub arrays: Option<u64>,
    #[arg(long)]
    pub mttf_hours: Option<f64>,
    #[arg(long)]
    pub mttr_hours: Option<f64>,
    #[arg(long, conflicts_with_all = ["auc", "p"])]
    pub tpr: Option<f64>,
    #[arg(long, conflicts_with = "p")]
    pub auc: Option<f64>,
    /// ROC shape parameter.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, conflicts_with = "budget")]
    pub fpr: Option<f64>,
    /// Per-window spend on false replacements.
    #[arg(long)]
    pub budget: Option<f64>,
    /// Cost of one replacement.
    #[arg(long)]
    pub replacement_cost: Option<f64>,
    #[arg(long)]
    pub lifetime_hours: Option<f64>,
    #[arg(long)]
    pub window_hours: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SimMode {
    /// Per-disk discrete-event simulation of the farm.
    Farm,
    /// Direct simulation of the birth-death chain.
    Chain,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// MTTDL of one scenario by both solution methods.
    #[command(allow_negative_numbers = true)]
    Mttdl {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Cartesian sweep over one or more parameters.
    #[command(allow_negative_numbers = true)]
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// `name=v1,v2,...` or `name=start:stop:count`. Names: tpr, fpr,
        /// budget, auc, p, mttr_hours, mttf_hours, arrays. Repeatable; the
        /// first axis varies slowest.
        #[arg(long = "axis", required = true)]
        axes: Vec<String>,
        /// mttdl, cost or both.
        #[arg(long, default_value = "mttdl")]
        output: OutputSelector,
    },
    /// RAID6 / RAID-TP / RS(20,16) comparison at 80,000 data disks.
    #[command(allow_negative_numbers = true)]
    Table1 {
        #[arg(long, default_value_t = FIVE_YEARS_HOURS)]
        mttf_hours: f64,
        #[arg(long = "tpr", value_delimiter = ',', default_values_t = [0.80, 0.85, 0.90, 0.95])]
        tprs: Vec<f64>,
        #[arg(long = "mttr", value_delimiter = ',', default_values_t = [5.0, 10.0, 15.0])]
        mttrs: Vec<f64>,
    },
    /// Data series for one of the standard figures (3, 4, 5 or 6).
    Figure {
        #[arg(long)]
        id: u32,
        /// Points per series.
        #[arg(long, default_value_t = 101)]
        resolution: usize,
    },
    /// Points on a parametric ROC curve.
    #[command(group(ArgGroup::new("curve").required(true).args(["p", "auc"])))]
    #[command(allow_negative_numbers = true)]
    Roc {
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        auc: Option<f64>,
        /// FPR values; defaults to an even grid.
        #[arg(long = "fpr", value_delimiter = ',')]
        fprs: Vec<f64>,
        /// Grid size when no FPR values are given.
        #[arg(long, default_value_t = 11)]
        points: usize,
    },
    /// False-replacement cost per window against FPR.
    #[command(allow_negative_numbers = true)]
    Cost {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long = "fprs", value_delimiter = ',')]
        fprs: Vec<f64>,
        #[arg(long, default_value_t = 11)]
        points: usize,
    },
    /// Monte Carlo estimate of the mean time to data loss.
    #[command(allow_negative_numbers = true)]
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_enum, default_value = "farm")]
        mode: SimMode,
        #[arg(long)]
        event_cap: Option<u64>,
    },
}

/// Rendered output plus the exit code it should be reported with.
#[derive(Debug)]
pub struct Outcome {
    pub output: String,
    pub code: i32,
    pub warnings: Vec<String>,
}

fn spanned<T>(v: T) -> toml::Spanned<T> {
    toml::Spanned::new(0..0, v)
}

impl ScenarioArgs {
    fn apply(&self, loaded: &mut LoadedScenario) -> Result<(), CliError> {
        let f = &mut loaded.file;
        let mut marks: Vec<(&'static str, &'static str)> = Vec::new();
        if let Some(k) = self.scheme {
            f.scheme.kind = spanned(k);
            if self.m.is_none() && k != SchemeKind::Rs {
                f.scheme.m = None;
            }
            marks.push(("scheme", "--scheme"));
        }
        if let Some(n) = self.n {
            f.scheme.n = spanned(n);
            marks.push(("scheme", "--n"));
        }
        if let Some(m) = self.m {
            f.scheme.m = Some(spanned(m));
            marks.push(("scheme.m", "--m"));
        }
        if let Some(a) = self.arrays {
            f.scheme.arrays = spanned(a);
            marks.push(("scheme", "--arrays"));
        }
        if let Some(v) = self.mttf_hours {
            f.rates.mttf_hours = spanned(v);
            marks.push(("mttf_hours", "--mttf-hours"));
        }
        if let Some(v) = self.mttr_hours {
            f.rates.mttr_hours = spanned(v);
            marks.push(("mttr_hours", "--mttr-hours"));
        }
        let any_prediction = self.tpr.is_some()
            || self.auc.is_some()
            || self.p.is_some()
            || self.fpr.is_some()
            || self.budget.is_some();
        if any_prediction {
            let p = f.prediction.get_or_insert_with(PredictionSection::default);
            if let Some(v) = self.tpr {
                p.tpr = Some(spanned(v));
                marks.push(("tpr", "--tpr"));
            }
            if let Some(v) = self.auc {
                p.auc = Some(spanned(v));
                p.p = None;
                marks.push(("roc", "--auc"));
            }
            if let Some(v) = self.p {
                p.p = Some(spanned(v));
                p.auc = None;
                marks.push(("roc", "--p"));
            }
            if let Some(v) = self.fpr {
                p.fpr = Some(spanned(v));
                p.budget = None;
                marks.push(("fpr", "--fpr"));
            }
            if let Some(v) = self.budget {
                p.budget = Some(spanned(v));
                p.fpr = None;
                marks.push(("budget", "--budget"));
            }
        }
        let cost_flags = [
            self.replacement_cost,
            self.lifetime_hours,
            self.window_hours,
        ];
        if cost_flags.iter().any(Option::is_some) {
            let c =
                match f.cost.take() {
                    Some(c) => c,
                    None => match cost_flags {
                        [Some(c), Some(l), Some(w)] => CostSection {
                            c: spanned(c),
                            lifetime_hours: spanned(l),
                            window_hours: spanned(w),
                        },
                        _ => return Err(CliError::Validation(
                            "cost needs --replacement-cost, --lifetime-hours and --window-hours \
                             (or a [cost] section)"
                                .into(),
                        )),
                    },
                };
            let mut c = c;
            if let Some(v) = self.replacement_cost {
                c.c = spanned(v);
                marks.push(("cost.replacement_cost", "--replacement-cost"));
            }
            if let Some(v) = self.lifetime_hours {
                c.lifetime_hours = spanned(v);
                marks.push(("cost.lifetime_hours", "--lifetime-hours"));
            }
            if let Some(v) = self.window_hours {
                c.window_hours = spanned(v);
                marks.push(("cost.window_hours", "--window-hours"));
            }
            f.cost = Some(c);
        }
        for (field, flag) in marks {
            loaded.mark_flag(field, flag);
        }
        Ok(())
    }
}

fn load(cli: &Cli, args: Option<&ScenarioArgs>) -> Result<LoadedScenario, CliError> {
    let mut loaded = match &cli.config {
        Some(path) => LoadedScenario::load(path)?,
        None => LoadedScenario::from_file(ScenarioFile::reference()),
    };
    if let Some(args) = args {
        args.apply(&mut loaded)?;
    }
    Ok(loaded)
}

fn chain_for(
    loaded: &LoadedScenario,
) -> Result<(Option<MarkovChainSpec>, f64, Option<f64>), CliError> {
    let s = loaded.scenario()?;
    let (tpr, fpr) = s.operating_point()?;
    let lambda = mttdl_core::prediction::effective_failure_rate(s.failure_rate(), tpr)?;
    if lambda == 0.0 {
        return Ok((None, tpr, fpr));
    }
    let chain = MarkovChainSpec::new(
        s.scheme.total_disks(),
        lambda,
        s.repair_rate(),
        s.scheme.alpha(),
    )?;
    Ok((Some(chain), tpr, fpr))
}

fn cmd_mttdl(loaded: &LoadedScenario) -> Result<(Table, Vec<String>), CliError> {
    let s = loaded.scenario()?;
    let (chain, tpr, fpr) = chain_for(loaded)?;
    let cost = match (s.cost_model()?, fpr) {
        (Some(model), Some(f)) => Some(false_replacement_cost(&model, f)?),
        _ => None,
    };
    let mut t = Table::new(&[
        "method",
        "tpr",
        "fpr",
        "mttdl_hours",
        "mttdl_days",
        "precision",
        "relative_error_bound",
        "cost_per_window",
    ]);
    let mut warnings = Vec::new();
    let row = |method: &str, r: Option<&MttdlResult>| -> Vec<Cell> {
        let hours = r.map_or(f64::INFINITY, |r| r.mttdl_hours);
        vec![
            method.into(),
            tpr.into(),
            fpr.into(),
            hours.into(),
            (hours / HOURS_PER_DAY).into(),
            r.map(|r| format!("{:?}", r.diagnostics.precision).to_lowercase())
                .into(),
            r.map(|r| r.diagnostics.relative_error_bound).into(),
            cost.into(),
        ]
    };
    match chain {
        None => {
            t.push(row("laplace", None));
            t.push(row("hitting_time", None));
        }
        Some(chain) => {
            let a = mttdl_laplace(&chain)?;
            let b = mttdl_hitting_time(&chain)?;
            warnings.extend(a.diagnostics.warnings.iter().cloned());
            warnings.extend(b.diagnostics.warnings.iter().cloned());
            t.push(row("laplace", Some(&a)));
            t.push(row("hitting_time", Some(&b)));
        }
    }
    Ok((t, warnings))
}

fn parse_axis(spec: &str) -> Result<Axis, CliError> {
    let bad = |msg: String| CliError::Validation(format!("--axis {spec}: {msg}"));
    let (name, values) = spec
        .split_once('=')
        .ok_or_else(|| bad("expected name=values".into()))?;
    let param: SweepParam = name
        .trim()
        .parse()
        .map_err(|e: SweepError| bad(e.to_string()))?;
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| bad(format!("`{s}`: {e}")))
    };
    let parts: Vec<&str> = values.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, count] => {
            let (a, b) = (num(start)?, num(stop)?);
            let n: usize = count
                .trim()
                .parse()
                .map_err(|e| bad(format!("count `{count}`: {e}")))?;
            if n < 2 {
                return Err(bad("a range needs at least 2 points".into()));
            }
            (0..n)
                .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
                .collect()
        }
        [list] => list.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(bad("expected a list or start:stop:count".into())),
    };
    if values.is_empty() {
        return Err(bad("no values".into()));
    }
    Ok(Axis { param, values })
}

fn cmd_sweep(
    loaded: &LoadedScenario,
    axes: &[String],
    output: OutputSelector,
) -> Result<Table, CliError> {
    let axes = axes
        .iter()
        .map(|a| parse_axis(a))
        .collect::<Result<Vec<_>, _>>()?;
    // the base may be incomplete until the axes fill it in
    let mut base = loaded.scenario().or_else(|e| {
        let f = &loaded.file;
        let scheme = f.scheme().map_err(|_| e)?;
        Ok::<_, CliError>(mttdl_core::sweep::Scenario::new(
            scheme,
            *f.rates.mttf_hours.get_ref(),
            *f.rates.mttr_hours.get_ref(),
        ))
    })?;
    if base.cost.is_none() {
        if let Some(c) = &loaded.file.cost {
            base.cost = Some(mttdl_core::sweep::CostParams {
                replacement_cost: *c.c.get_ref(),
                lifetime_hours: *c.lifetime_hours.get_ref(),
                window_hours: *c.window_hours.get_ref(),
            });
        }
    }
    let names: Vec<String> = axes.iter().map(|a| a.param.name().to_string()).collect();
    let rows = run_sweep(&SweepSpec { base, axes, output })?;
    // an axis named tpr or fpr already carries that column
    let show_tpr = !names.iter().any(|n| n == "tpr");
    let show_fpr = !names.iter().any(|n| n == "fpr");
    let mut headers: Vec<&str> = names.iter().map(String::as_str).collect();
    headers.extend(show_tpr.then_some("tpr"));
    headers.extend(show_fpr.then_some("fpr"));
    headers.extend(["mttdl_hours", "mttdl_days", "cost_per_window"]);
    let mut t = Table::new(&headers);
    for r in rows {
        let mut cells: Vec<Cell> = r.point.iter().map(|&(_, v)| v.into()).collect();
        if show_tpr {
            cells.push(r.tpr.into());
        }
        if show_fpr {
            cells.push(r.fpr.into());
        }
        cells.push(r.mttdl.map(Mttdl::hours_or_inf).into());
        cells.push(r.mttdl.map(Mttdl::days_or_inf).into());
        cells.push(r.cost.into());
        t.push(cells);
    }
    Ok(t)
}

fn cmd_table1(mttf_hours: f64, tprs: &[f64], mttrs: &[f64]) -> Result<Table, CliError> {
    let grid = table1(mttf_hours, tprs, mttrs)?;
    let mut t = Table::new(&[
        "tpr",
        "mttr_hours",
        "raid6_8+2_days",
        "raid_tp_8+3_days",
        "rs_20_16_days",
    ]);
    for r in grid.rows {
        t.push(vec![
            r.tpr.into(),
            r.mttr_hours.into(),
            Cell::TableDays(r.raid6),
            Cell::TableDays(r.raid_tp),
            Cell::TableDays(r.rs),
        ]);
    }
    Ok(t)
}

fn cmd_figure(id: u32, resolution: usize) -> Result<Table, CliError> {
    let fig = FigureId::from_number(id).ok_or_else(|| {
        CliError::Validation(format!("--id: no figure {id}; choose 3, 4, 5 or 6"))
    })?;
    let f = figure_series(fig, resolution)?;
    let mut t = Table::new(&["series", f.x_label.as_str(), f.y_label.as_str()]);
    for s in &f.series {
        for &(x, y) in &s.points {
            t.push(vec![s.label.as_str().into(), x.into(), y.into()]);
        }
    }
    Ok(t)
}

fn grid(values: &[f64], points: usize) -> Result<Vec<f64>, CliError> {
    if !values.is_empty() {
        return Ok(values.to_vec());
    }
    if points < 2 {
        return Err(CliError::Validation("--points: need at least 2".into()));
    }
    Ok((0..points)
        .map(|k| k as f64 / (points - 1) as f64)
        .collect())
}

fn cmd_roc(
    p: Option<f64>,
    auc: Option<f64>,
    fprs: &[f64],
    points: usize,
) -> Result<Table, CliError> {
    let selector = match (p, auc) {
        (Some(p), None) => RocSelector::P(p),
        (None, Some(a)) => RocSelector::Auc(a),
        _ => {
            return Err(CliError::Validation(
                "give exactly one of --p and --auc".into(),
            ))
        }
    };
    let model = selector.model()?;
    let area = model.auc();
    let mut t = Table::new(&["p", "auc", "fpr", "tpr"]);
    for fpr in grid(fprs, points)? {
        t.push(vec![
            model.p().into(),
            area.into(),
            fpr.into(),
            model.tpr_for_fpr(fpr)?.into(),
        ]);
    }
    Ok(t)
}

fn cmd_cost(loaded: &LoadedScenario, fprs: &[f64], points: usize) -> Result<Table, CliError> {
    let s = loaded.scenario()?;
    let model = s.cost_model()?.ok_or_else(|| {
        CliError::Validation(
            "cost needs a [cost] section or --replacement-cost, --lifetime-hours, --window-hours"
                .into(),
        )
    })?;
    let mut t = Table::new(&["fpr", "cost_per_window"]);
    for fpr in grid(fprs, points)? {
        t.push(vec![
            fpr.into(),
            false_replacement_cost(&model, fpr)?.into(),
        ]);
    }
    Ok(t)
}

fn cmd_simulate(
    cli: &Cli,
    loaded: &LoadedScenario,
    mode: SimMode,
    event_cap: Option<u64>,
) -> Result<(Table, Vec<String>, bool), CliError> {
    let s = loaded.scenario()?;
    let (lifetime, mut config, repair) = loaded.sim_settings()?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(trials) = cli.trials {
        config.trials = trials;
    }
    if let Some(cap) = event_cap {
        config.event_cap = cap;
    }
    let (tpr, _) = s.operating_point()?;
    let lambda = mttdl_core::prediction::effective_failure_rate(s.failure_rate(), tpr)?;
    let analytic = farm_mttdl(
        s.scheme.total_disks(),
        lambda,
        s.repair_rate(),
        &s.scheme.alpha(),
    )?;
    let result: SimResult = match mode {
        SimMode::Farm => {
            let farm =
                DiskFarmSpec::new(s.scheme, lifetime, s.mttr_hours, tpr)?.with_repair_mode(repair);
            simulate_farm(&farm, config)?
        }
        SimMode::Chain => {
            if !matches!(lifetime, LifetimeDistribution::Exponential { .. }) {
                return Err(CliError::Validation(
                    "chain mode simulates exponential lifetimes only; use --mode farm".into(),
                ));
            }
            match chain_for(loaded)?.0 {
                Some(chain) => simulate_chain(&chain, config)?,
                None => {
                    return Err(CliError::Validation(
                        "tpr = 1 leaves no failures to simulate".into(),
                    ))
                }
            }
        }
    };
    let mut t = Table::new(&[
        "mode",
        "seed",
        "trials",
        "completed",
        "censored",
        "mean_days",
        "std_error_days",
        "ci95_low_days",
        "ci95_high_days",
        "analytic_days",
        "unreliable",
    ]);
    let d = |h: f64| h / HOURS_PER_DAY;
    let sm = result.summary;
    t.push(vec![
        match mode {
            SimMode::Farm => "farm",
            SimMode::Chain => "chain",
        }
        .into(),
        result.seed.into(),
        result.trials.into(),
        (result.trials - result.censored).into(),
        result.censored.into(),
        sm.map_or(f64::INFINITY, |s| d(s.mean)).into(),
        sm.map(|s| d(s.std_error)).into(),
        sm.map(|s| d(s.ci95.0)).into(),
        sm.map(|s| d(s.ci95.1)).into(),
        analytic.days_or_inf().into(),
        (result.unreliable || (result.is_unbounded() && lambda > 0.0)).into(),
    ]);
    let mut warnings = Vec::new();
    // with failures possible, censoring every trial says nothing about the mean
    let unreliable = result.unreliable || (result.is_unbounded() && lambda > 0.0);
    if unreliable {
        warnings.push(format!(
            "{} of {} trials hit the event cap; the mean is biased low",
            result.censored, result.trials
        ));
    } else if result.is_unbounded() {
        warnings.push("no trial reached data loss; the estimate is unbounded".into());
    }
    Ok((t, warnings, unreliable))
}

/// Execute a parsed command line.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let mut code = EXIT_OK;
    let mut warnings = Vec::new();
    let (table, default_format) = match &cli.command {
        Command::Mttdl { scenario } => {
            let loaded = load(cli, Some(scenario))?;
            let (t, w) = cmd_mttdl(&loaded)?;
            warnings = w;
            (t, Format::Text)
        }
        Command::Sweep {
            scenario,
            axes,
            output,
        } => {
            let loaded = load(cli, Some(scenario))?;
            (cmd_sweep(&loaded, axes, *output)?, Format::Csv)
        }
        Command::Table1 {
            mttf_hours,
            tprs,
            mttrs,
        } => (cmd_table1(*mttf_hours, tprs, mttrs)?, Format::Text),
        Command::Figure { id, resolution } => (cmd_figure(*id, *resolution)?, Format::Csv),
        Command::Roc {
            p,
            auc,
            fprs,
            points,
        } => (cmd_roc(*p, *auc, fprs, *points)?, Format::Csv),
        Command::Cost {
            scenario,
            fprs,
            points,
        } => {
            let loaded = load(cli, Some(scenario))?;
            (cmd_cost(&loaded, fprs, *points)?, Format::Csv)
        }
        Command::Simulate {
            scenario,
            mode,
            event_cap,
        } => {
            let loaded = load(cli, Some(scenario))?;
            let (t, w, unreliable) = cmd_simulate(cli, &loaded, *mode, *event_cap)?;
            warnings = w;
            if unreliable {
                code = EXIT_CENSORING;
            }
            (t, Format::Csv)
        }
    };
    Ok(Outcome {
        output: table.render(cli.format.unwrap_or(default_format)),
        code,
        warnings,
    })
}

/// Parse, run and emit; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &outcome.output)
                    .map_err(|e| format!("{}: {e}", path.display())),
                None => std::io::stdout()
                    .lock()
                    .write_all(outcome.output.as_bytes())
                    .map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => outcome.code,
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_VALIDATION
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
