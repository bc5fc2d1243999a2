//! Monte Carlo bias/RMSE campaigns with optional replacement contamination.

use crate::distribution::{self, LLParams, Sample};
use crate::error::{domain, Result};
use crate::estimators::{fit, FitOptions, Method};
use crate::rng::{derive_seed, substream};
use crate::robust::TieHandling;
use rand::distr::Open01;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Law generating replacement outliers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OutlierSource {
    None,
    LogLogistic { alpha: f64, beta: f64 },
    Uniform { low: f64, high: f64 },
    PointMass { value: f64 },
}

/// Which observations get replaced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReplacementPolicy {
    /// `k` distinct indices chosen uniformly at random.
    #[default]
    Random,
    /// The `k` largest observations.
    Largest,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContaminationScenario {
    pub fraction: f64,
    pub source: OutlierSource,
    #[serde(default)]
    pub replacement: ReplacementPolicy,
}

impl Default for ContaminationScenario {
    fn default() -> Self {
        Self::clean()
    }
}

impl ContaminationScenario {
    pub fn clean() -> Self {
        Self { fraction: 0.0, source: OutlierSource::None, replacement: ReplacementPolicy::Random }
    }

    pub fn new(fraction: f64, source: OutlierSource, replacement: ReplacementPolicy) -> Result<Self> {
        let sc = Self { fraction, source, replacement };
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..0.5).contains(&self.fraction) {
            return Err(domain(format!("contamination fraction must lie in [0, 0.5), got {}", self.fraction)));
        }
        match self.source {
            OutlierSource::None => {}
            OutlierSource::LogLogistic { alpha, beta } => {
                LLParams::new(alpha, beta)?;
            }
            OutlierSource::Uniform { low, high } => {
                if !(low >= 0.0 && low < high && high.is_finite()) {
                    return Err(domain(format!("uniform outliers need 0 <= low < high, got ({low}, {high})")));
                }
            }
            OutlierSource::PointMass { value } => {
                if !(value > 0.0 && value.is_finite()) {
                    return Err(domain(format!("point mass must be positive, got {value}")));
                }
            }
        }
        Ok(())
    }

    /// Number of replaced observations in a sample of size `n`.
    pub fn count(&self, n: usize) -> usize {
        if self.source == OutlierSource::None {
            return 0;
        }
        // f64::round rounds half away from zero
        ((self.fraction * n as f64).round() as usize).min(n / 2)
    }

    /// The four contaminated scenarios at n = 25, truth (1, 10), preceded by
    /// the clean reference, with their block labels.
    pub fn table3_blocks(replacement: ReplacementPolicy) -> Vec<(&'static str, ContaminationScenario)> {
        let c = |source| ContaminationScenario { fraction: 0.1, source, replacement };
        vec![
            ("No contamination", ContaminationScenario::clean()),
            ("10% outliers from LL(1, 0.1)", c(OutlierSource::LogLogistic { alpha: 1.0, beta: 0.1 })),
            ("10% outliers from LL(4, 10)", c(OutlierSource::LogLogistic { alpha: 4.0, beta: 10.0 })),
            ("10% outliers from U(0, 20)", c(OutlierSource::Uniform { low: 0.0, high: 20.0 })),
            ("10% point mass at 50", c(OutlierSource::PointMass { value: 50.0 })),
        ]
    }
}

fn draw_outlier<R: Rng + ?Sized>(source: &OutlierSource, rng: &mut R) -> f64 {
    match *source {
        OutlierSource::None => unreachable!("clean scenarios replace nothing"),
        OutlierSource::LogLogistic { alpha, beta } => {
            let p = LLParams::new(alpha, beta).expect("validated scenario");
            let u: f64 = rng.sample(Open01);
            distribution::quantile(u, &p).expect("u in (0, 1)")
        }
        OutlierSource::Uniform { low, high } => {
            let u: f64 = rng.sample(Open01);
            low + (high - low) * u
        }
        OutlierSource::PointMass { value } => value,
    }
}

/// Replaces `sc.count(n)` observations with draws from the outlier law.
pub fn contaminate<R: Rng + ?Sized>(s: &Sample, sc: &ContaminationScenario, rng: &mut R) -> Result<Sample> {
    sc.validate()?;
    let k = sc.count(s.len());
    if k == 0 {
        return Ok(s.clone());
    }
    let mut values = s.values().to_vec();
    let indices: Vec<usize> = match sc.replacement {
        ReplacementPolicy::Random => rand::seq::index::sample(rng, values.len(), k).into_vec(),
        ReplacementPolicy::Largest => {
            let mut order: Vec<usize> = (0..values.len()).collect();
            order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
            order.truncate(k);
            order
        }
    };
    for i in indices {
        values[i] = draw_outlier(&sc.source, rng);
    }
    Sample::new(values)
}

/// `(mean(ŵ − w), sqrt(mean((ŵ − w)²)))`, or `None` for an empty list.
pub fn bias_rmse(estimates: &[f64], truth: f64) -> Option<(f64, f64)> {
    if estimates.is_empty() {
        return None;
    }
    let n = estimates.len() as f64;
    let (sum, sum_sq) = estimates.iter().fold((0.0, 0.0), |(s, q), &e| {
        let d = e - truth;
        (s + d, q + d * d)
    });
    Some((sum / n, (sum_sq / n).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parameter {
    Alpha,
    Beta,
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parameter::Alpha => "alpha",
            Parameter::Beta => "beta",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub n: usize,
    #[serde(rename = "M")]
    pub replications: usize,
    pub truth: LLParams,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub scenario: ContaminationScenario,
    pub seed: u64,
    #[serde(default = "campaign_fit_options")]
    pub fit: FitOptions,
}

/// Estimator options used by campaigns: defaults, except that tied design
/// points (e.g. from a point mass) yield infinite pairwise slopes instead of
/// an error, as IEEE division does in reference implementations.
pub fn campaign_fit_options() -> FitOptions {
    let mut opts = FitOptions::default();
    opts.rm.ties = TieHandling::SignedInfinity;
    opts
}

impl SimulationConfig {
    pub fn new(n: usize, replications: usize, truth: LLParams, methods: Vec<Method>, seed: u64) -> Self {
        Self {
            n,
            replications,
            truth,
            methods,
            scenario: ContaminationScenario::clean(),
            seed,
            fit: campaign_fit_options(),
        }
    }

    pub fn with_scenario(mut self, scenario: ContaminationScenario) -> Self {
        self.scenario = scenario;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(domain(format!("simulation needs n >= 2, got {}", self.n)));
        }
        if self.replications < 1 {
            return Err(domain("simulation needs M >= 1"));
        }
        if self.methods.is_empty() {
            return Err(domain("simulation needs at least one method"));
        }
        self.scenario.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub method: Method,
    pub parameter: Parameter,
    /// `None` when every replication failed.
    pub bias: Option<f64>,
    pub rmse: Option<f64>,
    pub failure_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub config: SimulationConfig,
    /// Ordered by configured method, then α before β.
    pub cells: Vec<CellSummary>,
}

impl SimulationReport {
    pub fn cell(&self, method: Method, parameter: Parameter) -> Option<&CellSummary> {
        self.cells.iter().find(|c| c.method == method && c.parameter == parameter)
    }

    pub fn rmse(&self, method: Method, parameter: Parameter) -> Option<f64> {
        self.cell(method, parameter).and_then(|c| c.rmse)
    }

    pub fn bias(&self, method: Method, parameter: Parameter) -> Option<f64> {
        self.cell(method, parameter).and_then(|c| c.bias)
    }

    pub fn missing_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.rmse.is_none()).count()
    }
}

fn replicate(cfg: &SimulationConfig, index: u64) -> Vec<Option<(f64, f64)>> {
    let mut rng = substream(cfg.seed, index);
    let clean = distribution::sample(&cfg.truth, cfg.n, &mut rng).expect("n >= 2");
    let s = contaminate(&clean, &cfg.scenario, &mut rng).expect("validated scenario");
    cfg.methods.iter().map(|&m| fit(&s, m, &cfg.fit).ok().map(|r| (r.alpha(), r.beta()))).collect()
}

/// Runs the campaign on the current rayon pool.
pub fn run_monte_carlo(cfg: &SimulationConfig) -> Result<SimulationReport> {
    cfg.validate()?;
    let runs: Vec<Vec<Option<(f64, f64)>>> =
        (0..cfg.replications as u64).into_par_iter().map(|m| replicate(cfg, m)).collect();

    let mut cells = Vec::with_capacity(2 * cfg.methods.len());
    for (j, &method) in cfg.methods.iter().enumerate() {
        let ok: Vec<(f64, f64)> = runs.iter().filter_map(|r| r[j]).collect();
        let failures = cfg.replications - ok.len();
        for (parameter, truth, pick) in [
            (Parameter::Alpha, cfg.truth.alpha(), (|e: &(f64, f64)| e.0) as fn(&(f64, f64)) -> f64),
            (Parameter::Beta, cfg.truth.beta(), |e: &(f64, f64)| e.1),
        ] {
            let est: Vec<f64> = ok.iter().map(pick).collect();
            let summary = bias_rmse(&est, truth);
            cells.push(CellSummary {
                method,
                parameter,
                bias: summary.map(|s| s.0),
                rmse: summary.map(|s| s.1),
                failure_count: failures,
            });
        }
    }
    Ok(SimulationReport { config: cfg.clone(), cells })
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| domain(format!("cannot start worker pool: {e}")))
}

/// Runs the campaign on a dedicated pool of `jobs` threads.
pub fn run_monte_carlo_with_jobs(cfg: &SimulationConfig, jobs: usize) -> Result<SimulationReport> {
    pool(jobs)?.install(|| run_monte_carlo(cfg))
}

/// Published simulation tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Table {
    /// α bias/RMSE over the clean grid.
    T1,
    /// β bias/RMSE over the clean grid.
    T2,
    /// Contamination blocks at n = 25, truth (1, 10).
    T3,
}

impl FromStr for Table {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "T1" | "1" => Ok(Table::T1),
            "T2" | "2" => Ok(Table::T2),
            "T3" | "3" => Ok(Table::T3),
            _ => Err(domain(format!("unknown table '{s}', expected T1, T2 or T3"))),
        }
    }
}

pub const GRID_N: [usize; 5] = [10, 25, 50, 75, 100];
pub const GRID_BETA: [f64; 4] = [1.5, 2.5, 5.0, 10.0];

/// One simulated cell of a published table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableBlock {
    pub label: String,
    pub report: SimulationReport,
}

/// Campaign configs for `table`, in published row order.
pub fn table_configs(table: Table, replications: usize, seed: u64) -> Vec<(String, SimulationConfig)> {
    table_configs_with(table, replications, seed, ReplacementPolicy::Largest)
}

pub fn table_configs_with(
    table: Table,
    replications: usize,
    seed: u64,
    replacement: ReplacementPolicy,
) -> Vec<(String, SimulationConfig)> {
    let methods = Method::TABLE.to_vec();
    match table {
        Table::T1 | Table::T2 => {
            let mut out = Vec::new();
            for &n in &GRID_N {
                for &beta in &GRID_BETA {
                    let idx = out.len() as u64;
                    let truth = LLParams::new(1.0, beta).expect("grid parameters are valid");
                    let cfg = SimulationConfig::new(n, replications, truth, methods.clone(), derive_seed(seed, idx));
                    out.push((format!("n={n} beta={beta}"), cfg));
                }
            }
            out
        }
        Table::T3 => {
            // one seed for every block: each replication contaminates the
            // same clean sample, as in the published table
            let truth = LLParams::new(1.0, 10.0).expect("valid");
            ContaminationScenario::table3_blocks(replacement)
                .into_iter()
                .map(|(label, sc)| {
                    let cfg = SimulationConfig::new(25, replications, truth, methods.clone(), derive_seed(seed, 0))
                        .with_scenario(sc);
                    (label.to_string(), cfg)
                })
                .collect()
        }
    }
}

/// Runs every cell of `table`, in published row order.
pub fn reproduce_table(table: Table, replications: usize, seed: u64) -> Result<Vec<TableBlock>> {
    run_table(table_configs(table, replications, seed))
}

pub fn run_table(configs: Vec<(String, SimulationConfig)>) -> Result<Vec<TableBlock>> {
    configs.into_iter().map(|(label, cfg)| Ok(TableBlock { label, report: run_monte_carlo(&cfg)? })).collect()
}

pub fn run_table_with_jobs(configs: Vec<(String, SimulationConfig)>, jobs: usize) -> Result<Vec<TableBlock>> {
    pool(jobs)?.install(|| run_table(configs))
}

/// Header and string records in the published layout: one row per grid cell
/// (or contamination block), parameter and statistic, one column per method.
pub fn table_records(table: Table, blocks: &[TableBlock], precision: usize) -> (Vec<String>, Vec<Vec<String>>) {
    let methods: Vec<Method> = blocks.first().map(|b| b.report.config.methods.clone()).unwrap_or_default();
    let mut header: Vec<String> = match table {
        Table::T1 | Table::T2 => vec!["n".into(), "beta".into(), "parameter".into(), "statistic".into()],
        Table::T3 => vec!["scenario".into(), "parameter".into(), "statistic".into()],
    };
    header.extend(methods.iter().map(|m| m.label().to_string()));
    header.push("failures".into());

    let params: &[Parameter] = match table {
        Table::T1 => &[Parameter::Alpha],
        Table::T2 => &[Parameter::Beta],
        Table::T3 => &[Parameter::Alpha, Parameter::Beta],
    };
    let fmt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| format!("{x:.precision$}"));

    let mut rows = Vec::new();
    for block in blocks {
        let cfg = &block.report.config;
        for &param in params {
            for stat in ["bias", "rmse"] {
                let mut row = match table {
                    Table::T1 | Table::T2 => vec![cfg.n.to_string(), cfg.truth.beta().to_string()],
                    Table::T3 => vec![block.label.clone()],
                };
                row.push(param.to_string());
                row.push(stat.to_string());
                let mut failures = 0;
                for &m in &methods {
                    let cell = block.report.cell(m, param);
                    failures += cell.map_or(0, |c| c.failure_count);
                    row.push(fmt(cell.and_then(|c| if stat == "bias" { c.bias } else { c.rmse })));
                }
                row.push(failures.to_string());
                rows.push(row);
            }
        }
    }
    (header, rows)
}
