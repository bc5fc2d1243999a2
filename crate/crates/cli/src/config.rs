//! Flat TOML campaign files.
//!
//! ```toml
//! n = 25
//! M = 2000
//! alpha = 1.0
//! beta = 10.0
//! methods = "all"          # or ["mle", "rm"]
//! seed = 7
//! scenario = "point-mass"  # none | ll | uniform | point-mass
//! fraction = 0.1
//! value = 50.0             # point-mass; ll takes outlier_alpha/outlier_beta, uniform low/high
//! replacement = "random"   # or "largest"
//! ```

use crate::error::CliError;
use llfit_core::simulation::{ContaminationScenario, OutlierSource, ReplacementPolicy, SimulationConfig};
use llfit_core::{LLParams, Method};
use toml::{Table, Value};

const KEYS: [&str; 15] = [
    "n",
    "M",
    "alpha",
    "beta",
    "methods",
    "seed",
    "scenario",
    "fraction",
    "value",
    "low",
    "high",
    "outlier_alpha",
    "outlier_beta",
    "replacement",
    "rm_inner",
];

struct Keys<'a>(&'a Table);

impl Keys<'_> {
    fn get(&self, key: &str) -> Option<&Value> {
        self.0.get(key)
    }

    fn require(&self, key: &str) -> Result<&Value, CliError> {
        self.get(key).ok_or_else(|| CliError::config(key, "missing required key"))
    }

    fn count(&self, key: &str) -> Result<usize, CliError> {
        match self.require(key)? {
            Value::Integer(i) if *i >= 0 => Ok(*i as usize),
            other => Err(CliError::config(key, format!("expected a non-negative integer, got {other}"))),
        }
    }

    fn float(&self, key: &str) -> Result<f64, CliError> {
        match self.require(key)? {
            Value::Float(f) => Ok(*f),
            Value::Integer(i) => Ok(*i as f64),
            other => Err(CliError::config(key, format!("expected a number, got {other}"))),
        }
    }

    fn string(&self, key: &str) -> Result<Option<&str>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(CliError::config(key, format!("expected a string, got {other}"))),
        }
    }
}

pub fn parse_campaign(text: &str) -> Result<SimulationConfig, CliError> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| CliError::config("<file>", e.message()))?;
    if let Some(unknown) = table.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(CliError::config(unknown.as_str(), "unknown key"));
    }
    let keys = Keys(&table);

    let n = keys.count("n")?;
    let replications = keys.count("M")?;
    let seed = match keys.require("seed")? {
        Value::Integer(i) if *i >= 0 => *i as u64,
        other => return Err(CliError::config("seed", format!("expected a non-negative integer, got {other}"))),
    };
    let truth = LLParams::new(keys.float("alpha")?, keys.float("beta")?)
        .map_err(|e| CliError::config("alpha/beta", e.to_string()))?;
    let methods = match keys.require("methods")? {
        Value::String(s) => Method::parse_list(s),
        Value::Array(items) => {
            let mut names = Vec::new();
            for (i, item) in items.iter().enumerate() {
                match item {
                    Value::String(s) => names.push(s.as_str()),
                    other => {
                        return Err(CliError::config(
                            format!("methods[{i}]"),
                            format!("expected a string, got {other}"),
                        ))
                    }
                }
            }
            Method::parse_list(&names.join(","))
        }
        other => return Err(CliError::config("methods", format!("expected a string or array, got {other}"))),
    }
    .map_err(|e| CliError::config("methods", e.to_string()))?;

    let replacement = match keys.string("replacement")? {
        None | Some("random") => ReplacementPolicy::Random,
        Some("largest") => ReplacementPolicy::Largest,
        Some(other) => {
            return Err(CliError::config("replacement", format!("expected random or largest, got '{other}'")))
        }
    };
    let source = match keys.string("scenario")?.unwrap_or("none") {
        "none" => OutlierSource::None,
        "ll" => OutlierSource::LogLogistic { alpha: keys.float("outlier_alpha")?, beta: keys.float("outlier_beta")? },
        "uniform" => OutlierSource::Uniform { low: keys.float("low")?, high: keys.float("high")? },
        "point-mass" => OutlierSource::PointMass { value: keys.float("value")? },
        other => {
            return Err(CliError::config(
                "scenario",
                format!("expected none, ll, uniform or point-mass, got '{other}'"),
            ))
        }
    };
    let fraction = if source == OutlierSource::None { 0.0 } else { keys.float("fraction")? };
    let scenario = ContaminationScenario::new(fraction, source, replacement)
        .map_err(|e| CliError::config("scenario", e.to_string()))?;

    let mut cfg = SimulationConfig::new(n, replications, truth, methods, seed).with_scenario(scenario);
    match keys.string("rm_inner")? {
        None | Some("cumulative") => {}
        Some("siegel") => cfg.fit.rm.inner = llfit_core::InnerMedian::Siegel,
        Some(other) => {
            return Err(CliError::config("rm_inner", format!("expected cumulative or siegel, got '{other}'")))
        }
    }
    if cfg.n < 2 {
        return Err(CliError::config("n", "must be at least 2"));
    }
    if cfg.replications < 1 {
        return Err(CliError::config("M", "must be at least 1"));
    }
    Ok(cfg)
}
