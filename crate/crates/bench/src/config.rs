//! Experiment configs: one TOML file holding `[[experiment]]` tables.
//!
//! ```toml
//! [[experiment]]
//! id = "identities"
//! scenario = "verify-identities"
//! seed = 7
//!
//! [experiment.model]
//! kind = "torus-1d"
//! modes = 24
//! grid = 64
//!
//! [experiment.parameters]
//! tol_subordination = 1e-8
//!
//! [experiment.budget]
//! max_kernel_entries = 4194304
//! max_workers = 8
//! ```

use crate::error::{BenchError, Result};
use crate::scenarios::ScenarioParams;
use brlab::ModelSpec;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budget {
    #[serde(default = "default_kernel_entries")]
    pub max_kernel_entries: usize,
    #[serde(default = "default_workers")]
    pub max_workers: usize,
}

fn default_kernel_entries() -> usize {
    1 << 22
}

fn default_workers() -> usize {
    8
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_kernel_entries: default_kernel_entries(), max_workers: default_workers() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub id: String,
    pub model: ModelSpec,
    #[serde(flatten)]
    pub params: ScenarioParams,
    pub seed: u64,
    pub budget: Budget,
}

impl ExperimentSpec {
    pub fn scenario_name(&self) -> &'static str {
        self.params.name()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[serde(default)]
    experiment: Vec<RawExperiment>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    id: String,
    scenario: String,
    model: toml::Value,
    #[serde(default)]
    parameters: toml::Table,
    seed: u64,
    #[serde(default)]
    budget: Budget,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub experiments: Vec<ExperimentSpec>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Missing(format!("{}: {e}", path.display())))?;
        Config::parse(&text, &path.display().to_string())
    }

    /// Parses and validates a config; `origin` prefixes error locations.
    pub fn parse(text: &str, origin: &str) -> Result<Config> {
        let raw: RawFile = toml::from_str(text).map_err(|e| {
            let loc = match e.span() {
                Some(span) => {
                    let line = text[..span.start].matches('\n').count() + 1;
                    let col = span.start - text[..span.start].rfind('\n').map_or(0, |i| i + 1) + 1;
                    format!("{origin}:{line}:{col}")
                }
                None => origin.to_string(),
            };
            BenchError::parse(loc, e.message().to_string())
        })?;
        if raw.experiment.is_empty() {
            return Err(BenchError::parse(origin, "no [[experiment]] tables"));
        }
        let mut ids = BTreeSet::new();
        let mut experiments = Vec::new();
        for (i, r) in raw.experiment.into_iter().enumerate() {
            let at = |field: &str| format!("{origin}: experiment[{i}] ({}).{field}", r.id);
            if r.id.is_empty() || !r.id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
                return Err(BenchError::parse(at("id"), "ids use ASCII letters, digits, '-' and '_'"));
            }
            if !ids.insert(r.id.clone()) {
                return Err(BenchError::parse(at("id"), format!("duplicate id `{}`", r.id)));
            }
            let model: ModelSpec = r.model.clone().try_into().map_err(|e: toml::de::Error| {
                BenchError::parse(at("model"), e.message().to_string())
            })?;
            let params = ScenarioParams::from_table(&r.scenario, r.parameters.clone())
                .map_err(|(field, msg)| BenchError::parse(at(&field), msg))?;
            params.validate_model(&model).map_err(|(field, msg)| BenchError::parse(at(&field), msg))?;
            if r.budget.max_workers == 0 {
                return Err(BenchError::parse(at("budget.max_workers"), "must be >= 1"));
            }
            experiments.push(ExperimentSpec { id: r.id, model, params, seed: r.seed, budget: r.budget });
        }
        Ok(Config { experiments })
    }

    /// A runnable single-experiment config with default model and parameters.
    pub fn default_text(scenario: &str) -> Result<String> {
        let (params, model) = ScenarioParams::default_for(scenario).ok_or_else(|| {
            BenchError::parse("scenario", format!("unknown scenario `{scenario}`; see `brlab list-scenarios`"))
        })?;
        let ser = |e: toml::ser::Error| BenchError::parse("default config", e.to_string());
        let mut exp = toml::Table::new();
        exp.insert("id".into(), scenario.replace('-', "_").into());
        exp.insert("scenario".into(), scenario.into());
        exp.insert("seed".into(), 7.into());
        exp.insert("model".into(), toml::Value::try_from(&model).map_err(ser)?);
        let mut params = toml::Value::try_from(&params).map_err(ser)?;
        let params = params
            .as_table_mut()
            .and_then(|t| t.remove("parameters"))
            .unwrap_or_else(|| toml::Table::new().into());
        exp.insert("parameters".into(), params);
        exp.insert("budget".into(), toml::Value::try_from(Budget::default()).map_err(ser)?);
        let mut root = toml::Table::new();
        root.insert("experiment".into(), toml::Value::Array(vec![exp.into()]));
        toml::to_string(&root).map_err(ser)
    }
}
