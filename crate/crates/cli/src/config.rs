//! TOML configuration documents.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use twi_core::experiments::ExperimentConfig;
use twi_core::optimizer::{DEFAULT_ALPHA_CEILING_GAP, DEFAULT_TOLERANCE_MS};
use twi_core::{PathSpec, PathSummary};

use crate::error::{CliError, CliResult};

/// Environment variable supplying the seed when a document omits one.
pub const SEED_ENV: &str = "TWI_SEED";

pub fn env_seed() -> CliResult<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Invalid(format!("{SEED_ENV}={s:?} is not a u64"))),
        Err(_) => Ok(None),
    }
}

/// Deserializes `text`, reporting the key path of the first bad entry.
pub fn parse_toml<T: DeserializeOwned>(text: &str, origin: &str) -> CliResult<T> {
    let de =
        toml::Deserializer::parse(text).map_err(|e| CliError::Invalid(format!("{origin}: {e}")))?;
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Invalid(format!("{origin}: at `{path}`: {}", e.into_inner()))
    })
}

pub fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))
}

pub fn to_toml<T: Serialize>(value: &T) -> CliResult<String> {
    toml::to_string(value).map_err(|e| CliError::Invalid(format!("cannot serialize config: {e}")))
}

fn has_top_level_key(text: &str, key: &str) -> bool {
    text.parse::<toml::Table>()
        .map(|t| t.contains_key(key))
        .unwrap_or(false)
}

/// Experiment document with the seed resolved against [`SEED_ENV`].
pub fn load_experiment(path: &Path) -> CliResult<ExperimentConfig> {
    let text = read(path)?;
    let mut cfg: ExperimentConfig = parse_toml(&text, &path.display().to_string())?;
    if !has_top_level_key(&text, "seed") {
        if let Some(seed) = env_seed()? {
            cfg.seed = seed;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// A path given directly by its moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummaryInput {
    pub path_id: String,
    pub mean_ms: f64,
    pub variance_ms2: f64,
    #[serde(default)]
    pub drop_prob: f64,
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE_MS
}
fn default_alpha_gap() -> f64 {
    DEFAULT_ALPHA_CEILING_GAP
}

/// Input of `twi optimize`: explicit paths and/or moment summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    pub epsilon: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance_ms: f64,
    #[serde(default = "default_alpha_gap")]
    pub uniform_alpha_gap: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub paths: Vec<PathSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub summaries: Vec<SummaryInput>,
}

impl OptimizeConfig {
    /// Path ids and summaries, explicit paths first.
    pub fn resolve(&self) -> CliResult<Vec<(String, PathSummary)>> {
        if self.paths.is_empty() && self.summaries.is_empty() {
            return Err(CliError::Invalid("config lists no paths".into()));
        }
        let mut out = Vec::new();
        for p in &self.paths {
            out.push((
                p.path_id.clone(),
                twi_core::path_model::summarize_path_moments(p)?,
            ));
        }
        for s in &self.summaries {
            let summary = PathSummary::from_moments(s.mean_ms, s.variance_ms2, s.drop_prob)
                .map_err(|e| CliError::Invalid(format!("summary {}: {e}", s.path_id)))?;
            out.push((s.path_id.clone(), summary));
        }
        Ok(out)
    }
}

pub fn load_optimize(path: &Path) -> CliResult<OptimizeConfig> {
    let text = read(path)?;
    let cfg: OptimizeConfig = parse_toml(&text, &path.display().to_string())?;
    for p in &cfg.paths {
        p.validate()
            .map_err(|e| CliError::Invalid(format!("path {}: {e}", p.path_id)))?;
    }
    Ok(cfg)
}

/// Either document kind; experiment documents carry a `mode` key.
pub enum AnyConfig {
    Experiment(Box<ExperimentConfig>),
    Optimize(OptimizeConfig),
}

pub fn load_any(path: &Path) -> CliResult<AnyConfig> {
    let text = read(path)?;
    if has_top_level_key(&text, "mode") {
        load_experiment(path).map(|c| AnyConfig::Experiment(Box::new(c)))
    } else {
        load_optimize(path).map(AnyConfig::Optimize)
    }
}
