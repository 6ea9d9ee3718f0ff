//! Effective run configuration: defaults, an optional `key = value` config
//! file, and CLI flags, in increasing precedence.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use bsubgrad_core::{
    InexactnessModel, LipschitzMode, NoiseMagnitude, NoiseMode, StepKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Ex1,
    Ex2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProxKind {
    Euclidean,
    Entropy,
}

/// The fully resolved configuration echoed into every JSON summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub n: usize,
    pub radius: f64,
    pub gamma_coef: f64,
    pub m: usize,
    pub anchors_path: Option<PathBuf>,
    pub prox: ProxKind,
    pub oracle: String,
    pub step_rule: Option<StepKind>,
    pub iters: usize,
    pub seed: u64,
    pub stream: u64,
    pub log_every: usize,
    pub lipschitz_mode: LipschitzMode,
    pub noise_mode: NoiseMode,
    pub noise_magnitude: NoiseMagnitude,
}

pub fn parse_problem(s: &str) -> Result<ProblemKind, String> {
    match s {
        "ex1" => Ok(ProblemKind::Ex1),
        "ex2" => Ok(ProblemKind::Ex2),
        _ => Err(format!("problem: expected ex1 or ex2, got '{s}'")),
    }
}

pub fn parse_prox(s: &str) -> Result<ProxKind, String> {
    match s {
        "euclidean" => Ok(ProxKind::Euclidean),
        "entropy" => Ok(ProxKind::Entropy),
        _ => Err(format!("prox: expected euclidean or entropy, got '{s}'")),
    }
}

pub fn parse_step_rule(s: &str) -> Result<StepKind, String> {
    match s {
        "exact" => Ok(StepKind::ExactTheorem),
        "inexact" => Ok(StepKind::InexactTheorem),
        _ => Err(format!("step-rule: expected exact or inexact, got '{s}'")),
    }
}

pub fn parse_lipschitz_mode(s: &str) -> Result<LipschitzMode, String> {
    match s {
        "paper" => Ok(LipschitzMode::Paper),
        "analytic" => Ok(LipschitzMode::Analytic),
        _ => Err(format!("lipschitz-mode: expected paper or analytic, got '{s}'")),
    }
}

pub fn parse_noise_mode(s: &str) -> Result<NoiseMode, String> {
    match s {
        "random" => Ok(NoiseMode::Random),
        "adversarial" => Ok(NoiseMode::Adversarial),
        _ => Err(format!("noise-mode: expected random or adversarial, got '{s}'")),
    }
}

pub fn parse_noise_magnitude(s: &str) -> Result<NoiseMagnitude, String> {
    match s {
        "worst" => Ok(NoiseMagnitude::Worst),
        "uniform" => Ok(NoiseMagnitude::Uniform),
        _ => Err(format!("noise-magnitude: expected worst or uniform, got '{s}'")),
    }
}

/// Reads `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn read_config_file(path: &Path) -> Result<HashMap<String, String>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("config: cannot read {}: {e}", path.display()))?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config: line {} is not 'key = value'", lineno + 1))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Optional CLI value falls back to the config file, then to the default.
pub fn resolve<T: Clone + FromStr>(
    flag: &Option<T>,
    file: &HashMap<String, String>,
    key: &str,
    default: T,
) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    if let Some(v) = flag {
        return Ok(v.clone());
    }
    match file.get(key) {
        Some(raw) => raw.parse().map_err(|e| format!("{key}: {e}")),
        None => Ok(default),
    }
}

impl ExperimentConfig {
    pub fn model(&self) -> Result<InexactnessModel, String> {
        self.oracle.parse::<InexactnessModel>().map_err(|e| format!("oracle: {e}"))
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.iters < 1 {
            return Err("iters: must be >= 1".into());
        }
        if self.log_every < 1 {
            return Err("log-every: must be >= 1".into());
        }
        if self.n < 1 {
            return Err("n: must be >= 1".into());
        }
        self.model()?;
        // the shipped problems live on a Euclidean ball; the entropy prox
        // requires the simplex
        if self.prox == ProxKind::Entropy {
            return Err("prox: entropy requires a simplex-constrained problem; ex1 and ex2 are ball-constrained".into());
        }
        Ok(())
    }
}
