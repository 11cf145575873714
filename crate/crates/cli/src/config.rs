//! Experiment configuration files.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use imopt::moea::MoeaConfig;
use imopt::objectives::CommunityScoring;
use imopt::{Objective, ObjectiveMask, PropagationModel, Tau};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Seed-set size bound: absolute, or a fraction of the node count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedBound {
    Absolute(usize),
    Fraction(f64),
}

impl SeedBound {
    pub fn resolve(self, node_count: usize) -> Result<usize, CliError> {
        let k = match self {
            SeedBound::Absolute(k) => k,
            SeedBound::Fraction(f) if f > 0.0 && f <= 1.0 => ((f * node_count as f64).round() as usize).max(1),
            SeedBound::Fraction(f) => return Err(CliError::Config(format!("k fraction {f} outside (0, 1]"))),
        };
        if k == 0 || k > node_count {
            return Err(CliError::Config(format!("k = {k} outside [1, {node_count}]")));
        }
        Ok(k)
    }
}

/// Where community labels come from.
#[derive(Debug, Clone, PartialEq)]
pub enum CommunitySource {
    /// Louvain detection with the given seed.
    Detect(u64),
    File(PathBuf),
}

impl FromStr for CommunitySource {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.split_once(':') {
            Some(("detect", seed)) => seed
                .trim()
                .parse()
                .map(CommunitySource::Detect)
                .map_err(|_| CliError::Config(format!("bad detection seed in {s:?}"))),
            Some(("file", path)) if !path.is_empty() => Ok(CommunitySource::File(PathBuf::from(path))),
            _ => Err(CliError::Config(format!(
                "community_source {s:?} is not detect:<seed> or file:<path>"
            ))),
        }
    }
}

/// Parses `ic:<p>`, `wc` or `lt:<low>,<high>`.
pub fn parse_model(s: &str) -> Result<PropagationModel, CliError> {
    let bad = || CliError::Config(format!("model {s:?} is not ic:<p>, wc or lt:<low>,<high>"));
    let model = match s.trim().split_once(':') {
        None if s.trim() == "wc" => PropagationModel::WeightedCascade,
        Some(("ic", p)) => PropagationModel::IndependentCascade {
            p: p.trim().parse().map_err(|_| bad())?,
        },
        Some(("lt", range)) => {
            let (low, high) = range.split_once(',').ok_or_else(bad)?;
            PropagationModel::LinearThreshold {
                low: low.trim().parse().map_err(|_| bad())?,
                high: high.trim().parse().map_err(|_| bad())?,
            }
        }
        _ => return Err(bad()),
    };
    model.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(model)
}

/// Optimizer settings as written in a configuration file. The seed bound
/// and objectives come from the experiment itself.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoeaBlock {
    pub population_size: Option<usize>,
    pub offspring_size: Option<usize>,
    pub elites: Option<usize>,
    pub tournament_size: Option<usize>,
    pub generations: Option<usize>,
    pub lambda: Option<f64>,
    pub theta: Option<f64>,
    pub crossover_rate: Option<f64>,
    pub mutation_rate: Option<f64>,
    pub init_tau: Option<u32>,
    pub scoring: Option<CommunityScoring>,
}

impl MoeaBlock {
    pub fn to_config(&self, k: usize, active: ObjectiveMask) -> MoeaConfig {
        let mut c = MoeaConfig::new(k, active);
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { c.$f = v; } )* };
        }
        set!(population_size, offspring_size, elites, tournament_size, generations, lambda, crossover_rate, mutation_rate, init_tau, scoring);
        c.theta = self.theta;
        c
    }
}

fn default_runs() -> usize {
    1
}

fn default_min_community_size() -> usize {
    10
}

/// One experiment. Relative paths are resolved against the directory of
/// the configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub graph_path: PathBuf,
    pub directed: bool,
    #[serde(default)]
    pub community_source: Option<String>,
    pub model: String,
    pub objectives: ObjectiveMask,
    pub k: SeedBound,
    pub tau: Tau,
    pub n_sims: usize,
    #[serde(default)]
    pub moea: Option<MoeaBlock>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub rng_seed_base: u64,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub workers: Option<usize>,
    /// Communities smaller than this are dropped by `preprocess`.
    #[serde(default = "default_min_community_size")]
    pub min_community_size: usize,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.graph_path = base.join(&cfg.graph_path);
        cfg.output_dir = base.join(&cfg.output_dir);
        if let Some(CommunitySource::File(p)) = cfg.communities()? {
            cfg.community_source = Some(format!("file:{}", base.join(p).display()));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} unsupported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.model()?;
        self.communities()?;
        if self.runs == 0 {
            return Err(CliError::Config("runs must be at least 1".into()));
        }
        if self.n_sims == 0 {
            return Err(CliError::Config("n_sims must be at least 1".into()));
        }
        if self.objectives.len() < 2 {
            return Err(CliError::Config(format!("at least two objectives required, got {}", self.objectives)));
        }
        if self.objectives.contains(Objective::Time) && self.tau.steps().is_none() {
            return Err(CliError::Config("the time objective needs a finite tau".into()));
        }
        let needs = self.objectives.contains(Objective::Communities) || self.objectives.contains(Objective::Fairness);
        if needs && self.community_source.is_none() {
            return Err(CliError::Config(format!(
                "objectives {} need a community_source",
                self.objectives
            )));
        }
        if self.workers == Some(0) {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        if let SeedBound::Fraction(f) = self.k {
            if !(f > 0.0 && f <= 1.0) {
                return Err(CliError::Config(format!("k fraction {f} outside (0, 1]")));
            }
        }
        Ok(())
    }

    pub fn model(&self) -> Result<PropagationModel, CliError> {
        parse_model(&self.model)
    }

    pub fn communities(&self) -> Result<Option<CommunitySource>, CliError> {
        self.community_source.as_deref().map(str::parse).transpose()
    }

    pub fn moea_config(&self, k: usize) -> MoeaConfig {
        self.moea.clone().unwrap_or_default().to_config(k, self.objectives)
    }
}
