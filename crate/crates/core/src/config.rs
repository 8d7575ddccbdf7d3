//! JSON run-configuration shared by every CLI subcommand.

use std::path::Path;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::contact::EnvConfig;
use crate::control::{
    ControllerConfig, ControllerKind, LinearAccommodationConfig, NonlinearAccommodationConfig,
};
use crate::convergence::ConvergenceCriterionConfig;
use crate::error::{Error, Result};
use crate::learning::{EpisodeConfig, LearningConfig};
use crate::policy::{InsertionSetup, PolicyConfig};
use crate::types::SimRng;

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable that overrides the config seed.
pub const SEED_ENV: &str = "PIH_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub v: u32,
    pub seed: u64,
    /// Controller used by `collect`, `train` and `insert`.
    pub controller: ControllerKind,
    pub env: EnvConfig,
    pub linear: LinearAccommodationConfig,
    pub nonlinear: NonlinearAccommodationConfig,
    pub episode: EpisodeConfig,
    pub convergence: ConvergenceCriterionConfig,
    pub learning: LearningConfig,
    pub policy: PolicyConfig,
    pub collect_episodes: usize,
    /// Ensemble size for `analyze-convergence`.
    pub analysis_episodes: usize,
    /// Fixed misalignment of the `analyze-convergence` episodes, mm.
    pub analysis_offset: [f64; 2],
    pub n_trials: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            v: SCHEMA_VERSION,
            seed: 0,
            controller: ControllerKind::Linear,
            env: EnvConfig::default(),
            linear: LinearAccommodationConfig::default(),
            nonlinear: NonlinearAccommodationConfig::default(),
            episode: EpisodeConfig::default(),
            convergence: ConvergenceCriterionConfig::default(),
            learning: LearningConfig::default(),
            policy: PolicyConfig::default(),
            collect_episodes: 1200,
            analysis_episodes: 50,
            analysis_offset: [2.0, 0.0],
            n_trials: 100,
        }
    }
}

/// Independent random streams carved out of the run seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Collect = 1,
    Analysis = 2,
    Evaluation = 3,
    Trials = 4,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.v != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {} (expected {SCHEMA_VERSION})",
                self.v
            )));
        }
        if self.collect_episodes == 0 || self.analysis_episodes < 2 || self.n_trials == 0 {
            return Err(Error::Config(
                "collect_episodes and n_trials must be >= 1, analysis_episodes >= 2".into(),
            ));
        }
        self.setup().validate()
    }

    pub fn controller_config(&self, kind: ControllerKind) -> ControllerConfig {
        match kind {
            ControllerKind::Linear => ControllerConfig::Linear(self.linear),
            ControllerKind::Nonlinear => ControllerConfig::Nonlinear(self.nonlinear),
        }
    }

    pub fn setup(&self) -> InsertionSetup {
        InsertionSetup {
            env: self.env.clone(),
            controller: self.controller_config(self.controller),
            episode: self.episode,
            criterion: self.convergence,
            policy: self.policy,
        }
    }

    pub fn rng(&self, stream: Stream) -> SimRng {
        let mut rng = SimRng::seed_from_u64(self.seed);
        rng.set_stream(stream as u64);
        rng
    }
}

/// Seed precedence: flag, then environment, then config.
pub fn resolve_seed(config: u64, env: Option<&str>, flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        None => Ok(config),
    }
}
