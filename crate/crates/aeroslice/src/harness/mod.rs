//! Experiment orchestration: scenario files, suite runners, metric output.

mod config;
mod experiment;
mod metrics;

pub use config::{ScenarioConfig, SimSection};
pub use experiment::{evaluate_checkpoint, run_suite, train_and_checkpoint, Suite};
pub use metrics::{converged_reward, write_episode_csv, RunSummary, SuiteSummary};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("scenario: {0}")]
    World(#[from] crate::marl::WorldError),
    #[error("learner: {0}")]
    Neuro(#[from] crate::neuro::NeuroError),
    #[error("unknown suite {name:?}; expected one of {expected}")]
    UnknownSuite { name: String, expected: String },
}

impl From<toml::de::Error> for HarnessError {
    fn from(e: toml::de::Error) -> Self {
        HarnessError::Config(e.to_string())
    }
}

impl From<toml::ser::Error> for HarnessError {
    fn from(e: toml::ser::Error) -> Self {
        HarnessError::Config(e.to_string())
    }
}
