//! Metric files: one CSV per run, one JSON summary per suite.
//!
//! Both formats are deterministic down to the byte for a given run: floats
//! are printed with the shortest round-trip form, map keys are ordered, and
//! nothing time- or host-dependent is written.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::marl::EpisodeRecord;

use super::HarnessError;

pub const CSV_HEADER: &str = "episode,slice_id,reward,sat_sum,sat_mean,op_cost,vio_cost,band_frac,beam_frac,comp_frac,unpaired";

/// One row per slice per episode.
pub fn write_episode_csv(path: &Path, records: &[EpisodeRecord]) -> std::io::Result<()> {
    let mut out = String::with_capacity(64 * records.len() + CSV_HEADER.len());
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (episode, rec) in records.iter().enumerate() {
        for (slice_id, s) in rec.slices.iter().enumerate() {
            writeln!(
                out,
                "{episode},{slice_id},{},{},{},{},{},{},{},{},{}",
                s.reward,
                s.sat_sum,
                s.sat_mean,
                s.op_cost,
                s.vio_cost,
                s.band_frac,
                s.beam_frac,
                s.comp_frac,
                rec.unpaired
            )
            .expect("writing to a String cannot fail");
        }
    }
    std::fs::write(path, out)
}

/// Mean episode reward over the final quarter of a run.
pub fn converged_reward(records: &[EpisodeRecord]) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    let window = (records.len() / 4).max(1);
    let tail = &records[records.len() - window..];
    tail.iter().map(EpisodeRecord::system_reward).sum::<f64>() / window as f64
}

/// Aggregates of one run, stored in the suite summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub episodes: usize,
    pub converged_reward: f64,
    pub mean_reward: f64,
    /// Mean over episodes of the slice-averaged per-task satisfaction.
    pub mean_satisfaction: f64,
    /// Per-step costs summed over slices, averaged over episodes.
    pub mean_op_cost: f64,
    pub mean_vio_cost: f64,
    pub mean_total_cost: f64,
    /// Tasks left unserved per episode.
    pub mean_unpaired: f64,
    /// Share of the pool the admission stage left reservable.
    pub mean_reserved_ratio: f64,
}

impl RunSummary {
    pub fn new(seed: u64, records: &[EpisodeRecord]) -> Self {
        let n = records.len().max(1) as f64;
        let mean = |f: &dyn Fn(&EpisodeRecord) -> f64| records.iter().map(f).sum::<f64>() / n;
        let slice_mean = |rec: &EpisodeRecord, g: &dyn Fn(&crate::marl::SliceEpisodeStats) -> f64| {
            if rec.slices.is_empty() {
                0.0
            } else {
                rec.slices.iter().map(g).sum::<f64>() / rec.slices.len() as f64
            }
        };
        let op = mean(&|r| r.slices.iter().map(|s| s.op_cost).sum());
        let vio = mean(&|r| r.slices.iter().map(|s| s.vio_cost).sum());
        Self {
            seed,
            episodes: records.len(),
            converged_reward: converged_reward(records),
            mean_reward: mean(&EpisodeRecord::system_reward),
            mean_satisfaction: mean(&|r| slice_mean(r, &|s| s.sat_mean)),
            mean_op_cost: op,
            mean_vio_cost: vio,
            mean_total_cost: op + vio,
            mean_unpaired: mean(&|r| r.unpaired as f64),
            mean_reserved_ratio: mean(&|r| r.reserved_ratio),
        }
    }
}

/// Every run of one suite, keyed `label/seedN`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub episodes: usize,
    pub steps: usize,
    pub runs: BTreeMap<String, RunSummary>,
}

impl SuiteSummary {
    pub fn new(suite: &str, episodes: usize, steps: usize) -> Self {
        Self {
            suite: suite.to_string(),
            episodes,
            steps,
            runs: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, key: impl Into<String>, run: RunSummary) {
        self.runs.insert(key.into(), run);
    }

    pub fn save(&self, path: &Path) -> Result<(), HarnessError> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(std::fs::write(path, text + "\n")?)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| HarnessError::Config(e.to_string()))
    }
}
