//! Scenario files: a TOML-friendly mirror of the world and learner settings
//! with two built-in presets.
//!
//! `desk` is sized so a full comparison suite finishes on one core in a few
//! minutes; `full` is the large-scale counterpart. Every field has a default,
//! so an empty file is a valid scenario and files only need to state what they
//! change.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::airspace::{BaseStation, BsId, LayerConfig};
use crate::marl::{GreedyConfig, MaddpgConfig, MadqnConfig, PairingPolicy, WorldConfig};
use crate::radio::RadioParams;
use crate::slices::ResourcePool;
use crate::workload::{CostWeights, TaskGenConfig};

use super::HarnessError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub episodes: usize,
    pub steps: usize,
    pub seeds: Vec<u64>,
    /// Step length, seconds.
    pub dt: f64,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            episodes: 200,
            steps: 100,
            seeds: vec![7, 8, 9],
            dt: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    pub layer_altitudes: Vec<f64>,
    pub layer_speeds: Vec<f64>,
    pub climb_rate: f64,
    /// Crossing coordinates per layer, one inner list per layer.
    pub spawn_x: Vec<Vec<f64>>,
    /// Corridor start per layer. Omitted: chosen so each layer passes the
    /// station row at mid-episode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spawn_y: Option<Vec<f64>>,
    pub station_x: Vec<f64>,
    pub station_y: f64,
    pub station_capacity: usize,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            layer_altitudes: vec![100.0, 200.0],
            layer_speeds: vec![30.0, 50.0],
            climb_rate: 10.0,
            spawn_x: vec![
                vec![-1200.0, -100.0, 1000.0],
                vec![-1000.0, 100.0, 1200.0],
            ],
            spawn_y: None,
            station_x: vec![-1500.0, 0.0, 1500.0],
            station_y: 4000.0,
            station_capacity: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioSection {
    pub tx_power: f64,
    pub noise_power: f64,
    pub beamwidth_3db: f64,
    pub fading: bool,
}

impl Default for RadioSection {
    fn default() -> Self {
        let r = RadioParams::default();
        Self {
            tx_power: r.tx_power,
            noise_power: r.noise_power,
            beamwidth_3db: r.beamwidth_3db,
            fading: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoolSection {
    pub band: f64,
    pub beam: f64,
    pub comp: f64,
    pub scale: f64,
}

impl Default for PoolSection {
    fn default() -> Self {
        Self {
            band: 100.0,
            beam: 2e6,
            comp: 100.0,
            scale: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SlicesSection {
    pub count: u32,
    pub max_attachments: usize,
    pub step_scale: f64,
}

impl Default for SlicesSection {
    fn default() -> Self {
        Self {
            count: 3,
            max_attachments: 2,
            step_scale: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkloadSection {
    pub data_range: [f64; 2],
    pub cycles_range: [f64; 2],
    pub deadline_range: [f64; 2],
}

impl Default for WorkloadSection {
    fn default() -> Self {
        let t = TaskGenConfig::default();
        Self {
            data_range: t.data_range,
            cycles_range: t.cycles_range,
            deadline_range: t.deadline_range,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostsSection {
    pub omega_v: f64,
    pub eta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub omega_1: f64,
    pub omega_2: f64,
    pub gamma_match: f64,
    /// Explicit resource prices. Omitted: one full pool of a resource
    /// costs 1 per step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_band: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_beam: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_comp: Option<f64>,
}

impl Default for CostsSection {
    fn default() -> Self {
        let w = CostWeights::default();
        Self {
            omega_v: w.omega_v,
            eta: w.eta,
            alpha: w.alpha,
            beta: w.beta,
            omega_1: w.omega_1,
            omega_2: w.omega_2,
            gamma_match: w.gamma_match,
            omega_band: None,
            omega_beam: None,
            omega_comp: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdmissionSection {
    /// Steps between admission rounds.
    pub period: usize,
    /// Height of the reservation ladder.
    pub l_max: u32,
    pub preassess: bool,
    pub pairing: PairingPolicy,
}

impl Default for AdmissionSection {
    fn default() -> Self {
        Self {
            period: 1,
            l_max: 10,
            preassess: false,
            pairing: PairingPolicy::Priority,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnerSection {
    pub hidden: Vec<usize>,
    pub actor_lr: f64,
    pub critic_lr: f64,
    pub dqn_lr: f64,
    pub gamma: f64,
    pub tau: f64,
    pub buffer: usize,
    pub batch: usize,
    pub warmup: usize,
    pub noise_start: f64,
    pub noise_end: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub greedy_grid: Vec<f64>,
    pub action_values: Vec<f64>,
}

impl Default for LearnerSection {
    fn default() -> Self {
        Self {
            hidden: vec![32, 32],
            actor_lr: 1e-3,
            critic_lr: 5e-4,
            dqn_lr: 5e-4,
            gamma: 0.95,
            tau: 0.01,
            buffer: 15_000,
            batch: 64,
            warmup: 640,
            noise_start: 0.3,
            noise_end: 0.02,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            greedy_grid: vec![-1.0, 0.0, 1.0],
            action_values: vec![-1.0, -0.5, 0.0, 0.5, 1.0],
        }
    }
}

/// A complete experiment description, loadable from TOML.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub sim: SimSection,
    pub scenario: ScenarioSection,
    pub radio: RadioSection,
    pub pool: PoolSection,
    pub slices: SlicesSection,
    pub workload: WorkloadSection,
    pub costs: CostsSection,
    pub admission: AdmissionSection,
    pub learner: LearnerSection,
}

impl ScenarioConfig {
    /// Small preset: minutes on one core, learning rates to match the
    /// shorter horizon.
    pub fn desk() -> Self {
        Self::default()
    }

    /// Large preset: the same scenario run long with wider networks and
    /// slow learning rates.
    pub fn full() -> Self {
        let mut cfg = Self::default();
        cfg.sim.episodes = 800;
        cfg.sim.steps = 300;
        cfg.learner.hidden = vec![64, 64];
        cfg.learner.actor_lr = 2e-5;
        cfg.learner.critic_lr = 1e-5;
        cfg.learner.dqn_lr = 1e-4;
        cfg
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String, HarnessError> {
        Ok(toml::to_string_pretty(self)?)
    }

    /// Command line overrides, each optional.
    pub fn apply_overrides(
        &mut self,
        seed: Option<u64>,
        episodes: Option<usize>,
        steps: Option<usize>,
    ) {
        if let Some(s) = seed {
            self.sim.seeds = vec![s];
        }
        if let Some(e) = episodes {
            self.sim.episodes = e;
        }
        if let Some(s) = steps {
            self.sim.steps = s;
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let layers = self.scenario.layer_altitudes.len();
        if self.scenario.layer_speeds.len() != layers {
            return Err(HarnessError::Config(format!(
                "layer_speeds has {} entries for {} layers",
                self.scenario.layer_speeds.len(),
                layers
            )));
        }
        if self.scenario.spawn_x.len() != layers {
            return Err(HarnessError::Config(format!(
                "spawn_x has {} entries for {} layers",
                self.scenario.spawn_x.len(),
                layers
            )));
        }
        if let Some(y) = &self.scenario.spawn_y {
            if y.len() != layers {
                return Err(HarnessError::Config(format!(
                    "spawn_y has {} entries for {} layers",
                    y.len(),
                    layers
                )));
            }
        }
        if self.sim.seeds.is_empty() {
            return Err(HarnessError::Config("seeds must not be empty".into()));
        }
        if self.sim.episodes == 0 || self.sim.steps == 0 {
            return Err(HarnessError::Config(
                "episodes and steps must be positive".into(),
            ));
        }
        Ok(())
    }

    fn pool(&self) -> ResourcePool {
        ResourcePool {
            s_band: self.pool.band,
            s_beam: self.pool.beam,
            s_comp: self.pool.comp,
            scale: self.pool.scale,
        }
    }

    fn cost_weights(&self) -> CostWeights {
        let pool = self.pool();
        let defaults = CostWeights::normalized_for(&pool);
        CostWeights {
            omega_v: self.costs.omega_v,
            omega_band: self.costs.omega_band.unwrap_or(defaults.omega_band),
            omega_beam: self.costs.omega_beam.unwrap_or(defaults.omega_beam),
            omega_comp: self.costs.omega_comp.unwrap_or(defaults.omega_comp),
            eta: self.costs.eta,
            alpha: self.costs.alpha,
            beta: self.costs.beta,
            omega_1: self.costs.omega_1,
            omega_2: self.costs.omega_2,
            gamma_match: self.costs.gamma_match,
        }
    }

    /// Corridor starts: explicit if given, else placed so each layer is
    /// level with the station row halfway through the episode.
    fn spawn_y(&self) -> Vec<f64> {
        match &self.scenario.spawn_y {
            Some(y) => y.clone(),
            None => {
                let horizon = self.sim.steps as f64 * self.sim.dt;
                self.scenario
                    .layer_speeds
                    .iter()
                    .map(|v| self.scenario.station_y - v * horizon / 2.0)
                    .collect()
            }
        }
    }

    pub fn world_config(&self) -> Result<WorldConfig, HarnessError> {
        self.validate()?;
        let layers = self
            .scenario
            .layer_altitudes
            .iter()
            .zip(&self.scenario.layer_speeds)
            .map(|(&altitude, &prescribed_speed)| LayerConfig {
                altitude,
                prescribed_speed,
            })
            .collect();
        let stations = self
            .scenario
            .station_x
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                BaseStation::new(
                    BsId(i as u32),
                    x,
                    self.scenario.station_y,
                    self.scenario.station_capacity,
                )
            })
            .collect();
        Ok(WorldConfig {
            dt: self.sim.dt,
            layers,
            spawn_x: self.scenario.spawn_x.clone(),
            spawn_y: self.spawn_y(),
            climb_rate: self.scenario.climb_rate,
            stations,
            radio: RadioParams {
                tx_power: self.radio.tx_power,
                noise_power: self.radio.noise_power,
                beamwidth_3db: self.radio.beamwidth_3db,
                channel_gain_sq: Default::default(),
            },
            fading: self.radio.fading,
            pool: self.pool(),
            slice_count: self.slices.count,
            slice_max_attachments: self.slices.max_attachments,
            step_scale: self.slices.step_scale,
            taskgen: TaskGenConfig {
                data_range: self.workload.data_range,
                cycles_range: self.workload.cycles_range,
                deadline_range: self.workload.deadline_range,
            },
            costs: self.cost_weights(),
            l_max: self.admission.l_max,
            admission_period: self.admission.period,
            preassess: self.admission.preassess,
            pairing: self.admission.pairing,
        })
    }

    pub fn maddpg_config(&self) -> MaddpgConfig {
        MaddpgConfig {
            hidden: self.learner.hidden.clone(),
            actor_lr: self.learner.actor_lr,
            critic_lr: self.learner.critic_lr,
            gamma: self.learner.gamma,
            tau: self.learner.tau,
            buffer_capacity: self.learner.buffer,
            batch: self.learner.batch,
            warmup: self.learner.warmup,
            noise_start: self.learner.noise_start,
            noise_end: self.learner.noise_end,
        }
    }

    pub fn madqn_config(&self) -> MadqnConfig {
        MadqnConfig {
            hidden: self.learner.hidden.clone(),
            lr: self.learner.dqn_lr,
            gamma: self.learner.gamma,
            tau: self.learner.tau,
            buffer_capacity: self.learner.buffer,
            batch: self.learner.batch,
            warmup: self.learner.warmup,
            epsilon_start: self.learner.epsilon_start,
            epsilon_end: self.learner.epsilon_end,
            action_values: self.learner.action_values.clone(),
        }
    }

    pub fn greedy_config(&self) -> GreedyConfig {
        GreedyConfig {
            grid: self.learner.greedy_grid.clone(),
            epsilon_start: self.learner.epsilon_start,
            epsilon_end: self.learner.epsilon_end,
        }
    }
}
