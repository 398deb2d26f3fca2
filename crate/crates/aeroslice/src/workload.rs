//! Per-step offloading tasks and the satisfaction and cost accounting that
//! scores how well slices serve them.
//!
//! Every airborne eVTOL raises one task per step: a data volume to upload, a
//! compute demand to run remotely and a deadline. Delay is transmission plus
//! computation; satisfaction squashes the deadline margin through a logistic
//! curve, so finishing exactly on time scores one half.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::airspace::{EvtolId, EvtolState, Vec3};
use crate::slices::{ResourcePool, SliceState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WorkloadError {
    #[error("invalid {name} range [{lo}, {hi}]")]
    InvalidRange {
        name: &'static str,
        lo: f64,
        hi: f64,
    },
}

/// Kinematic snapshot of the task owner at request time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OwnerDynamics {
    pub position: Vec3,
    pub v_y: f64,
    pub v_z: f64,
}

/// One offloading request.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskRequest {
    pub owner: EvtolId,
    /// Data to upload, Mbit.
    pub data_size: f64,
    /// Remote compute demand, Gcycle.
    pub cycles: f64,
    /// Acceptable completion time, seconds.
    pub deadline: f64,
    pub dynamics: OwnerDynamics,
}

/// Weights of the scoring terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    /// Price per deadline violation.
    pub omega_v: f64,
    /// Price per held MHz.
    pub omega_band: f64,
    /// Price per held unit of beam budget.
    pub omega_beam: f64,
    /// Price per held GFLOPS.
    pub omega_comp: f64,
    /// Steepness of the satisfaction logistic.
    pub eta: f64,
    /// Satisfaction weight in the reporting objective.
    pub alpha: f64,
    /// Cost weight in the reporting objective.
    pub beta: f64,
    /// Satisfaction weight in the learning reward.
    pub omega_1: f64,
    /// Cost weight in the learning reward.
    pub omega_2: f64,
    /// Blend between urgency and proximity when ranking access candidates.
    pub gamma_match: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self {
            omega_v: 2.0,
            omega_band: 0.01,
            omega_beam: 1.0,
            omega_comp: 0.01,
            eta: 0.1,
            alpha: 1.0,
            beta: 1.0,
            omega_1: 10.0,
            omega_2: 1.0,
            gamma_match: 0.5,
        }
    }
}

impl CostWeights {
    /// Resource prices tuned so holding a full pool of one resource costs 1.
    pub fn normalized_for(pool: &ResourcePool) -> Self {
        Self {
            omega_band: 1.0 / pool.s_band,
            omega_beam: 1.0 / pool.s_beam,
            omega_comp: 1.0 / pool.s_comp,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), WorkloadError> {
        let nonnegative = [
            ("omega_v", self.omega_v),
            ("omega_band", self.omega_band),
            ("omega_beam", self.omega_beam),
            ("omega_comp", self.omega_comp),
            ("eta", self.eta),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("omega_1", self.omega_1),
            ("omega_2", self.omega_2),
        ];
        for (name, v) in nonnegative {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(WorkloadError::InvalidRange {
                    name,
                    lo: v,
                    hi: v,
                });
            }
        }
        if !(0.0..=1.0).contains(&self.gamma_match) {
            return Err(WorkloadError::InvalidRange {
                name: "gamma_match",
                lo: self.gamma_match,
                hi: self.gamma_match,
            });
        }
        Ok(())
    }
}

/// Sampling ranges for task generation, uniform and inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskGenConfig {
    /// Mbit.
    pub data_range: [f64; 2],
    /// Gcycle.
    pub cycles_range: [f64; 2],
    /// Seconds.
    pub deadline_range: [f64; 2],
}

impl Default for TaskGenConfig {
    fn default() -> Self {
        Self {
            data_range: [5.0, 20.0],
            cycles_range: [10.0, 50.0],
            deadline_range: [1.0, 5.0],
        }
    }
}

impl TaskGenConfig {
    pub fn validate(&self) -> Result<(), WorkloadError> {
        for (name, [lo, hi]) in [
            ("data", self.data_range),
            ("cycles", self.cycles_range),
            ("deadline", self.deadline_range),
        ] {
            if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
                return Err(WorkloadError::InvalidRange { name, lo, hi });
            }
        }
        Ok(())
    }
}

/// Seconds to push `data_size` Mbit through a link at `rate` Mbit/s.
/// A dead link yields the infinite-delay sentinel.
pub fn transmission_delay(data_size: f64, rate: f64) -> f64 {
    if rate > 0.0 {
        data_size / rate
    } else {
        f64::INFINITY
    }
}

/// Seconds to run `cycles` Gcycle on the compute share a slice holds.
pub fn computation_delay(cycles: f64, v_comp: f64, pool: &ResourcePool) -> f64 {
    let (_, _, s_comp) = pool.effective();
    let held = v_comp * s_comp;
    if held > 0.0 {
        cycles / held
    } else {
        f64::INFINITY
    }
}

/// Completion time of one task.
pub fn total_delay(transmission: f64, computation: f64) -> f64 {
    transmission + computation
}

/// Logistic score of the deadline margin: one half on time, towards one when
/// early, towards zero when late. An infinite delay scores zero.
pub fn satisfaction(deadline: f64, actual: f64, eta: f64) -> f64 {
    1.0 / (1.0 + (-eta * (deadline - actual)).exp())
}

/// Satisfaction a slice accumulates over its users.
pub fn slice_satisfaction(per_task: &[f64]) -> f64 {
    per_task.iter().sum()
}

/// Mean per-user satisfaction; an empty slice scores zero.
pub fn slice_satisfaction_mean(per_task: &[f64]) -> f64 {
    if per_task.is_empty() {
        0.0
    } else {
        slice_satisfaction(per_task) / per_task.len() as f64
    }
}

/// Price of the deadlines missed outright, `omega_v` per strictly late task.
pub fn violation_cost(delays: &[f64], deadlines: &[f64], omega_v: f64) -> f64 {
    debug_assert_eq!(delays.len(), deadlines.len());
    let late = delays
        .iter()
        .zip(deadlines)
        .filter(|(d, t)| *d > t)
        .count();
    omega_v * late as f64
}

/// Price of the resources a slice holds this step.
pub fn operation_cost(slice: &SliceState, pool: &ResourcePool, w: &CostWeights) -> f64 {
    let (band, beam, comp) = pool.effective();
    w.omega_band * slice.v_band * band
        + w.omega_beam * slice.v_beam * beam
        + w.omega_comp * slice.v_comp * comp
}

/// Violation plus operation cost.
pub fn total_cost(violation: f64, operation: f64) -> f64 {
    violation + operation
}

/// Reporting-side system objective: weighted satisfaction minus weighted
/// cost summed over slices.
pub fn system_objective(sat_sums: &[f64], total_costs: &[f64], alpha: f64, beta: f64) -> f64 {
    debug_assert_eq!(sat_sums.len(), total_costs.len());
    sat_sums
        .iter()
        .zip(total_costs)
        .map(|(s, c)| alpha * s - beta * c)
        .sum()
}

/// Draws one task per airborne eVTOL, in eVTOL order.
pub fn generate_tasks(
    rng: &mut impl Rng,
    evtols: &[EvtolState],
    cfg: &TaskGenConfig,
) -> Result<Vec<TaskRequest>, WorkloadError> {
    cfg.validate()?;
    let mut tasks = Vec::new();
    for e in evtols.iter().filter(|e| e.is_airborne()) {
        tasks.push(TaskRequest {
            owner: e.id,
            data_size: rng.random_range(cfg.data_range[0]..=cfg.data_range[1]),
            cycles: rng.random_range(cfg.cycles_range[0]..=cfg.cycles_range[1]),
            deadline: rng.random_range(cfg.deadline_range[0]..=cfg.deadline_range[1]),
            dynamics: OwnerDynamics {
                position: e.position,
                v_y: e.v_y,
                v_z: e.v_z,
            },
        });
    }
    Ok(tasks)
}
