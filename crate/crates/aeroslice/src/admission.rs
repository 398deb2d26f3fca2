//! Access control ahead of slice orchestration: pairing each eVTOL with a
//! base station and slice, and pre-assessing how much of the pool the
//! upcoming workload actually needs.
//!
//! Pairing ranks every reachable (station, slice) candidate by a blend of
//! deadline urgency and proximity, then admits greedily under the station
//! and slice capacity limits. Pre-assessment averages the outstanding
//! demands and finds the smallest pool fraction, in 1/l_max increments,
//! that would serve the averaged task everywhere in time.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::airspace::{BaseStation, BsId, EvtolId};
use crate::radio::{self, LinkGeometry, RadioParams};
use crate::slices::{ResourcePool, SliceId, SliceState};
use crate::workload::{self, TaskRequest};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdmissionError {
    #[error("no access candidates to rank")]
    NoCandidates,
    #[error("candidate has nonpositive delay or distance")]
    InvalidCandidate,
    #[error("blend weight {0} outside [0, 1]")]
    BlendOutOfRange(f64),
}

/// One committed eVTOL attachment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pairing {
    pub evtol: EvtolId,
    pub bs: BsId,
    pub slice: SliceId,
    pub priority: f64,
}

/// Result of an access round: who got in where, and who did not.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PairingOutcome {
    pub pairings: Vec<Pairing>,
    pub unpaired: Vec<EvtolId>,
}

/// Outcome of a pre-assessment pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssessmentResult {
    /// Granted reservation level, out of l_max.
    pub level: u32,
    /// Whether the averaged demand fits within the granted level.
    pub satisfied: bool,
}

/// One access option for a specific eVTOL.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CandidateLink {
    pub bs: BsId,
    pub slice: SliceId,
    /// Estimated completion time through this option, seconds.
    pub delay: f64,
    /// Link distance, metres.
    pub distance: f64,
}

/// Ranks one eVTOL's candidates: each scores the blend of deadline urgency
/// `deadline / delay` and proximity `1 / distance`, normalized so the
/// returned weights sum to one.
pub fn match_priorities(
    deadline: f64,
    candidates: &[CandidateLink],
    gamma: f64,
) -> Result<Vec<f64>, AdmissionError> {
    if candidates.is_empty() {
        return Err(AdmissionError::NoCandidates);
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(AdmissionError::BlendOutOfRange(gamma));
    }
    let mut scores = Vec::with_capacity(candidates.len());
    for c in candidates {
        if !(c.delay > 0.0) || !(c.distance > 0.0) {
            return Err(AdmissionError::InvalidCandidate);
        }
        scores.push(gamma * (deadline / c.delay) + (1.0 - gamma) / c.distance);
    }
    let total: f64 = scores.iter().sum();
    if total > 0.0 {
        for s in &mut scores {
            *s /= total;
        }
    } else {
        let uniform = 1.0 / scores.len() as f64;
        scores.iter_mut().for_each(|s| *s = uniform);
    }
    Ok(scores)
}

fn estimated_delay(
    task: &TaskRequest,
    bs: &BaseStation,
    slice: &SliceState,
    pool: &ResourcePool,
    params: &RadioParams,
) -> Option<(f64, f64)> {
    let geometry = LinkGeometry::from_points(&task.dynamics.position, &bs.position).ok()?;
    let clear_sinr = params.tx_power * params.gain_sq(task.owner, bs.id) / params.noise_power;
    let rate = radio::achievable_rate(&geometry, slice, pool, clear_sinr).unwrap_or(0.0);
    let transmission = workload::transmission_delay(task.data_size, rate);
    let computation = workload::computation_delay(task.cycles, slice.v_comp, pool);
    Some((
        workload::total_delay(transmission, computation),
        geometry.distance,
    ))
}

/// Pairs every requesting eVTOL with a base station and slice.
///
/// Tasks are visited in eVTOL order. Each eVTOL tries its candidates by
/// descending priority, skipping stations and slices already at capacity;
/// whoever exhausts all candidates stays unpaired. The delay estimate uses
/// an interference-free link, since the concurrent link set is not known
/// until pairing completes.
pub fn pair_all(
    tasks: &[TaskRequest],
    bss: &[BaseStation],
    slices: &[SliceState],
    pool: &ResourcePool,
    params: &RadioParams,
    gamma: f64,
) -> Result<PairingOutcome, AdmissionError> {
    let mut outcome = PairingOutcome::default();
    let mut bs_load: BTreeMap<BsId, usize> = BTreeMap::new();
    let mut slice_load: BTreeMap<SliceId, usize> = BTreeMap::new();

    for task in tasks {
        let mut candidates = Vec::new();
        for bs in bss {
            for slice in slices.iter().filter(|s| s.is_active()) {
                if let Some((delay, distance)) = estimated_delay(task, bs, slice, pool, params) {
                    candidates.push(CandidateLink {
                        bs: bs.id,
                        slice: slice.id,
                        delay: delay.max(f64::MIN_POSITIVE),
                        distance,
                    });
                }
            }
        }
        if candidates.is_empty() {
            outcome.unpaired.push(task.owner);
            continue;
        }
        let priorities = match_priorities(task.deadline, &candidates, gamma)?;
        let mut order: Vec<usize> = (0..candidates.len()).collect();
        order.sort_by(|&a, &b| {
            priorities[b]
                .partial_cmp(&priorities[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| {
                    (candidates[a].bs, candidates[a].slice)
                        .cmp(&(candidates[b].bs, candidates[b].slice))
                })
        });

        let mut admitted = false;
        for idx in order {
            let c = &candidates[idx];
            let bs_cap = bss
                .iter()
                .find(|b| b.id == c.bs)
                .map_or(0, |b| b.max_attachments);
            let slice_cap = slices
                .iter()
                .find(|s| s.id == c.slice)
                .map_or(0, |s| s.max_attachments);
            if bs_load.get(&c.bs).copied().unwrap_or(0) >= bs_cap {
                continue;
            }
            if slice_load.get(&c.slice).copied().unwrap_or(0) >= slice_cap {
                continue;
            }
            *bs_load.entry(c.bs).or_insert(0) += 1;
            *slice_load.entry(c.slice).or_insert(0) += 1;
            outcome.pairings.push(Pairing {
                evtol: task.owner,
                bs: c.bs,
                slice: c.slice,
                priority: priorities[idx],
            });
            admitted = true;
            break;
        }
        if !admitted {
            outcome.unpaired.push(task.owner);
        }
    }
    Ok(outcome)
}

fn nearest_station(task: &TaskRequest, bss: &[BaseStation]) -> Option<BsId> {
    let mut best: Option<(f64, BsId)> = None;
    for bs in bss {
        let d = task.dynamics.position.distance_to(&bs.position);
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, bs.id));
        }
    }
    best.map(|(_, id)| id)
}

/// Finds the smallest reservation level, in increments of the pool over
/// `l_max`, whose even split across active slices completes the averaged
/// outstanding task in time everywhere. Each task is evaluated at its own
/// position against its nearest station, with every other task transmitting
/// concurrently. Returns `l_max` unsatisfied when even the full pool falls
/// short.
pub fn pre_assess(
    tasks: &[TaskRequest],
    pool: &ResourcePool,
    l_max: u32,
    slices: &[SliceState],
    bss: &[BaseStation],
    params: &RadioParams,
) -> AssessmentResult {
    if tasks.is_empty() {
        return AssessmentResult {
            level: 1,
            satisfied: true,
        };
    }
    let active = slices.iter().filter(|s| s.is_active()).count();
    if active == 0 || bss.is_empty() || l_max == 0 {
        return AssessmentResult {
            level: l_max.max(1),
            satisfied: false,
        };
    }

    let n = tasks.len() as f64;
    let mean_data = tasks.iter().map(|t| t.data_size).sum::<f64>() / n;
    let mean_cycles = tasks.iter().map(|t| t.cycles).sum::<f64>() / n;
    let mean_deadline = tasks.iter().map(|t| t.deadline).sum::<f64>() / n;

    let nearest: Vec<BsId> = tasks
        .iter()
        .map(|t| nearest_station(t, bss).expect("stations present"))
        .collect();
    let links: Vec<(EvtolId, BsId)> = tasks
        .iter()
        .zip(&nearest)
        .map(|(t, &b)| (t.owner, b))
        .collect();

    for level in 1..=l_max {
        let share = level as f64 / l_max as f64 / active as f64;
        let all_served = tasks.iter().zip(&nearest).all(|(task, &bs_id)| {
            let bs = bss.iter().find(|b| b.id == bs_id).expect("nearest exists");
            let geometry = match LinkGeometry::from_points(&task.dynamics.position, &bs.position) {
                Ok(g) => g,
                Err(_) => return false,
            };
            let sinr_value = radio::sinr(task.owner, bs_id, &links, params);
            let trial = SliceState {
                v_band: share,
                v_beam: share,
                v_comp: share,
                ..SliceState::idle(SliceId(u32::MAX), 1)
            };
            let rate = radio::achievable_rate(&geometry, &trial, pool, sinr_value).unwrap_or(0.0);
            let delay = workload::total_delay(
                workload::transmission_delay(mean_data, rate),
                workload::computation_delay(mean_cycles, share, pool),
            );
            delay <= mean_deadline
        });
        if all_served {
            return AssessmentResult {
                level,
                satisfied: true,
            };
        }
    }
    AssessmentResult {
        level: l_max,
        satisfied: false,
    }
}
