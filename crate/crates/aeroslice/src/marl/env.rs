//! The slice-orchestration world.
//!
//! Each step: scaling actions land on the slices and allocations are
//! projected back to feasibility, traffic advances along its corridors,
//! small-scale fading redraws, every airborne eVTOL raises a task, an
//! admission round pairs tasks with stations and slices (optionally gated
//! by demand pre-assessment), and finally every slice is scored on the
//! tasks it served. All randomness flows through one owned generator, and
//! resetting starts a new episode without reseeding it, so a seed pins an
//! entire run while successive episodes still see fresh draws.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::admission::{self, PairingOutcome};
use crate::airspace::{
    phase_controller, step_kinematics, AirspaceError, BaseStation, BsId, EvtolId, EvtolState,
    FlightPhase, LayerConfig,
};
use crate::radio::{self, LinkGeometry, RadioError, RadioParams};
use crate::slices::{
    apply_scaling, dispose_slice, initialize_slice, project_allocations_capped, ResourcePool,
    SliceError, SliceId, SliceState,
};
use crate::workload::{self, CostWeights, TaskGenConfig, TaskRequest, WorkloadError};

use super::{EnvStep, Environment, JointAction, SliceStepMetrics, StepMetrics};

/// How tasks are matched to stations and slices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingPolicy {
    /// Rank candidates by blended urgency and proximity, admit greedily.
    Priority,
    /// Uniform choice among candidates with free capacity.
    Random,
}

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("scenario needs at least one {0}")]
    Missing(&'static str),
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("{layers} layers but {spawns} spawn lists")]
    SpawnMismatch { layers: usize, spawns: usize },
    #[error(transparent)]
    Pool(#[from] SliceError),
    #[error(transparent)]
    Radio(#[from] RadioError),
    #[error(transparent)]
    Workload(#[from] WorkloadError),
    #[error(transparent)]
    Airspace(#[from] AirspaceError),
}

/// Everything that defines a scenario.
#[derive(Clone, Debug)]
pub struct WorldConfig {
    /// Step length, seconds.
    pub dt: f64,
    pub layers: Vec<LayerConfig>,
    /// Crossing coordinates of the eVTOLs spawned into each layer.
    pub spawn_x: Vec<Vec<f64>>,
    /// Corridor coordinate every eVTOL of a layer starts from.
    pub spawn_y: Vec<f64>,
    /// Vertical speed during takeoff and landing, metres per second.
    pub climb_rate: f64,
    pub stations: Vec<BaseStation>,
    pub radio: RadioParams,
    /// Redraw per-link channel gains each step (unit-mean exponential).
    pub fading: bool,
    pub pool: ResourcePool,
    pub slice_count: u32,
    pub slice_max_attachments: usize,
    /// Largest allocation change one action component can make per step.
    pub step_scale: f64,
    pub taskgen: TaskGenConfig,
    pub costs: CostWeights,
    /// Height of the reservation ladder used by pre-assessment.
    pub l_max: u32,
    /// Steps between admission rounds.
    pub admission_period: usize,
    /// Gate the reservable pool share on assessed demand.
    pub preassess: bool,
    pub pairing: PairingPolicy,
}

#[derive(Clone, Debug)]
pub struct SliceWorld {
    cfg: WorldConfig,
    radio: RadioParams,
    evtols: Vec<EvtolState>,
    slices: Vec<SliceState>,
    rng: ChaCha8Rng,
    step_index: usize,
    level_cap: f64,
    last_level: u32,
    pairings: PairingOutcome,
    last_costs: Vec<f64>,
    last_sats: Vec<f64>,
}

impl SliceWorld {
    pub fn new(cfg: WorldConfig, seed: u64) -> Result<Self, WorldError> {
        if cfg.layers.is_empty() {
            return Err(WorldError::Missing("layer"));
        }
        if cfg.spawn_x.len() != cfg.layers.len() || cfg.spawn_y.len() != cfg.layers.len() {
            return Err(WorldError::SpawnMismatch {
                layers: cfg.layers.len(),
                spawns: cfg.spawn_x.len().min(cfg.spawn_y.len()),
            });
        }
        if cfg.spawn_x.iter().map(Vec::len).sum::<usize>() == 0 {
            return Err(WorldError::Missing("eVTOL"));
        }
        if cfg.stations.is_empty() {
            return Err(WorldError::Missing("base station"));
        }
        if cfg.slice_count == 0 {
            return Err(WorldError::Missing("slice"));
        }
        for (name, v) in [
            ("dt", cfg.dt),
            ("climb_rate", cfg.climb_rate),
            ("step_scale", cfg.step_scale),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(WorldError::NonPositive(name));
            }
        }
        if cfg.slice_max_attachments == 0 {
            return Err(WorldError::NonPositive("slice_max_attachments"));
        }
        if cfg.admission_period == 0 {
            return Err(WorldError::NonPositive("admission_period"));
        }
        if cfg.l_max == 0 {
            return Err(WorldError::NonPositive("l_max"));
        }
        cfg.pool.validate()?;
        cfg.radio.validate()?;
        cfg.costs.validate()?;
        cfg.taskgen.validate()?;

        let slice_count = cfg.slice_count;
        let mut world = Self {
            radio: cfg.radio.clone(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            evtols: Vec::new(),
            slices: (0..slice_count)
                .map(|i| SliceState::idle(SliceId(i), cfg.slice_max_attachments))
                .collect(),
            step_index: 0,
            level_cap: 1.0,
            last_level: cfg.l_max,
            pairings: PairingOutcome::default(),
            last_costs: vec![0.0; slice_count as usize],
            last_sats: vec![0.0; slice_count as usize],
            cfg,
        };
        world.start_episode();
        Ok(world)
    }

    pub fn config(&self) -> &WorldConfig {
        &self.cfg
    }

    pub fn slices(&self) -> &[SliceState] {
        &self.slices
    }

    pub fn evtols(&self) -> &[EvtolState] {
        &self.evtols
    }

    /// Reservation level granted by the most recent assessment.
    pub fn granted_level(&self) -> u32 {
        self.last_level
    }

    fn start_episode(&mut self) {
        self.evtols.clear();
        let mut id = 0;
        for (layer, xs) in self.cfg.spawn_x.iter().enumerate() {
            for &x in xs {
                let mut e = EvtolState::grounded(EvtolId(id), x, self.cfg.spawn_y[layer], layer);
                e.phase = FlightPhase::Takeoff;
                e.v_z = self.cfg.climb_rate;
                self.evtols.push(e);
                id += 1;
            }
        }
        let preset = [1.0 / self.cfg.slice_count as f64; 3];
        for s in &mut self.slices {
            if s.is_active() {
                *s = dispose_slice(s, 0).expect("no live tasks between episodes");
            }
            *s = initialize_slice(s, preset).expect("slice idle at episode start");
        }
        project_allocations_capped(&mut self.slices, 1.0);
        self.level_cap = 1.0;
        self.last_level = self.cfg.l_max;
        self.pairings = PairingOutcome::default();
        self.last_costs.iter_mut().for_each(|c| *c = 0.0);
        self.last_sats.iter_mut().for_each(|s| *s = 0.0);
        self.step_index = 0;
    }

    fn observations(&self) -> Vec<Vec<f64>> {
        self.slices
            .iter()
            .enumerate()
            .map(|(q, s)| {
                let f = s.fractions();
                vec![f[0], f[1], f[2], self.last_costs[q], self.last_sats[q]]
            })
            .collect()
    }

    fn redraw_fading(&mut self) {
        for e in &self.evtols {
            for b in &self.cfg.stations {
                let u: f64 = self.rng.random();
                let gain = -(1.0 - u).ln();
                self.radio.channel_gain_sq.insert((e.id, b.id), gain);
            }
        }
    }

    fn random_pairing(&mut self, tasks: &[TaskRequest]) -> PairingOutcome {
        let mut outcome = PairingOutcome::default();
        let mut bs_load: BTreeMap<BsId, usize> = BTreeMap::new();
        let mut slice_load: BTreeMap<SliceId, usize> = BTreeMap::new();
        for task in tasks {
            let mut options = Vec::new();
            for bs in &self.cfg.stations {
                if bs_load.get(&bs.id).copied().unwrap_or(0) >= bs.max_attachments {
                    continue;
                }
                for s in self.slices.iter().filter(|s| s.is_active()) {
                    if slice_load.get(&s.id).copied().unwrap_or(0) >= s.max_attachments {
                        continue;
                    }
                    options.push((bs.id, s.id));
                }
            }
            if options.is_empty() {
                outcome.unpaired.push(task.owner);
                continue;
            }
            let (bs, slice) = options[self.rng.random_range(0..options.len())];
            *bs_load.entry(bs).or_insert(0) += 1;
            *slice_load.entry(slice).or_insert(0) += 1;
            outcome.pairings.push(admission::Pairing {
                evtol: task.owner,
                bs,
                slice,
                priority: 0.0,
            });
        }
        outcome
    }

    fn admission_round(&mut self, tasks: &[TaskRequest]) {
        if self.cfg.preassess {
            let assessed = admission::pre_assess(
                tasks,
                &self.cfg.pool,
                self.cfg.l_max,
                &self.slices,
                &self.cfg.stations,
                &self.radio,
            );
            self.last_level = assessed.level;
            self.level_cap = f64::from(assessed.level) / f64::from(self.cfg.l_max);
            project_allocations_capped(&mut self.slices, self.level_cap);
        }
        self.pairings = match self.cfg.pairing {
            PairingPolicy::Priority => admission::pair_all(
                tasks,
                &self.cfg.stations,
                &self.slices,
                &self.cfg.pool,
                &self.radio,
                self.cfg.costs.gamma_match,
            )
            .expect("candidate geometry validated at construction"),
            PairingPolicy::Random => self.random_pairing(tasks),
        };
        let mut attached: BTreeMap<SliceId, Vec<EvtolId>> = BTreeMap::new();
        for p in &self.pairings.pairings {
            attached.entry(p.slice).or_default().push(p.evtol);
        }
        for s in &mut self.slices {
            s.attached = attached.remove(&s.id).unwrap_or_default().into_iter().collect();
        }
    }

    fn score_slices(&self, tasks: &[TaskRequest]) -> (Vec<SliceStepMetrics>, usize) {
        let by_owner: BTreeMap<EvtolId, &TaskRequest> =
            tasks.iter().map(|t| (t.owner, t)).collect();
        let links: Vec<(EvtolId, BsId)> = self
            .pairings
            .pairings
            .iter()
            .filter(|p| by_owner.contains_key(&p.evtol))
            .map(|p| (p.evtol, p.bs))
            .collect();

        let mut served = 0;
        let metrics = self
            .slices
            .iter()
            .map(|slice| {
                let mut sats = Vec::new();
                let mut delays = Vec::new();
                let mut deadlines = Vec::new();
                for p in self.pairings.pairings.iter().filter(|p| p.slice == slice.id) {
                    let Some(task) = by_owner.get(&p.evtol) else {
                        continue;
                    };
                    let station = self
                        .cfg
                        .stations
                        .iter()
                        .find(|b| b.id == p.bs)
                        .expect("paired station exists");
                    let rate = LinkGeometry::from_points(&task.dynamics.position, &station.position)
                        .ok()
                        .and_then(|g| {
                            let s = radio::sinr(p.evtol, p.bs, &links, &self.radio);
                            radio::achievable_rate(&g, slice, &self.cfg.pool, s).ok()
                        })
                        .unwrap_or(0.0);
                    let delay = workload::total_delay(
                        workload::transmission_delay(task.data_size, rate),
                        workload::computation_delay(task.cycles, slice.v_comp, &self.cfg.pool),
                    );
                    sats.push(workload::satisfaction(task.deadline, delay, self.cfg.costs.eta));
                    delays.push(delay);
                    deadlines.push(task.deadline);
                    served += 1;
                }
                let sat_sum = workload::slice_satisfaction(&sats);
                let sat_mean = workload::slice_satisfaction_mean(&sats);
                let op_cost = workload::operation_cost(slice, &self.cfg.pool, &self.cfg.costs);
                let vio_cost = workload::violation_cost(&delays, &deadlines, self.cfg.costs.omega_v);
                let total = workload::total_cost(vio_cost, op_cost);
                let reward = self.cfg.costs.omega_1 * (sat_mean - 0.5) - self.cfg.costs.omega_2 * total;
                SliceStepMetrics {
                    reward,
                    sat_sum,
                    sat_mean,
                    op_cost,
                    vio_cost,
                    fractions: slice.fractions(),
                }
            })
            .collect();
        (metrics, tasks.len() - served)
    }
}

impl Environment for SliceWorld {
    fn agent_count(&self) -> usize {
        self.cfg.slice_count as usize
    }

    fn observation_dim(&self) -> usize {
        5
    }

    fn action_dim(&self) -> usize {
        3
    }

    fn reset(&mut self) -> Vec<Vec<f64>> {
        self.start_episode();
        self.observations()
    }

    fn step(&mut self, actions: &JointAction) -> EnvStep {
        assert_eq!(actions.per_agent.len(), self.agent_count(), "agent count");
        for (slice, a) in self.slices.iter_mut().zip(&actions.per_agent) {
            assert_eq!(a.len(), 3, "action width");
            apply_scaling(slice, [a[0], a[1], a[2]], self.cfg.step_scale);
        }
        project_allocations_capped(&mut self.slices, self.level_cap);

        for e in &mut self.evtols {
            let moved = step_kinematics(e, self.cfg.dt);
            *e = phase_controller(&moved, &self.cfg.layers, self.cfg.climb_rate)
                .expect("layers validated at construction");
        }

        if self.cfg.fading {
            self.redraw_fading();
        }

        let tasks = workload::generate_tasks(&mut self.rng, &self.evtols, &self.cfg.taskgen)
            .expect("task ranges validated at construction");

        if self.step_index % self.cfg.admission_period == 0 {
            self.admission_round(&tasks);
        }

        let (slice_metrics, unpaired) = self.score_slices(&tasks);
        for (q, m) in slice_metrics.iter().enumerate() {
            self.last_costs[q] = workload::total_cost(m.vio_cost, m.op_cost);
            self.last_sats[q] = m.sat_sum;
        }
        self.step_index += 1;

        let rewards: Vec<f64> = slice_metrics.iter().map(|m| m.reward).collect();
        let reserved_ratio = if self.cfg.preassess {
            f64::from(self.last_level) / f64::from(self.cfg.l_max)
        } else {
            1.0
        };
        EnvStep {
            observations: self.observations(),
            rewards,
            metrics: StepMetrics {
                slices: slice_metrics,
                unpaired_tasks: unpaired,
                reserved_ratio,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pool() -> ResourcePool {
        ResourcePool {
            s_beam: 2e6,
            ..ResourcePool::default()
        }
    }

    fn corridor_config(steps: usize, low_speed: f64, high_speed: f64) -> WorldConfig {
        let half = steps as f64 / 2.0;
        WorldConfig {
            dt: 1.0,
            layers: vec![
                LayerConfig {
                    altitude: 100.0,
                    prescribed_speed: low_speed,
                },
                LayerConfig {
                    altitude: 200.0,
                    prescribed_speed: high_speed,
                },
            ],
            spawn_x: vec![vec![-1200.0, -100.0, 1000.0], vec![-1000.0, 100.0, 1200.0]],
            spawn_y: vec![4000.0 - low_speed * half, 4000.0 - high_speed * half],
            climb_rate: 10.0,
            stations: vec![
                BaseStation::new(BsId(0), -1500.0, 4000.0, 3),
                BaseStation::new(BsId(1), 0.0, 4000.0, 3),
                BaseStation::new(BsId(2), 1500.0, 4000.0, 3),
            ],
            radio: RadioParams::default(),
            fading: true,
            pool: pool(),
            slice_count: 3,
            slice_max_attachments: 2,
            step_scale: 0.1,
            taskgen: TaskGenConfig::default(),
            costs: CostWeights::normalized_for(&pool()),
            l_max: 10,
            admission_period: 1,
            preassess: false,
            pairing: PairingPolicy::Priority,
        }
    }

    fn patterned_action(step: usize, agents: usize) -> JointAction {
        JointAction {
            per_agent: (0..agents)
                .map(|a| {
                    (0..3)
                        .map(|d| ((step + a + d) % 3) as f64 - 1.0)
                        .collect()
                })
                .collect(),
        }
    }

    #[test]
    fn same_seed_and_actions_reproduce_rewards_bitwise() {
        let mut a = SliceWorld::new(corridor_config(100, 30.0, 50.0), 11).unwrap();
        let mut b = SliceWorld::new(corridor_config(100, 30.0, 50.0), 11).unwrap();
        a.reset();
        b.reset();
        for step in 0..25 {
            let act = patterned_action(step, 3);
            let ra = a.step(&act);
            let rb = b.step(&act);
            for (x, y) in ra.rewards.iter().zip(&rb.rewards) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
            assert_eq!(ra.metrics, rb.metrics);
        }
    }

    #[test]
    fn cloned_world_steps_identically() {
        let mut a = SliceWorld::new(corridor_config(100, 30.0, 50.0), 5).unwrap();
        a.reset();
        for step in 0..7 {
            a.step(&patterned_action(step, 3));
        }
        let mut b = a.clone();
        for step in 0..10 {
            let act = patterned_action(step, 3);
            let ra = a.step(&act);
            let rb = b.step(&act);
            assert_eq!(ra.metrics, rb.metrics);
            assert_eq!(ra.observations, rb.observations);
        }
    }

    #[test]
    fn resetting_continues_the_random_stream() {
        let zero = JointAction::zeros(3, 3);
        let run = |env: &mut SliceWorld| -> Vec<f64> {
            env.reset();
            (0..5).map(|_| env.step(&zero).rewards[0]).collect()
        };
        let mut a = SliceWorld::new(corridor_config(100, 30.0, 50.0), 3).unwrap();
        let ep1 = run(&mut a);
        let ep2 = run(&mut a);
        let mut b = SliceWorld::new(corridor_config(100, 30.0, 50.0), 3).unwrap();
        assert_eq!(run(&mut b), ep1);
        assert_eq!(run(&mut b), ep2);
        assert_ne!(ep1, ep2);
    }

    #[test]
    fn micro_world_matches_hand_formulas() {
        use rand::SeedableRng;
        let cfg = WorldConfig {
            layers: vec![LayerConfig {
                altitude: 100.0,
                prescribed_speed: 30.0,
            }],
            spawn_x: vec![vec![-100.0]],
            spawn_y: vec![3800.0],
            stations: vec![BaseStation::new(BsId(0), 0.0, 4000.0, 3)],
            slice_count: 1,
            fading: false,
            ..corridor_config(100, 30.0, 50.0)
        };
        let seed = 21;
        let mut world = SliceWorld::new(cfg, seed).unwrap();
        world.reset();
        let mut oracle_rng = ChaCha8Rng::seed_from_u64(seed);
        let zero = JointAction::zeros(1, 3);

        let mut z: f64 = 0.0;
        let mut y: f64 = 3800.0;
        let mut v_y = 0.0;
        let mut v_z = 10.0;
        let ln2 = std::f64::consts::LN_2;
        let e = std::f64::consts::E;
        for step in 0..15 {
            let out = world.step(&zero);

            y += v_y;
            z += v_z;
            if z >= 100.0 {
                z = 100.0;
                v_z = 0.0;
                v_y = 30.0;
            }
            let data = oracle_rng.random_range(5.0..=20.0);
            let cycles = oracle_rng.random_range(10.0..=50.0);
            let deadline = oracle_rng.random_range(1.0..=5.0);

            let d = (100.0f64 * 100.0 + (y - 4000.0) * (y - 4000.0) + z * z).sqrt();
            let phi = (z / d).acos();
            let sinr: f64 = 0.1 / 1e-9;
            let gain = 16.0 / (6.76 * phi * (8.0 * ln2 * e).sqrt()) * 1.0 * 2e6;
            let rate = 1.0 * 100.0 * (1.0 + sinr).log2() * gain / (d * d);
            let delay = data / rate + cycles / 100.0;
            let sat = 1.0 / (1.0 + (-0.1 * (deadline - delay)).exp());
            let op = 3.0;
            let vio = if delay > deadline { 2.0 } else { 0.0 };
            let reward = 10.0 * (sat - 0.5) - (op + vio);

            let m = &out.metrics.slices[0];
            assert!((m.sat_sum - sat).abs() <= 1e-12, "step {step}");
            assert!((m.op_cost - op).abs() <= 1e-12, "step {step}");
            assert_eq!(m.vio_cost, vio, "step {step}");
            assert!((m.reward - reward).abs() <= 1e-12, "step {step}");
            assert_eq!(out.metrics.unpaired_tasks, 0);
            assert_eq!(world.evtols()[0].position.y, y, "step {step}");
            assert_eq!(world.evtols()[0].position.z, z, "step {step}");
            assert_eq!(out.observations[0][3], m.vio_cost + m.op_cost);
            assert_eq!(out.observations[0][4], m.sat_sum);
        }
    }

    #[test]
    fn observations_mirror_allocations() {
        let mut world = SliceWorld::new(corridor_config(100, 30.0, 50.0), 9).unwrap();
        world.reset();
        let mut act = JointAction::zeros(3, 3);
        act.per_agent[0] = vec![1.0, -1.0, 0.5];
        let out = world.step(&act);
        for (q, s) in world.slices().iter().enumerate() {
            let f = s.fractions();
            assert_eq!(out.observations[q][..3], f);
            assert_eq!(out.metrics.slices[q].fractions, f);
        }
    }

    #[test]
    fn slower_corridors_score_higher_satisfaction() {
        let steps = 60;
        let mean_sat = |low: f64, high: f64| -> f64 {
            let mut world = SliceWorld::new(corridor_config(steps, low, high), 17).unwrap();
            world.reset();
            let zero = JointAction::zeros(3, 3);
            let mut total = 0.0;
            for _ in 0..steps {
                let out = world.step(&zero);
                total += out
                    .metrics
                    .slices
                    .iter()
                    .map(|m| m.sat_sum)
                    .sum::<f64>();
            }
            total / steps as f64
        };
        let slow = mean_sat(10.0, 20.0);
        let fast = mean_sat(50.0, 60.0);
        assert!(
            slow > fast,
            "slow corridors {slow} should beat fast {fast}"
        );
    }

    #[test]
    fn preassessment_caps_reservations_under_a_large_pool() {
        let mut cfg = corridor_config(100, 30.0, 50.0);
        cfg.preassess = true;
        cfg.pool.scale = 5.0;
        let mut world = SliceWorld::new(cfg, 13).unwrap();
        world.reset();
        let up = JointAction {
            per_agent: vec![vec![1.0, 1.0, 1.0]; 3],
        };
        let mut min_level = u32::MAX;
        for _ in 0..70 {
            let out = world.step(&up);
            let ratio = out.metrics.reserved_ratio;
            assert!(ratio <= 1.0);
            min_level = min_level.min(world.granted_level());
            for axis in 0..3 {
                let total: f64 = out
                    .metrics
                    .slices
                    .iter()
                    .map(|m| m.fractions[axis])
                    .sum();
                assert!(total <= ratio + 1e-9, "axis {axis}: {total} vs {ratio}");
            }
        }
        assert!(min_level < 10, "assessment never dropped below max level");
    }

    #[test]
    fn excess_demand_is_reported_unpaired() {
        let mut cfg = corridor_config(100, 30.0, 50.0);
        cfg.spawn_x = vec![
            vec![-1200.0, -600.0, -100.0, 400.0, 1000.0],
            vec![-1000.0, -400.0, 100.0, 600.0, 1200.0],
        ];
        let mut world = SliceWorld::new(cfg, 29).unwrap();
        world.reset();
        let zero = JointAction::zeros(3, 3);
        let mut out = None;
        for _ in 0..25 {
            out = Some(world.step(&zero));
        }
        assert_eq!(out.unwrap().metrics.unpaired_tasks, 4);
    }

    #[test]
    fn degenerate_scenarios_are_rejected() {
        let mut no_layers = corridor_config(100, 30.0, 50.0);
        no_layers.layers.clear();
        no_layers.spawn_x.clear();
        no_layers.spawn_y.clear();
        assert!(matches!(
            SliceWorld::new(no_layers, 0),
            Err(WorldError::Missing("layer"))
        ));

        let mut mismatched = corridor_config(100, 30.0, 50.0);
        mismatched.spawn_x.pop();
        assert!(matches!(
            SliceWorld::new(mismatched, 0),
            Err(WorldError::SpawnMismatch { .. })
        ));

        let mut bad_dt = corridor_config(100, 30.0, 50.0);
        bad_dt.dt = 0.0;
        assert!(matches!(
            SliceWorld::new(bad_dt, 0),
            Err(WorldError::NonPositive("dt"))
        ));

        let mut no_stations = corridor_config(100, 30.0, 50.0);
        no_stations.stations.clear();
        assert!(matches!(
            SliceWorld::new(no_stations, 0),
            Err(WorldError::Missing("base station"))
        ));
    }
}
