//! Multi-agent controllers and the slice-orchestration world they share.
//!
//! One agent drives one slice. Each step it emits a three-component scaling
//! action in [-1, 1] (bandwidth, beam budget, compute); the world applies
//! the deltas, keeps allocations feasible, admits the step's tasks and
//! scores every slice. Three controllers are provided: a deterministic-
//! policy-gradient ensemble with centralized critics, a one-step lookahead
//! greedy baseline, and independent Q-learners over a discretized grid.

pub mod env;

mod egreedy;
mod maddpg;
mod madqn;

pub use egreedy::{greedy_lookahead_action, run_greedy, GreedyConfig};
pub use env::{PairingPolicy, SliceWorld, WorldConfig, WorldError};
pub use maddpg::{train_maddpg, MaddpgConfig, MaddpgEnsemble};
pub use madqn::{train_madqn, MadqnConfig, MadqnLearner};

/// One action vector per agent, each component in [-1, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct JointAction {
    pub per_agent: Vec<Vec<f64>>,
}

impl JointAction {
    pub fn zeros(agents: usize, dim: usize) -> Self {
        Self {
            per_agent: vec![vec![0.0; dim]; agents],
        }
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.per_agent.iter().flatten().copied().collect()
    }
}

/// Per-slice scores for one step.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceStepMetrics {
    pub reward: f64,
    pub sat_sum: f64,
    pub sat_mean: f64,
    pub op_cost: f64,
    pub vio_cost: f64,
    pub fractions: [f64; 3],
}

/// Everything observable about one world step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepMetrics {
    pub slices: Vec<SliceStepMetrics>,
    pub unpaired_tasks: usize,
    /// Share of the pool held open for slices: the granted reservation
    /// level over the ladder height, or one when pre-assessment is off.
    pub reserved_ratio: f64,
}

pub struct EnvStep {
    pub observations: Vec<Vec<f64>>,
    pub rewards: Vec<f64>,
    pub metrics: StepMetrics,
}

/// A resettable, cloneable multi-agent world. Cloning must reproduce the
/// full state, randomness included, so controllers can probe candidate
/// actions on a copy.
pub trait Environment: Clone {
    fn agent_count(&self) -> usize;
    fn observation_dim(&self) -> usize;
    fn action_dim(&self) -> usize;
    fn reset(&mut self) -> Vec<Vec<f64>>;
    fn step(&mut self, actions: &JointAction) -> EnvStep;
}

/// Concatenates per-agent observations into the critic's global view.
pub fn global_state(observations: &[Vec<f64>]) -> Vec<f64> {
    observations.iter().flatten().copied().collect()
}

/// Linear interpolation from `start` at episode zero to `end` at the final
/// episode.
pub(crate) fn linear_schedule(start: f64, end: f64, episode: usize, episodes: usize) -> f64 {
    if episodes <= 1 {
        start
    } else if episode >= episodes - 1 {
        end
    } else {
        start + (end - start) * episode as f64 / (episodes - 1) as f64
    }
}

/// Generator for one named random stream of a run. The world itself uses
/// stream zero, so it sees the raw seed; learners draw their init,
/// exploration and sampling randomness from distinct streams.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(
        seed.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
    )
}

/// Per-slice aggregates over one episode: rewards are summed, everything
/// else is a per-step mean.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceEpisodeStats {
    pub reward: f64,
    pub sat_sum: f64,
    pub sat_mean: f64,
    pub op_cost: f64,
    pub vio_cost: f64,
    pub band_frac: f64,
    pub beam_frac: f64,
    pub comp_frac: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeRecord {
    pub slices: Vec<SliceEpisodeStats>,
    pub unpaired: u64,
    pub reserved_ratio: f64,
}

impl EpisodeRecord {
    pub fn from_steps(steps: &[StepMetrics]) -> Self {
        let Some(first) = steps.first() else {
            return Self {
                slices: Vec::new(),
                unpaired: 0,
                reserved_ratio: 0.0,
            };
        };
        let n = steps.len() as f64;
        let slices = (0..first.slices.len())
            .map(|q| {
                let mut s = SliceEpisodeStats {
                    reward: 0.0,
                    sat_sum: 0.0,
                    sat_mean: 0.0,
                    op_cost: 0.0,
                    vio_cost: 0.0,
                    band_frac: 0.0,
                    beam_frac: 0.0,
                    comp_frac: 0.0,
                };
                for step in steps {
                    let m = &step.slices[q];
                    s.reward += m.reward;
                    s.sat_sum += m.sat_sum / n;
                    s.sat_mean += m.sat_mean / n;
                    s.op_cost += m.op_cost / n;
                    s.vio_cost += m.vio_cost / n;
                    s.band_frac += m.fractions[0] / n;
                    s.beam_frac += m.fractions[1] / n;
                    s.comp_frac += m.fractions[2] / n;
                }
                s
            })
            .collect();
        Self {
            slices,
            unpaired: steps.iter().map(|s| s.unpaired_tasks as u64).sum(),
            reserved_ratio: steps.iter().map(|s| s.reserved_ratio).sum::<f64>() / n,
        }
    }

    /// Episode reward summed over slices.
    pub fn system_reward(&self) -> f64 {
        self.slices.iter().map(|s| s.reward).sum()
    }
}

/// Rolls episodes with every action held at zero. Useful as a
/// controller-free baseline that isolates scenario effects.
pub fn run_fixed<E: Environment>(env: &mut E, episodes: usize, steps: usize) -> Vec<EpisodeRecord> {
    let actions = JointAction::zeros(env.agent_count(), env.action_dim());
    (0..episodes)
        .map(|_| {
            env.reset();
            let metrics: Vec<StepMetrics> =
                (0..steps).map(|_| env.step(&actions).metrics).collect();
            EpisodeRecord::from_steps(&metrics)
        })
        .collect()
}
