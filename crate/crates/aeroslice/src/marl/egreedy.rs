//! One-step lookahead greedy controller with epsilon exploration.
//!
//! For its own turn each agent enumerates every action combination on a
//! small per-component grid, tries each one on a cloned world with all
//! other agents held at zero, and keeps the combination with the strictly
//! best immediate reward (first winner on ties). Exploration substitutes a
//! uniformly drawn grid action.

use rand::Rng;

use super::{linear_schedule, stream_rng, Environment, EpisodeRecord, JointAction, StepMetrics};

#[derive(Clone, Debug)]
pub struct GreedyConfig {
    /// Candidate values per action component.
    pub grid: Vec<f64>,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        Self {
            grid: vec![-1.0, 0.0, 1.0],
            epsilon_start: 1.0,
            epsilon_end: 0.05,
        }
    }
}

fn decode_combo(mut code: usize, grid: &[f64], dims: usize) -> Vec<f64> {
    let g = grid.len();
    let mut out = vec![0.0; dims];
    for d in (0..dims).rev() {
        out[d] = grid[code % g];
        code /= g;
    }
    out
}

/// Best immediate-reward action for one agent, probed on clones of the
/// current world with every other agent at zero.
pub fn greedy_lookahead_action<E: Environment>(env: &E, agent: usize, grid: &[f64]) -> Vec<f64> {
    assert!(!grid.is_empty(), "empty action grid");
    let dims = env.action_dim();
    let combos = grid.len().pow(dims as u32);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for code in 0..combos {
        let action = decode_combo(code, grid, dims);
        let mut trial = env.clone();
        let mut joint = JointAction::zeros(env.agent_count(), dims);
        joint.per_agent[agent].clone_from(&action);
        let reward = trial.step(&joint).rewards[agent];
        if best.as_ref().map_or(true, |(b, _)| reward > *b) {
            best = Some((reward, action));
        }
    }
    best.expect("nonempty grid").1
}

/// Runs the greedy controller for a fixed schedule of episodes.
pub fn run_greedy<E: Environment>(
    env: &mut E,
    cfg: &GreedyConfig,
    episodes: usize,
    steps: usize,
    seed: u64,
) -> Vec<EpisodeRecord> {
    let mut rng = stream_rng(seed, 2);
    let agents = env.agent_count();
    let dims = env.action_dim();
    let mut records = Vec::with_capacity(episodes);
    for episode in 0..episodes {
        let epsilon = linear_schedule(cfg.epsilon_start, cfg.epsilon_end, episode, episodes);
        env.reset();
        let mut metrics: Vec<StepMetrics> = Vec::with_capacity(steps);
        for _ in 0..steps {
            let per_agent: Vec<Vec<f64>> = (0..agents)
                .map(|agent| {
                    if rng.random::<f64>() < epsilon {
                        (0..dims)
                            .map(|_| cfg.grid[rng.random_range(0..cfg.grid.len())])
                            .collect()
                    } else {
                        greedy_lookahead_action(env, agent, &cfg.grid)
                    }
                })
                .collect();
            metrics.push(env.step(&JointAction { per_agent }).metrics);
        }
        records.push(EpisodeRecord::from_steps(&metrics));
    }
    records
}
