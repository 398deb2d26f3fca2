//! Independent deep Q-learners over a discretized action space.
//!
//! Each agent owns one network scoring every combination of per-component
//! values from a shared palette. Combinations are indexed with the first
//! component most significant. Learning is standard temporal-difference
//! regression against a soft-tracked target network; behaviour is epsilon
//! greedy with a linear anneal.

use rand::Rng;

use crate::neuro::{
    soft_update, Adam, Gradients, Mlp, NeuroError, OutputActivation, ReplayBuffer, Transition,
};

use super::{global_state, linear_schedule, stream_rng, Environment, EpisodeRecord, JointAction};

#[derive(Clone, Debug)]
pub struct MadqnConfig {
    pub hidden: Vec<usize>,
    pub lr: f64,
    pub gamma: f64,
    pub tau: f64,
    pub buffer_capacity: usize,
    pub batch: usize,
    pub warmup: usize,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    /// Candidate values per action component.
    pub action_values: Vec<f64>,
}

impl Default for MadqnConfig {
    fn default() -> Self {
        Self {
            hidden: vec![64, 64],
            lr: 1e-4,
            gamma: 0.95,
            tau: 0.01,
            buffer_capacity: 15_000,
            batch: 64,
            warmup: 640,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            action_values: vec![-1.0, -0.5, 0.0, 0.5, 1.0],
        }
    }
}

/// Index of the combination nearest to `action`, first component most
/// significant; ties go to the smaller palette value.
pub fn encode_action(action: &[f64], values: &[f64]) -> usize {
    let mut code = 0;
    for &a in action {
        let digit = values
            .iter()
            .enumerate()
            .min_by(|(_, x), (_, y)| {
                (a - **x)
                    .abs()
                    .partial_cmp(&(a - **y).abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .map(|(i, _)| i)
            .expect("nonempty palette");
        code = code * values.len() + digit;
    }
    code
}

/// The action vector a combination index stands for.
pub fn decode_action(mut code: usize, values: &[f64], dims: usize) -> Vec<f64> {
    let g = values.len();
    let mut out = vec![0.0; dims];
    for d in (0..dims).rev() {
        out[d] = values[code % g];
        code /= g;
    }
    out
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

pub struct MadqnLearner {
    obs_dim: usize,
    action_dim: usize,
    nets: Vec<Mlp>,
    targets: Vec<Mlp>,
    opts: Vec<Adam>,
    cfg: MadqnConfig,
}

impl MadqnLearner {
    pub fn new(
        agents: usize,
        obs_dim: usize,
        action_dim: usize,
        cfg: MadqnConfig,
        rng: &mut impl Rng,
    ) -> Result<Self, NeuroError> {
        let combos = cfg.action_values.len().pow(action_dim as u32);
        let mut widths = vec![obs_dim];
        widths.extend_from_slice(&cfg.hidden);
        widths.push(combos);
        let mut nets = Vec::with_capacity(agents);
        for _ in 0..agents {
            nets.push(Mlp::new(&widths, OutputActivation::Identity, rng)?);
        }
        let targets = nets.clone();
        let opts = nets.iter().map(|n| Adam::new(cfg.lr, n)).collect();
        Ok(Self {
            obs_dim,
            action_dim,
            nets,
            targets,
            opts,
            cfg,
        })
    }

    pub fn q_values(&self, agent: usize, obs: &[f64]) -> Vec<f64> {
        self.nets[agent].forward(obs)
    }

    /// Epsilon-greedy action for one agent.
    pub fn act(&self, agent: usize, obs: &[f64], epsilon: f64, rng: &mut impl Rng) -> Vec<f64> {
        let combos = self.cfg.action_values.len().pow(self.action_dim as u32);
        let code = if rng.random::<f64>() < epsilon {
            rng.random_range(0..combos)
        } else {
            argmax(&self.q_values(agent, obs))
        };
        decode_action(code, &self.cfg.action_values, self.action_dim)
    }

    /// One temporal-difference round on a sampled minibatch.
    pub fn update(&mut self, buffer: &ReplayBuffer, rng: &mut impl Rng) {
        let Some(indices) = buffer.sample_indices(rng, self.cfg.batch) else {
            return;
        };
        let samples: Vec<&Transition> = indices.iter().map(|&i| buffer.get(i)).collect();
        let k = samples.len() as f64;
        for agent in 0..self.nets.len() {
            let mut grads = Gradients::zeros_like(&self.nets[agent]);
            for t in &samples {
                let obs = &t.state[agent * self.obs_dim..(agent + 1) * self.obs_dim];
                let next_obs = &t.next_state[agent * self.obs_dim..(agent + 1) * self.obs_dim];
                let taken = encode_action(
                    &t.joint_action[agent * self.action_dim..(agent + 1) * self.action_dim],
                    &self.cfg.action_values,
                );
                let cache = self.nets[agent].forward_cached(obs);
                let next_q = self.targets[agent].forward(next_obs);
                let best_next = next_q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let y = t.rewards[agent] + self.cfg.gamma * best_next;
                let mut upstream = vec![0.0; cache.output().len()];
                upstream[taken] = 2.0 * (cache.output()[taken] - y) / k;
                let (g, _) = self.nets[agent].backward(&cache, &upstream);
                grads.add_assign(&g);
            }
            self.opts[agent].step(&mut self.nets[agent], &grads);
            soft_update(&mut self.targets[agent], &self.nets[agent], self.cfg.tau);
        }
    }
}

/// Trains independent Q-learners on `env`.
pub fn train_madqn<E: Environment>(
    env: &mut E,
    cfg: &MadqnConfig,
    episodes: usize,
    steps: usize,
    seed: u64,
) -> Result<(Vec<EpisodeRecord>, MadqnLearner), NeuroError> {
    let mut init_rng = stream_rng(seed, 4);
    let mut explore_rng = stream_rng(seed, 5);
    let mut sample_rng = stream_rng(seed, 6);
    let agents = env.agent_count();
    let mut learner = MadqnLearner::new(
        agents,
        env.observation_dim(),
        env.action_dim(),
        cfg.clone(),
        &mut init_rng,
    )?;
    let mut buffer = ReplayBuffer::new(cfg.buffer_capacity);
    let mut records = Vec::with_capacity(episodes);
    for episode in 0..episodes {
        let epsilon = linear_schedule(cfg.epsilon_start, cfg.epsilon_end, episode, episodes);
        let mut obs = env.reset();
        let mut metrics = Vec::with_capacity(steps);
        for _ in 0..steps {
            let actions = JointAction {
                per_agent: (0..agents)
                    .map(|i| learner.act(i, &obs[i], epsilon, &mut explore_rng))
                    .collect(),
            };
            let out = env.step(&actions);
            buffer.push(Transition {
                state: global_state(&obs),
                joint_action: actions.flatten(),
                rewards: out.rewards.clone(),
                next_state: global_state(&out.observations),
            });
            if buffer.len() >= cfg.warmup {
                learner.update(&buffer, &mut sample_rng);
            }
            obs = out.observations;
            metrics.push(out.metrics);
        }
        records.push(EpisodeRecord::from_steps(&metrics));
    }
    Ok((records, learner))
}
