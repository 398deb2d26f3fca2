//! Deterministic-policy-gradient ensemble: one actor per agent, one
//! centralized critic per agent scoring the global state and joint action.
//!
//! Critics regress on soft-target bootstrapped values; actors ascend their
//! critic's value by backpropagating through the critic input. Target
//! copies of both trail their mains by Polyak averaging.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::neuro::{
    soft_update, Adam, Gradients, Mlp, NeuroError, OutputActivation, ReplayBuffer, Transition,
};

use super::{global_state, linear_schedule, stream_rng, Environment, EpisodeRecord, JointAction};

#[derive(Clone, Debug)]
pub struct MaddpgConfig {
    /// Hidden widths shared by actors and critics.
    pub hidden: Vec<usize>,
    pub actor_lr: f64,
    pub critic_lr: f64,
    /// Discount on bootstrapped values.
    pub gamma: f64,
    /// Polyak rate of the target networks.
    pub tau: f64,
    pub buffer_capacity: usize,
    pub batch: usize,
    /// Transitions stored before updates begin.
    pub warmup: usize,
    /// Exploration noise, linearly annealed per episode.
    pub noise_start: f64,
    pub noise_end: f64,
}

impl Default for MaddpgConfig {
    fn default() -> Self {
        Self {
            hidden: vec![64, 64],
            actor_lr: 2e-5,
            critic_lr: 1e-5,
            gamma: 0.95,
            tau: 0.01,
            buffer_capacity: 15_000,
            batch: 64,
            warmup: 640,
            noise_start: 0.3,
            noise_end: 0.02,
        }
    }
}

pub struct MaddpgEnsemble {
    agents: usize,
    obs_dim: usize,
    action_dim: usize,
    actors: Vec<Mlp>,
    actor_targets: Vec<Mlp>,
    critics: Vec<Mlp>,
    critic_targets: Vec<Mlp>,
    actor_opts: Vec<Adam>,
    critic_opts: Vec<Adam>,
    cfg: MaddpgConfig,
}

impl MaddpgEnsemble {
    pub fn new(
        agents: usize,
        obs_dim: usize,
        action_dim: usize,
        cfg: MaddpgConfig,
        rng: &mut impl Rng,
    ) -> Result<Self, NeuroError> {
        let mut actor_widths = vec![obs_dim];
        actor_widths.extend_from_slice(&cfg.hidden);
        actor_widths.push(action_dim);
        let mut critic_widths = vec![agents * (obs_dim + action_dim)];
        critic_widths.extend_from_slice(&cfg.hidden);
        critic_widths.push(1);

        let mut actors = Vec::with_capacity(agents);
        let mut critics = Vec::with_capacity(agents);
        for _ in 0..agents {
            actors.push(Mlp::new(&actor_widths, OutputActivation::TanhSquash, rng)?);
            critics.push(Mlp::new(&critic_widths, OutputActivation::Identity, rng)?);
        }
        let actor_targets = actors.clone();
        let critic_targets = critics.clone();
        let actor_opts = actors.iter().map(|n| Adam::new(cfg.actor_lr, n)).collect();
        let critic_opts = critics.iter().map(|n| Adam::new(cfg.critic_lr, n)).collect();
        Ok(Self {
            agents,
            obs_dim,
            action_dim,
            actors,
            actor_targets,
            critics,
            critic_targets,
            actor_opts,
            critic_opts,
            cfg,
        })
    }

    pub fn actors(&self) -> &[Mlp] {
        &self.actors
    }

    /// Deterministic policy action.
    pub fn act(&self, agent: usize, obs: &[f64]) -> Vec<f64> {
        self.actors[agent].forward(obs)
    }

    /// Policy action plus Gaussian exploration, clamped to [-1, 1].
    pub fn act_noisy(
        &self,
        agent: usize,
        obs: &[f64],
        sigma: f64,
        rng: &mut impl Rng,
    ) -> Vec<f64> {
        let noise = Normal::new(0.0, sigma).expect("nonnegative noise scale");
        self.act(agent, obs)
            .into_iter()
            .map(|a| (a + noise.sample(rng)).clamp(-1.0, 1.0))
            .collect()
    }

    pub fn critic_value(&self, agent: usize, state: &[f64], joint_action: &[f64]) -> f64 {
        let input: Vec<f64> = state.iter().chain(joint_action).copied().collect();
        self.critics[agent].forward(&input)[0]
    }

    /// Joint action the target actors take in each sampled successor state.
    fn target_next_actions(&self, samples: &[&Transition]) -> Vec<Vec<f64>> {
        samples
            .iter()
            .map(|t| {
                let mut joint = Vec::with_capacity(self.agents * self.action_dim);
                for (j, target) in self.actor_targets.iter().enumerate() {
                    let o = &t.next_state[j * self.obs_dim..(j + 1) * self.obs_dim];
                    joint.extend(target.forward(o));
                }
                joint
            })
            .collect()
    }

    fn critic_gradient(
        &self,
        agent: usize,
        samples: &[&Transition],
        next_joint: &[Vec<f64>],
    ) -> Gradients {
        let k = samples.len() as f64;
        let mut grads = Gradients::zeros_like(&self.critics[agent]);
        for (t, nj) in samples.iter().zip(next_joint) {
            let input: Vec<f64> = t.state.iter().chain(&t.joint_action).copied().collect();
            let cache = self.critics[agent].forward_cached(&input);
            let q = cache.output()[0];
            let next_input: Vec<f64> = t.next_state.iter().chain(nj).copied().collect();
            let q_next = self.critic_targets[agent].forward(&next_input)[0];
            let y = t.rewards[agent] + self.cfg.gamma * q_next;
            let (g, _) = self.critics[agent].backward(&cache, &[2.0 * (q - y) / k]);
            grads.add_assign(&g);
        }
        grads
    }

    fn actor_gradient(&self, agent: usize, samples: &[&Transition]) -> Gradients {
        let k = samples.len() as f64;
        let a0 = agent * self.action_dim;
        let mut grads = Gradients::zeros_like(&self.actors[agent]);
        for t in samples {
            let obs = &t.state[agent * self.obs_dim..(agent + 1) * self.obs_dim];
            let actor_cache = self.actors[agent].forward_cached(obs);
            let mut joint = t.joint_action.clone();
            joint[a0..a0 + self.action_dim].copy_from_slice(actor_cache.output());
            let input: Vec<f64> = t.state.iter().chain(&joint).copied().collect();
            let critic_cache = self.critics[agent].forward_cached(&input);
            let (_, input_grad) = self.critics[agent].backward(&critic_cache, &[1.0]);
            let from = t.state.len() + a0;
            let upstream: Vec<f64> = input_grad[from..from + self.action_dim]
                .iter()
                .map(|g| -g / k)
                .collect();
            let (g, _) = self.actors[agent].backward(&actor_cache, &upstream);
            grads.add_assign(&g);
        }
        grads
    }

    /// One learning round over a sampled minibatch: per agent, critic
    /// regression, actor ascent, then target tracking.
    pub fn update(&mut self, buffer: &ReplayBuffer, rng: &mut impl Rng) {
        let Some(indices) = buffer.sample_indices(rng, self.cfg.batch) else {
            return;
        };
        let samples: Vec<&Transition> = indices.iter().map(|&i| buffer.get(i)).collect();
        let next_joint = self.target_next_actions(&samples);
        for agent in 0..self.agents {
            let cg = self.critic_gradient(agent, &samples, &next_joint);
            self.critic_opts[agent].step(&mut self.critics[agent], &cg);
            let ag = self.actor_gradient(agent, &samples);
            self.actor_opts[agent].step(&mut self.actors[agent], &ag);
            soft_update(&mut self.actor_targets[agent], &self.actors[agent], self.cfg.tau);
            soft_update(
                &mut self.critic_targets[agent],
                &self.critics[agent],
                self.cfg.tau,
            );
        }
    }
}

/// Trains an ensemble on `env` and returns per-episode records along with
/// the trained networks.
pub fn train_maddpg<E: Environment>(
    env: &mut E,
    cfg: &MaddpgConfig,
    episodes: usize,
    steps: usize,
    seed: u64,
) -> Result<(Vec<EpisodeRecord>, MaddpgEnsemble), NeuroError> {
    let mut init_rng = stream_rng(seed, 1);
    let mut noise_rng = stream_rng(seed, 2);
    let mut sample_rng = stream_rng(seed, 3);
    let agents = env.agent_count();
    let mut ensemble = MaddpgEnsemble::new(
        agents,
        env.observation_dim(),
        env.action_dim(),
        cfg.clone(),
        &mut init_rng,
    )?;
    let mut buffer = ReplayBuffer::new(cfg.buffer_capacity);
    let mut records = Vec::with_capacity(episodes);
    for episode in 0..episodes {
        let sigma = linear_schedule(cfg.noise_start, cfg.noise_end, episode, episodes);
        let mut obs = env.reset();
        let mut metrics = Vec::with_capacity(steps);
        for _ in 0..steps {
            let actions = JointAction {
                per_agent: (0..agents)
                    .map(|i| ensemble.act_noisy(i, &obs[i], sigma, &mut noise_rng))
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
                ensemble.update(&buffer, &mut sample_rng);
            }
            obs = out.observations;
            metrics.push(out.metrics);
        }
        records.push(EpisodeRecord::from_steps(&metrics));
    }
    Ok((records, ensemble))
}
