//! The four experiment suites, plus training and checkpoint evaluation.
//!
//! Every suite builds its worlds from one scenario, runs each configuration
//! for each requested seed, writes one CSV per run and a single JSON summary.
//! Controllers never share RNG state with the world, so two runs of the same
//! suite produce identical files.

use std::path::{Path, PathBuf};

use crate::marl::{
    run_fixed, run_greedy, train_maddpg, train_madqn, Environment, EpisodeRecord, JointAction,
    PairingPolicy, SliceWorld,
};
use crate::neuro::Mlp;

use super::config::ScenarioConfig;
use super::metrics::{write_episode_csv, RunSummary, SuiteSummary};
use super::HarnessError;

/// Pool scales probed by the pre-assessment ablation.
const PREASSESS_SCALES: [f64; 3] = [1.0, 2.0, 5.0];

/// Ceiling on adaptive episodes in the pre-assessment ablation; the
/// comparison is between settled arms, not learning curves.
const PREASSESS_EPISODES: usize = 40;

/// Corridor speed pairs swept by the velocity suite: three tiers moving both
/// layers together, then three holding the lower layer fixed.
const SPEED_SWEEPS: [(f64, f64); 6] = [
    (10.0, 20.0),
    (30.0, 40.0),
    (50.0, 60.0),
    (20.0, 30.0),
    (20.0, 40.0),
    (20.0, 50.0),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// Cooperative learner against the lookahead and independent baselines.
    CompareAlgorithms,
    /// Priority matching against random matching, no allocation control.
    PairingAblation,
    /// Demand pre-assessment on and off across pool scales.
    PreassessAblation,
    /// Corridor speed tiers under a fixed allocation.
    VelocitySweep,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::CompareAlgorithms,
        Suite::PairingAblation,
        Suite::PreassessAblation,
        Suite::VelocitySweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::CompareAlgorithms => "compare_algorithms",
            Suite::PairingAblation => "pairing_ablation",
            Suite::PreassessAblation => "preassess_ablation",
            Suite::VelocitySweep => "velocity_sweep",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, HarnessError> {
        Self::ALL
            .iter()
            .copied()
            .find(|s| s.name() == name)
            .ok_or_else(|| HarnessError::UnknownSuite {
                name: name.to_string(),
                expected: Self::ALL.map(Suite::name).join(", "),
            })
    }
}

pub fn summary_path(out_dir: &Path, name: &str) -> PathBuf {
    out_dir.join(format!("{name}_summary.json"))
}

/// Runs one suite and writes its metric files under `out_dir`.
pub fn run_suite(
    suite: Suite,
    cfg: &ScenarioConfig,
    out_dir: &Path,
) -> Result<SuiteSummary, HarnessError> {
    std::fs::create_dir_all(out_dir)?;
    let summary = match suite {
        Suite::CompareAlgorithms => compare_algorithms(cfg, out_dir)?,
        Suite::PairingAblation => pairing_ablation(cfg, out_dir)?,
        Suite::PreassessAblation => preassess_ablation(cfg, out_dir)?,
        Suite::VelocitySweep => velocity_sweep(cfg, out_dir)?,
    };
    summary.save(&summary_path(out_dir, suite.name()))?;
    Ok(summary)
}

fn emit(
    out_dir: &Path,
    summary: &mut SuiteSummary,
    label: &str,
    seed: u64,
    records: &[EpisodeRecord],
) -> Result<(), HarnessError> {
    write_episode_csv(&out_dir.join(format!("{label}_seed{seed}.csv")), records)?;
    summary.insert(format!("{label}/seed{seed}"), RunSummary::new(seed, records));
    Ok(())
}

fn compare_algorithms(cfg: &ScenarioConfig, out_dir: &Path) -> Result<SuiteSummary, HarnessError> {
    let (episodes, steps) = (cfg.sim.episodes, cfg.sim.steps);
    let mut summary = SuiteSummary::new("compare_algorithms", episodes, steps);
    for &seed in &cfg.sim.seeds {
        let world = SliceWorld::new(cfg.world_config()?, seed)?;

        let mut env = world.clone();
        let (records, _) = train_maddpg(&mut env, &cfg.maddpg_config(), episodes, steps, seed)?;
        emit(out_dir, &mut summary, "maddpg", seed, &records)?;

        let mut env = world.clone();
        let records = run_greedy(&mut env, &cfg.greedy_config(), episodes, steps, seed);
        emit(out_dir, &mut summary, "egreedy", seed, &records)?;

        let mut env = world;
        let (records, _) = train_madqn(&mut env, &cfg.madqn_config(), episodes, steps, seed)?;
        emit(out_dir, &mut summary, "madqn", seed, &records)?;
    }
    Ok(summary)
}

fn pairing_ablation(cfg: &ScenarioConfig, out_dir: &Path) -> Result<SuiteSummary, HarnessError> {
    let (episodes, steps) = (cfg.sim.episodes, cfg.sim.steps);
    let mut summary = SuiteSummary::new("pairing_ablation", episodes, steps);
    for &seed in &cfg.sim.seeds {
        for (policy, label) in [
            (PairingPolicy::Priority, "priority"),
            (PairingPolicy::Random, "random"),
        ] {
            let mut arm = cfg.clone();
            arm.admission.pairing = policy;
            let mut env = SliceWorld::new(arm.world_config()?, seed)?;
            let records = run_fixed(&mut env, episodes, steps);
            emit(out_dir, &mut summary, label, seed, &records)?;
        }
    }
    Ok(summary)
}

fn preassess_ablation(cfg: &ScenarioConfig, out_dir: &Path) -> Result<SuiteSummary, HarnessError> {
    let episodes = cfg.sim.episodes.min(PREASSESS_EPISODES);
    let steps = cfg.sim.steps;
    let seed = cfg.sim.seeds[0];
    let mut summary = SuiteSummary::new("preassess_ablation", episodes, steps);
    for scale in PREASSESS_SCALES {
        for (preassess, arm_name) in [(false, "off"), (true, "on")] {
            let mut arm = cfg.clone();
            arm.pool.scale = scale;
            arm.admission.preassess = preassess;
            let mut env = SliceWorld::new(arm.world_config()?, seed)?;
            let records = run_greedy(&mut env, &cfg.greedy_config(), episodes, steps, seed);
            emit(
                out_dir,
                &mut summary,
                &format!("scale{scale}_{arm_name}"),
                seed,
                &records,
            )?;
        }
    }
    Ok(summary)
}

fn velocity_sweep(cfg: &ScenarioConfig, out_dir: &Path) -> Result<SuiteSummary, HarnessError> {
    let (episodes, steps) = (cfg.sim.episodes, cfg.sim.steps);
    let mut summary = SuiteSummary::new("velocity_sweep", episodes, steps);
    for (low, high) in SPEED_SWEEPS {
        for &seed in &cfg.sim.seeds {
            let mut arm = cfg.clone();
            arm.scenario.layer_speeds = vec![low, high];
            arm.scenario.spawn_y = None;
            let mut env = SliceWorld::new(arm.world_config()?, seed)?;
            let records = run_fixed(&mut env, episodes, steps);
            emit(
                out_dir,
                &mut summary,
                &format!("speeds{low}_{high}"),
                seed,
                &records,
            )?;
        }
    }
    Ok(summary)
}

fn actor_path(dir: &Path, agent: usize) -> PathBuf {
    dir.join(format!("actor{agent}.txt"))
}

/// Trains the cooperative learner on the first seed and saves one actor
/// checkpoint per slice next to the metrics.
pub fn train_and_checkpoint(
    cfg: &ScenarioConfig,
    out_dir: &Path,
) -> Result<SuiteSummary, HarnessError> {
    std::fs::create_dir_all(out_dir)?;
    let (episodes, steps) = (cfg.sim.episodes, cfg.sim.steps);
    let seed = cfg.sim.seeds[0];
    let mut env = SliceWorld::new(cfg.world_config()?, seed)?;
    let (records, ensemble) = train_maddpg(&mut env, &cfg.maddpg_config(), episodes, steps, seed)?;
    for (i, actor) in ensemble.actors().iter().enumerate() {
        actor.save(&actor_path(out_dir, i))?;
    }
    let mut summary = SuiteSummary::new("train", episodes, steps);
    emit(out_dir, &mut summary, "maddpg", seed, &records)?;
    summary.save(&summary_path(out_dir, "train"))?;
    Ok(summary)
}

fn rollout_actors<E: Environment>(
    env: &mut E,
    actors: &[Mlp],
    episodes: usize,
    steps: usize,
) -> Vec<EpisodeRecord> {
    (0..episodes)
        .map(|_| {
            let mut obs = env.reset();
            let metrics = (0..steps)
                .map(|_| {
                    let actions = JointAction {
                        per_agent: (0..actors.len())
                            .map(|i| actors[i].forward(&obs[i]))
                            .collect(),
                    };
                    let out = env.step(&actions);
                    obs = out.observations;
                    out.metrics
                })
                .collect::<Vec<_>>();
            EpisodeRecord::from_steps(&metrics)
        })
        .collect()
}

/// Rolls saved actors through the scenario without exploration, one run per
/// configured seed.
pub fn evaluate_checkpoint(
    cfg: &ScenarioConfig,
    checkpoint_dir: &Path,
    out_dir: &Path,
) -> Result<SuiteSummary, HarnessError> {
    std::fs::create_dir_all(out_dir)?;
    let actors: Vec<Mlp> = (0..cfg.slices.count as usize)
        .map(|i| Mlp::load(&actor_path(checkpoint_dir, i)))
        .collect::<Result<_, _>>()?;
    let world_cfg = cfg.world_config()?;
    for (i, actor) in actors.iter().enumerate() {
        let w = actor.widths();
        if w.first() != Some(&5) || w.last() != Some(&3) {
            return Err(HarnessError::Config(format!(
                "actor {i} maps {:?}, expected 5 observation dims to 3 action dims",
                w
            )));
        }
    }
    let (episodes, steps) = (cfg.sim.episodes, cfg.sim.steps);
    let mut summary = SuiteSummary::new("evaluate", episodes, steps);
    for &seed in &cfg.sim.seeds {
        let mut env = SliceWorld::new(world_cfg.clone(), seed)?;
        let records = rollout_actors(&mut env, &actors, episodes, steps);
        emit(out_dir, &mut summary, "evaluate", seed, &records)?;
    }
    summary.save(&summary_path(out_dir, "evaluate"))?;
    Ok(summary)
}
