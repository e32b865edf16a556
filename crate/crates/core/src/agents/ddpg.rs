//! Deep deterministic policy gradient.

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::checkpoint::{Checkpoint, NetworkSnapshot, CHECKPOINT_VERSION};
use super::mlp::{Adam, ForwardCache, Mlp, MlpGrads, OutputActivation};
use super::replay::{ReplayBuffer, Transition};
use super::{AgentConfig, AgentError, Losses};
use crate::seed;

/// Deterministic actor with a single Q critic, target networks, and replay.
#[derive(Debug)]
pub struct DdpgAgent {
    config: AgentConfig,
    obs_dim: usize,
    act_dim: usize,
    actor: Mlp,
    actor_target: Mlp,
    critic: Mlp,
    critic_target: Mlp,
    actor_opt: Adam,
    critic_opt: Adam,
    buffer: ReplayBuffer,
    noise_rng: ChaCha8Rng,
    sample_rng: ChaCha8Rng,
    // Scratch reused across updates.
    indices: Vec<usize>,
    targets: Vec<f64>,
    actor_grads: MlpGrads,
    critic_grads: MlpGrads,
    cache_a: ForwardCache,
    cache_c: ForwardCache,
    joint: Vec<f64>,
    dinput: Vec<f64>,
}

pub(super) fn actor_dims(obs_dim: usize, act_dim: usize, hidden: [usize; 2]) -> Vec<usize> {
    vec![obs_dim, hidden[0], hidden[1], act_dim]
}

pub(super) fn critic_dims(obs_dim: usize, act_dim: usize, hidden: [usize; 2]) -> Vec<usize> {
    vec![obs_dim + act_dim, hidden[0], hidden[1], 1]
}

/// Deterministic policy output plus optional exploration noise, clamped into
/// the action box.
pub(super) fn policy_action(
    actor: &Mlp,
    observation: &[f64],
    noise_std: f64,
    rng: Option<&mut ChaCha8Rng>,
    cache: &mut ForwardCache,
) -> Vec<f64> {
    actor.forward(observation, cache);
    let mut action = cache.output().to_vec();
    if let Some(rng) = rng {
        if noise_std > 0.0 {
            let normal = Normal::new(0.0, noise_std).expect("valid std");
            for a in &mut action {
                *a += normal.sample(rng);
            }
        }
    }
    for a in &mut action {
        *a = a.clamp(-1.0, 1.0);
    }
    action
}

impl DdpgAgent {
    pub fn new(
        obs_dim: usize,
        act_dim: usize,
        config: AgentConfig,
        agent_seed: u64,
    ) -> Result<Self, AgentError> {
        config.validate()?;
        let mut init_rng = seed::rng(agent_seed, 1);
        let actor = Mlp::new(
            &actor_dims(obs_dim, act_dim, config.hidden_sizes),
            OutputActivation::Tanh,
            &mut init_rng,
        );
        let critic = Mlp::new(
            &critic_dims(obs_dim, act_dim, config.hidden_sizes),
            OutputActivation::Linear,
            &mut init_rng,
        );
        let actor_target = actor.clone();
        let critic_target = critic.clone();
        let actor_grads = MlpGrads::zeros_like(&actor);
        let critic_grads = MlpGrads::zeros_like(&critic);
        let actor_opt = Adam::new(config.actor_lr, actor.params().len());
        let critic_opt = Adam::new(config.critic_lr, critic.params().len());
        Ok(Self {
            buffer: ReplayBuffer::new(config.buffer_capacity, obs_dim, act_dim),
            noise_rng: seed::rng(agent_seed, 2),
            sample_rng: seed::rng(agent_seed, 3),
            config,
            obs_dim,
            act_dim,
            actor,
            actor_target,
            critic,
            critic_target,
            actor_opt,
            critic_opt,
            indices: Vec::new(),
            targets: Vec::new(),
            actor_grads,
            critic_grads,
            cache_a: ForwardCache::default(),
            cache_c: ForwardCache::default(),
            joint: Vec::new(),
            dinput: Vec::new(),
        })
    }

    /// Policy output for `observation`; adds clamped exploration noise when
    /// `explore` is set.
    pub fn act(&mut self, observation: &[f64], explore: bool) -> Result<Vec<f64>, AgentError> {
        if observation.len() != self.obs_dim {
            return Err(AgentError::DimensionMismatch {
                what: "observation",
                expected: self.obs_dim,
                got: observation.len(),
            });
        }
        let rng = explore.then_some(&mut self.noise_rng);
        Ok(policy_action(
            &self.actor,
            observation,
            self.config.exploration_noise_std,
            rng,
            &mut self.cache_a,
        ))
    }

    pub fn remember(&mut self, transition: &Transition) -> Result<(), AgentError> {
        self.buffer.push(transition)
    }

    pub fn buffer(&self) -> &ReplayBuffer {
        &self.buffer
    }

    pub fn ready(&self) -> bool {
        self.buffer.len() >= self.config.batch_size
    }

    /// Critic targets y = r + gamma * (1 - done) * Q'(s', mu'(s')) for the
    /// given buffer indices.
    pub fn compute_targets(&mut self, indices: &[usize]) -> Vec<f64> {
        let mut targets = Vec::with_capacity(indices.len());
        for &i in indices {
            let t = self.buffer.get(i);
            self.actor_target.forward(t.next_observation, &mut self.cache_a);
            self.joint.clear();
            self.joint.extend_from_slice(t.next_observation);
            self.joint.extend_from_slice(self.cache_a.output());
            self.critic_target.forward(&self.joint, &mut self.cache_c);
            let q_next = self.cache_c.output()[0];
            let done = if t.done { 1.0 } else { 0.0 };
            targets.push(t.reward + self.config.discount * (1.0 - done) * q_next);
        }
        targets
    }

    /// One gradient step on critic and actor plus a Polyak target update.
    /// Returns `None` while the buffer is smaller than a batch.
    pub fn update(&mut self) -> Result<Option<Losses>, AgentError> {
        if !self.ready() {
            return Ok(None);
        }
        let batch = self.config.batch_size;
        let mut indices = std::mem::take(&mut self.indices);
        self.buffer.sample_indices(&mut self.sample_rng, batch, &mut indices);
        let targets = self.compute_targets(&indices);
        self.targets = targets;

        // Critic regression toward the bootstrapped targets.
        let scale = 1.0 / batch as f64;
        self.critic_grads.reset();
        let mut critic_loss = 0.0;
        for (&i, &y) in indices.iter().zip(&self.targets) {
            let t = self.buffer.get(i);
            self.joint.clear();
            self.joint.extend_from_slice(t.observation);
            self.joint.extend_from_slice(t.action);
            self.critic.forward(&self.joint, &mut self.cache_c);
            let q = self.cache_c.output()[0];
            let err = q - y;
            critic_loss += err * err * scale;
            self.critic
                .backward(&self.cache_c, &[2.0 * err * scale], Some(&mut self.critic_grads), None);
        }
        if !critic_loss.is_finite() {
            return Err(AgentError::NonFinite {
                context: format!("DDPG critic loss {critic_loss}"),
            });
        }
        self.critic_opt
            .step(self.critic.params_mut(), self.critic_grads.values());

        // Actor ascends Q(s, mu(s)).
        self.actor_grads.reset();
        let mut actor_loss = 0.0;
        for &i in &indices {
            let t = self.buffer.get(i);
            self.actor.forward(t.observation, &mut self.cache_a);
            self.joint.clear();
            self.joint.extend_from_slice(t.observation);
            self.joint.extend_from_slice(self.cache_a.output());
            self.critic.forward(&self.joint, &mut self.cache_c);
            actor_loss -= self.cache_c.output()[0] * scale;
            self.critic
                .backward(&self.cache_c, &[-scale], None, Some(&mut self.dinput));
            let daction = self.dinput[self.obs_dim..].to_vec();
            self.actor
                .backward(&self.cache_a, &daction, Some(&mut self.actor_grads), None);
        }
        if !actor_loss.is_finite() {
            return Err(AgentError::NonFinite {
                context: format!("DDPG actor loss {actor_loss}"),
            });
        }
        self.actor_opt
            .step(self.actor.params_mut(), self.actor_grads.values());

        self.soft_update_targets(self.config.soft_update_tau)?;
        self.indices = indices;
        Ok(Some(Losses {
            critic: critic_loss,
            critic2: None,
            actor: Some(actor_loss),
        }))
    }

    pub fn soft_update_targets(&mut self, tau: f64) -> Result<(), AgentError> {
        self.actor_target
            .soft_update_from(&self.actor, tau)
            .map_err(AgentError::ShapeMismatch)?;
        self.critic_target
            .soft_update_from(&self.critic, tau)
            .map_err(AgentError::ShapeMismatch)?;
        Ok(())
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    pub fn actor(&self) -> &Mlp {
        &self.actor
    }

    pub fn critic(&self) -> &Mlp {
        &self.critic
    }

    pub fn actor_target(&self) -> &Mlp {
        &self.actor_target
    }

    pub fn critic_target(&self) -> &Mlp {
        &self.critic_target
    }

    pub fn checkpoint(&self) -> Checkpoint {
        let mut networks = std::collections::BTreeMap::new();
        networks.insert("actor".into(), NetworkSnapshot::of(&self.actor));
        networks.insert("actor_target".into(), NetworkSnapshot::of(&self.actor_target));
        networks.insert("critic".into(), NetworkSnapshot::of(&self.critic));
        networks.insert("critic_target".into(), NetworkSnapshot::of(&self.critic_target));
        Checkpoint {
            version: CHECKPOINT_VERSION,
            algorithm: "ddpg".into(),
            obs_dim: self.obs_dim,
            act_dim: self.act_dim,
            config: self.config.clone(),
            networks,
        }
    }

    /// Rebuilds an agent from a checkpoint. Network parameters are restored
    /// exactly; optimizer moments and the replay buffer start fresh.
    pub fn from_checkpoint(cp: &Checkpoint, agent_seed: u64) -> Result<Self, AgentError> {
        cp.expect_algorithm("ddpg")?;
        let mut agent = Self::new(cp.obs_dim, cp.act_dim, cp.config.clone(), agent_seed)?;
        agent.actor = cp.network("actor")?;
        agent.actor_target = cp.network("actor_target")?;
        agent.critic = cp.network("critic")?;
        agent.critic_target = cp.network("critic_target")?;
        Ok(agent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_agent(seed: u64) -> DdpgAgent {
        let config = AgentConfig {
            batch_size: 8,
            buffer_capacity: 64,
            hidden_sizes: [8, 8],
            ..AgentConfig::default()
        };
        DdpgAgent::new(4, 2, config, seed).unwrap()
    }

    fn fill_buffer(agent: &mut DdpgAgent, n: usize, reward: f64, done: bool, seed: u64) {
        let mut rng = crate::seed::rng(seed, 9);
        use rand::Rng;
        for _ in 0..n {
            let obs: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let next: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let action: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
            agent
                .remember(&Transition {
                    observation: obs,
                    action,
                    reward,
                    next_observation: next,
                    done,
                })
                .unwrap();
        }
    }

    #[test]
    fn act_is_deterministic_without_exploration() {
        let mut agent = small_agent(1);
        let obs = vec![0.1, -0.4, 0.7, 0.0];
        let a = agent.act(&obs, false).unwrap();
        let b = agent.act(&obs, false).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn exploration_is_seed_replayable_and_bounded() {
        let obs = vec![0.1, -0.4, 0.7, 0.0];
        let mut agent_a = small_agent(2);
        let mut agent_b = small_agent(2);
        for _ in 0..20 {
            let a = agent_a.act(&obs, true).unwrap();
            let b = agent_b.act(&obs, true).unwrap();
            assert_eq!(a, b);
            assert!(a.iter().all(|v| (-1.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let mut agent = small_agent(3);
        assert!(matches!(
            agent.act(&[0.0; 3], false),
            Err(AgentError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn terminal_zero_reward_targets_are_zero() {
        let mut agent = small_agent(4);
        fill_buffer(&mut agent, 16, 0.0, true, 4);
        let indices: Vec<usize> = (0..8).collect();
        let targets = agent.compute_targets(&indices);
        assert!(targets.iter().all(|y| *y == 0.0), "{targets:?}");
    }

    #[test]
    fn update_returns_none_until_batch_is_available() {
        let mut agent = small_agent(5);
        fill_buffer(&mut agent, 4, -1.0, false, 5);
        assert!(agent.update().unwrap().is_none());
        fill_buffer(&mut agent, 4, -1.0, false, 6);
        assert!(agent.update().unwrap().is_some());
    }

    #[test]
    fn critic_overfits_a_fixed_batch() {
        let mut agent = small_agent(6);
        fill_buffer(&mut agent, 8, -0.5, true, 6);
        let first = agent.update().unwrap().unwrap().critic;
        let mut last = first;
        for _ in 0..400 {
            last = agent.update().unwrap().unwrap().critic;
        }
        assert!(
            last < first * 0.2,
            "critic loss did not shrink: {first} -> {last}"
        );
    }

    #[test]
    fn tau_one_copies_online_into_targets() {
        let mut agent = small_agent(7);
        fill_buffer(&mut agent, 8, -1.0, false, 7);
        agent.update().unwrap();
        assert_ne!(agent.actor().params(), agent.actor_target().params());
        agent.soft_update_targets(1.0).unwrap();
        assert_eq!(agent.actor().params(), agent.actor_target().params());
        assert_eq!(agent.critic().params(), agent.critic_target().params());
    }
}
