//! Continuous-control learners: DDPG and TD3 over hand-rolled MLPs.

mod checkpoint;
mod ddpg;
mod mlp;
mod replay;
mod td3;

pub use checkpoint::{Checkpoint, NetworkSnapshot, CHECKPOINT_VERSION};
pub use ddpg::DdpgAgent;
pub use mlp::{Adam, ForwardCache, Mlp, MlpGrads, OutputActivation};
pub use replay::{ReplayBuffer, Transition, TransitionRef};
pub use td3::{TargetBreakdown, Td3Agent};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, KvMap};

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("{what} dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("non-finite value during update: {context}")]
    NonFinite { context: String },
    #[error("network shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
}

/// Learner hyperparameters shared by both algorithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    pub actor_lr: f64,
    pub critic_lr: f64,
    pub batch_size: usize,
    pub discount: f64,
    pub buffer_capacity: usize,
    pub soft_update_tau: f64,
    /// Gaussian exploration noise added to actions during training.
    pub exploration_noise_std: f64,
    /// Actor/target update period, in critic updates.
    pub td3_policy_delay: u32,
    /// Target-policy smoothing noise scale.
    pub td3_target_noise_std: f64,
    /// Smoothing noise clip bound.
    pub td3_target_noise_clip: f64,
    /// Two hidden layer widths.
    pub hidden_sizes: [usize; 2],
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            actor_lr: 1e-4,
            critic_lr: 3e-4,
            batch_size: 64,
            discount: 0.99,
            buffer_capacity: 100_000,
            soft_update_tau: 0.005,
            exploration_noise_std: 0.1,
            td3_policy_delay: 2,
            td3_target_noise_std: 0.2,
            td3_target_noise_clip: 0.5,
            hidden_sizes: [64, 64],
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |field: &str, message: String| ConfigError::InvalidField {
            field: field.to_string(),
            message,
        };
        if !(self.actor_lr > 0.0) {
            return Err(invalid("actor_lr", "must be positive".into()));
        }
        if !(self.critic_lr > 0.0) {
            return Err(invalid("critic_lr", "must be positive".into()));
        }
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return Err(invalid(
                "discount",
                format!("must lie in (0, 1), got {}", self.discount),
            ));
        }
        if !(self.soft_update_tau > 0.0 && self.soft_update_tau <= 1.0) {
            return Err(invalid(
                "soft_update_tau",
                format!("must lie in (0, 1], got {}", self.soft_update_tau),
            ));
        }
        if self.batch_size == 0 || self.batch_size > self.buffer_capacity {
            return Err(invalid(
                "batch_size",
                format!(
                    "must be in 1..=buffer_capacity ({}), got {}",
                    self.buffer_capacity, self.batch_size
                ),
            ));
        }
        if self.td3_policy_delay == 0 {
            return Err(invalid("td3_policy_delay", "must be at least 1".into()));
        }
        if self.exploration_noise_std < 0.0
            || self.td3_target_noise_std < 0.0
            || self.td3_target_noise_clip < 0.0
        {
            return Err(invalid("exploration_noise_std", "noise scales must be non-negative".into()));
        }
        if self.hidden_sizes.iter().any(|&h| h == 0) {
            return Err(invalid("hidden_sizes", "layer widths must be positive".into()));
        }
        Ok(())
    }

    pub fn from_kv(mut map: KvMap) -> Result<Self, ConfigError> {
        let d = Self::default();
        let cfg = Self {
            actor_lr: map.take_parsed("actor_lr", d.actor_lr)?,
            critic_lr: map.take_parsed("critic_lr", d.critic_lr)?,
            batch_size: map.take_parsed("batch_size", d.batch_size)?,
            discount: map.take_parsed("discount", d.discount)?,
            buffer_capacity: map.take_parsed("buffer_capacity", d.buffer_capacity)?,
            soft_update_tau: map.take_parsed("soft_update_tau", d.soft_update_tau)?,
            exploration_noise_std: map
                .take_parsed("exploration_noise_std", d.exploration_noise_std)?,
            td3_policy_delay: map.take_parsed("td3_policy_delay", d.td3_policy_delay)?,
            td3_target_noise_std: map
                .take_parsed("td3_target_noise_std", d.td3_target_noise_std)?,
            td3_target_noise_clip: map
                .take_parsed("td3_target_noise_clip", d.td3_target_noise_clip)?,
            hidden_sizes: [
                map.take_parsed("hidden_size_1", d.hidden_sizes[0])?,
                map.take_parsed("hidden_size_2", d.hidden_sizes[1])?,
            ],
        };
        map.finish()?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Losses reported by one gradient step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Losses {
    pub critic: f64,
    /// Second critic loss; TD3 only.
    pub critic2: Option<f64>,
    /// Absent on steps where the delayed actor did not update.
    pub actor: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        AgentConfig::default().validate().unwrap();
    }

    #[test]
    fn invalid_fields_are_named() {
        let mut cfg = AgentConfig::default();
        cfg.discount = 1.0;
        assert!(cfg.validate().unwrap_err().to_string().contains("discount"));
        let mut cfg = AgentConfig::default();
        cfg.batch_size = cfg.buffer_capacity + 1;
        assert!(cfg.validate().unwrap_err().to_string().contains("batch_size"));
    }

    #[test]
    fn kv_overrides_hidden_sizes() {
        let map = KvMap::parse("hidden_size_1 = 32\nhidden_size_2 = 16\nbatch_size = 8\n").unwrap();
        let cfg = AgentConfig::from_kv(map).unwrap();
        assert_eq!(cfg.hidden_sizes, [32, 16]);
        assert_eq!(cfg.batch_size, 8);
        assert_eq!(cfg.discount, 0.99);
    }
}
