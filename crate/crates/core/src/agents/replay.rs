//! FIFO experience replay over flat storage.

use rand::Rng;

use super::AgentError;

/// One experience tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub observation: Vec<f64>,
    pub action: Vec<f64>,
    pub reward: f64,
    pub next_observation: Vec<f64>,
    pub done: bool,
}

/// Ring buffer of transitions in structure-of-arrays layout; insertion past
/// capacity evicts the oldest entry.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    obs_dim: usize,
    act_dim: usize,
    capacity: usize,
    len: usize,
    head: usize,
    observations: Vec<f64>,
    actions: Vec<f64>,
    rewards: Vec<f64>,
    next_observations: Vec<f64>,
    dones: Vec<f64>,
}

/// Borrowed view of one stored transition.
#[derive(Debug, Clone, Copy)]
pub struct TransitionRef<'a> {
    pub observation: &'a [f64],
    pub action: &'a [f64],
    pub reward: f64,
    pub next_observation: &'a [f64],
    pub done: bool,
}

impl ReplayBuffer {
    pub fn new(capacity: usize, obs_dim: usize, act_dim: usize) -> Self {
        assert!(capacity > 0 && obs_dim > 0 && act_dim > 0);
        Self {
            obs_dim,
            act_dim,
            capacity,
            len: 0,
            head: 0,
            observations: vec![0.0; capacity * obs_dim],
            actions: vec![0.0; capacity * act_dim],
            rewards: vec![0.0; capacity],
            next_observations: vec![0.0; capacity * obs_dim],
            dones: vec![0.0; capacity],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn push(&mut self, t: &Transition) -> Result<(), AgentError> {
        if t.observation.len() != self.obs_dim || t.next_observation.len() != self.obs_dim {
            return Err(AgentError::DimensionMismatch {
                what: "observation",
                expected: self.obs_dim,
                got: t.observation.len().max(t.next_observation.len()),
            });
        }
        if t.action.len() != self.act_dim {
            return Err(AgentError::DimensionMismatch {
                what: "action",
                expected: self.act_dim,
                got: t.action.len(),
            });
        }
        if !t.reward.is_finite() {
            return Err(AgentError::NonFinite {
                context: format!("reward {}", t.reward),
            });
        }
        let slot = self.head;
        self.observations[slot * self.obs_dim..(slot + 1) * self.obs_dim]
            .copy_from_slice(&t.observation);
        self.actions[slot * self.act_dim..(slot + 1) * self.act_dim].copy_from_slice(&t.action);
        self.rewards[slot] = t.reward;
        self.next_observations[slot * self.obs_dim..(slot + 1) * self.obs_dim]
            .copy_from_slice(&t.next_observation);
        self.dones[slot] = if t.done { 1.0 } else { 0.0 };
        self.head = (self.head + 1) % self.capacity;
        self.len = (self.len + 1).min(self.capacity);
        Ok(())
    }

    pub fn get(&self, index: usize) -> TransitionRef<'_> {
        assert!(index < self.len);
        TransitionRef {
            observation: &self.observations[index * self.obs_dim..(index + 1) * self.obs_dim],
            action: &self.actions[index * self.act_dim..(index + 1) * self.act_dim],
            reward: self.rewards[index],
            next_observation: &self.next_observations
                [index * self.obs_dim..(index + 1) * self.obs_dim],
            done: self.dones[index] == 1.0,
        }
    }

    /// True when the buffer still holds a transition with this exact content.
    pub fn contains(&self, t: &Transition) -> bool {
        (0..self.len).any(|i| {
            let r = self.get(i);
            r.observation == t.observation.as_slice()
                && r.action == t.action.as_slice()
                && r.reward == t.reward
                && r.next_observation == t.next_observation.as_slice()
                && r.done == t.done
        })
    }

    /// Samples `batch` indices uniformly with replacement.
    pub fn sample_indices<R: Rng + ?Sized>(&self, rng: &mut R, batch: usize, out: &mut Vec<usize>) {
        out.clear();
        for _ in 0..batch {
            out.push(rng.gen_range(0..self.len));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    fn transition(tag: f64) -> Transition {
        Transition {
            observation: vec![tag, tag + 0.1],
            action: vec![tag],
            reward: tag,
            next_observation: vec![tag + 0.2, tag + 0.3],
            done: false,
        }
    }

    #[test]
    fn fifo_evicts_exactly_the_oldest() {
        let capacity = 8;
        let extra = 5;
        let mut buffer = ReplayBuffer::new(capacity, 2, 1);
        for i in 0..capacity + extra {
            buffer.push(&transition(i as f64)).unwrap();
        }
        assert_eq!(buffer.len(), capacity);
        for i in 0..extra {
            assert!(!buffer.contains(&transition(i as f64)), "stale {i}");
        }
        for i in extra..capacity + extra {
            assert!(buffer.contains(&transition(i as f64)), "missing {i}");
        }
    }

    #[test]
    fn dimension_mismatches_rejected() {
        let mut buffer = ReplayBuffer::new(4, 2, 1);
        let mut bad = transition(0.0);
        bad.action = vec![0.0, 1.0];
        assert!(buffer.push(&bad).is_err());
        let mut bad = transition(0.0);
        bad.observation = vec![0.0];
        assert!(buffer.push(&bad).is_err());
    }

    #[test]
    fn non_finite_rewards_rejected() {
        let mut buffer = ReplayBuffer::new(4, 2, 1);
        let mut bad = transition(0.0);
        bad.reward = f64::NAN;
        assert!(buffer.push(&bad).is_err());
    }

    #[test]
    fn sampling_is_seed_replayable() {
        let mut buffer = ReplayBuffer::new(16, 2, 1);
        for i in 0..10 {
            buffer.push(&transition(i as f64)).unwrap();
        }
        let mut a = Vec::new();
        let mut b = Vec::new();
        buffer.sample_indices(&mut seed::rng(3, 0), 6, &mut a);
        buffer.sample_indices(&mut seed::rng(3, 0), 6, &mut b);
        assert_eq!(a, b);
        assert!(a.iter().all(|&i| i < 10));
    }
}
