//! The factor registry: named per-slot quantities a reward may reference.

use serde::{Deserialize, Serialize};

/// Default multiplier applied on slots with at least one constraint violation.
pub const DEFAULT_PENALTY_MULTIPLIER: f64 = 2.0;

/// Names a reward expression is allowed to reference, in registry order.
pub const FACTOR_NAMES: [&str; 5] = ["energy", "position", "aoi", "throughput", "penalty"];

/// Normalized per-slot factor inputs handed to a reward program.
///
/// `energy`, `position`, `aoi` and `throughput` are normalized into [0, 1];
/// `penalty` is 1 on clean slots and the configured multiplier otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorValues {
    /// Slot energy over the reference worst-case slot energy.
    pub energy: f64,
    /// UAV distance to the centroid of undelivered terminals over the area
    /// diagonal; 0 once everything is delivered.
    pub position: f64,
    /// Largest undelivered age of information as a fraction of the deadline.
    pub aoi: f64,
    /// Decoded bits this slot over the reference slot capacity.
    pub throughput: f64,
    /// 1, or the penalty multiplier when any constraint was violated.
    pub penalty: f64,
}

impl FactorValues {
    /// All-zero factors on a clean slot.
    pub fn zeros() -> Self {
        Self {
            energy: 0.0,
            position: 0.0,
            aoi: 0.0,
            throughput: 0.0,
            penalty: 1.0,
        }
    }

    /// Looks a factor up by registry name.
    pub fn get(&self, name: &str) -> Option<f64> {
        match name {
            "energy" => Some(self.energy),
            "position" => Some(self.position),
            "aoi" => Some(self.aoi),
            "throughput" => Some(self.throughput),
            "penalty" => Some(self.penalty),
            _ => None,
        }
    }

    /// True when every field is finite and within its documented range.
    pub fn in_range(&self, penalty_multiplier: f64) -> bool {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        unit(self.energy)
            && unit(self.position)
            && unit(self.aoi)
            && unit(self.throughput)
            && (self.penalty == 1.0 || self.penalty == penalty_multiplier)
    }
}

/// Hand-written baseline: cost is `w * energy * penalty`, returned as a
/// (negative) reward.
pub fn manual_reward(values: &FactorValues, w: f64) -> f64 {
    -(w * values.energy * values.penalty)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manual_reward_examples() {
        let mut v = FactorValues::zeros();
        v.energy = 0.5;
        assert_eq!(manual_reward(&v, 1.0), -0.5);
        v.penalty = 2.0;
        assert_eq!(manual_reward(&v, 1.0), -1.0);
        v.energy = 0.0;
        assert_eq!(manual_reward(&v, 1.0), 0.0);
    }

    #[test]
    fn lookup_covers_the_registry() {
        let v = FactorValues::zeros();
        for name in FACTOR_NAMES {
            assert!(v.get(name).is_some(), "{name}");
        }
        assert!(v.get("speed").is_none());
    }
}
