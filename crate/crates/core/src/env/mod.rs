//! UAV-assisted IoT data-collection environment.

mod channel;
mod config;
mod power;
mod trace;
mod world;

pub use channel::{rician_power, uplink_rate, Channel};
pub use config::WorldConfig;
pub use power::{harvest, PropulsionModel};
pub use trace::{write_trace_csv, TraceRow};
pub use world::{
    constraint_check, Action, Environment, Observation, SlotInfo, StepOutcome, TerminalState,
    UavState, MOVE_THRESHOLD,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error("environment used before reset")]
    NotReset,
    #[error("step on a finished episode")]
    EpisodeFinished,
    #[error("distance must be strictly positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("gain must be non-negative, got {0}")]
    NegativeGain(f64),
    #[error("duration must be strictly positive, got {0}")]
    NonPositiveDuration(f64),
    #[error("speed must be non-negative and finite, got {0}")]
    NegativeSpeed(f64),
    #[error("transmit power {p_tx} outside (0, {p_tx_max}]")]
    TransmitPowerOutOfRange { p_tx: f64, p_tx_max: f64 },
}

/// Constraint violations flagged on one slot.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violations {
    /// Scheduled uplink fell below the decoding SNR threshold.
    pub decode: bool,
    /// A transmission ran below the minimum throughput.
    pub throughput: bool,
    /// Some undelivered terminal exceeded the freshness deadline.
    pub freshness: bool,
}

impl Violations {
    pub fn any(&self) -> bool {
        self.decode || self.throughput || self.freshness
    }

    pub fn count(&self) -> usize {
        self.decode as usize + self.throughput as usize + self.freshness as usize
    }

    /// Stable text form for CSV columns, e.g. `decode|freshness`.
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.decode {
            parts.push("decode");
        }
        if self.throughput {
            parts.push("throughput");
        }
        if self.freshness {
            parts.push("freshness");
        }
        parts.join("|")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reward::FactorValues;

    fn tiny_config() -> WorldConfig {
        WorldConfig {
            n_terminals: 3,
            horizon: 40,
            ..WorldConfig::default()
        }
    }

    #[test]
    fn reset_is_deterministic_per_seed() {
        let mut env_a = Environment::new(WorldConfig::default()).unwrap();
        let mut env_b = Environment::new(WorldConfig::default()).unwrap();
        assert_eq!(env_a.reset(7), env_b.reset(7));
        assert_ne!(env_a.reset(7), env_b.reset(8));
    }

    #[test]
    fn observation_has_documented_length() {
        let mut env = Environment::new(WorldConfig::default()).unwrap();
        let obs = env.reset(1);
        assert_eq!(obs.len(), 52);
        assert!(obs.iter().all(|v| v.is_finite() && (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn uav_starts_at_center_with_full_packets() {
        let mut env = Environment::new(tiny_config()).unwrap();
        env.reset(3);
        assert_eq!(env.uav().position, [150.0, 150.0]);
        for t in env.terminals() {
            assert_eq!(t.residual_data, env.config().packet_size);
            assert_eq!(t.aoi, 0);
            assert_eq!(t.harvested_energy, 0.0);
            assert!(!t.delivered);
        }
    }

    #[test]
    fn step_before_reset_rejected() {
        let mut env = Environment::new(tiny_config()).unwrap();
        assert!(matches!(
            env.step(Action::new(0.0, 0.0)),
            Err(EnvError::NotReset)
        ));
    }

    #[test]
    fn hover_propulsion_is_hover_power_times_slot() {
        let mut env = Environment::new(tiny_config()).unwrap();
        env.reset(5);
        let out = env.step(Action::new(0.0, 0.0)).unwrap();
        let expected = PropulsionModel::default().hover_power() * env.config().slot_duration;
        assert!((out.info.propulsion - expected).abs() < 1e-12);
        assert_eq!(env.uav().position, [150.0, 150.0]);
    }

    #[test]
    fn sub_threshold_commands_hover() {
        let mut env = Environment::new(tiny_config()).unwrap();
        env.reset(5);
        env.step(Action::new(0.2, 0.1)).unwrap();
        assert_eq!(env.uav().position, [150.0, 150.0]);
    }

    #[test]
    fn movement_is_constant_speed_along_heading() {
        let mut env = Environment::new(tiny_config()).unwrap();
        env.reset(5);
        env.step(Action::new(1.0, 0.0)).unwrap();
        let step_len = env.config().uav_speed * env.config().slot_duration;
        assert!((env.uav().position[0] - (150.0 + step_len)).abs() < 1e-12);
        assert!((env.uav().position[1] - 150.0).abs() < 1e-12);
        // Direction matters, magnitude beyond the threshold does not.
        let mut env2 = Environment::new(tiny_config()).unwrap();
        env2.reset(5);
        env2.step(Action::new(0.5, 0.0)).unwrap();
        assert_eq!(env.uav().position, env2.uav().position);
    }

    #[test]
    fn accounting_identity_holds_per_slot() {
        let mut env = Environment::new(tiny_config()).unwrap();
        env.reset(11);
        let mut rng = crate::seed::rng(11, 99);
        let mut cumulative = 0.0;
        for _ in 0..30 {
            if env.is_done() {
                break;
            }
            let a = Action::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let out = env.step(a).unwrap();
            let i = &out.info;
            assert!(i.terminal_tx >= 0.0 && i.propulsion >= 0.0 && i.wpt >= 0.0 && i.relay >= 0.0);
            cumulative += i.total();
            assert!((cumulative - env.total_energy()).abs() <= 1e-9 * cumulative.max(1.0));
        }
    }

    #[test]
    fn seeded_rollout_replays_identically() {
        let run = |seed: u64| {
            let mut env = Environment::new(tiny_config()).unwrap();
            env.reset(seed);
            let mut rng = crate::seed::rng(seed, 42);
            let mut energies = Vec::new();
            for _ in 0..50 {
                if env.is_done() {
                    break;
                }
                let a = Action::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let out = env.step(a).unwrap();
                energies.push(out.info.total());
            }
            (energies, env.total_energy())
        };
        assert_eq!(run(9), run(9));
    }

    #[test]
    fn uav_stays_inside_area() {
        let mut env = Environment::new(tiny_config()).unwrap();
        env.reset(2);
        // Push hard against the corner for many slots.
        for _ in 0..30 {
            if env.is_done() {
                break;
            }
            env.step(Action::new(1.0, 1.0)).unwrap();
            let p = env.uav().position;
            let side = env.config().area_side;
            assert!(p[0] >= 0.0 && p[0] <= side && p[1] >= 0.0 && p[1] <= side);
        }
    }

    #[test]
    fn energy_causality_holds_everywhere() {
        let mut env = Environment::new(tiny_config()).unwrap();
        env.reset(13);
        let mut rng = crate::seed::rng(13, 7);
        for _ in 0..40 {
            if env.is_done() {
                break;
            }
            let a = Action::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            env.step(a).unwrap();
            for t in env.terminals() {
                assert!(
                    t.spent_energy <= t.harvested_energy + 1e-15,
                    "spent {} > harvested {}",
                    t.spent_energy,
                    t.harvested_energy
                );
            }
        }
    }

    #[test]
    fn residual_data_is_monotone_nonincreasing() {
        let mut env = Environment::new(tiny_config()).unwrap();
        env.reset(17);
        let mut prev: Vec<f64> = env.terminals().iter().map(|t| t.residual_data).collect();
        for _ in 0..40 {
            if env.is_done() {
                break;
            }
            env.step(Action::new(0.0, 0.0)).unwrap();
            for (t, p) in env.terminals().iter().zip(&prev) {
                assert!(t.residual_data <= *p + 1e-12);
                assert_eq!(t.delivered, t.residual_data == 0.0);
            }
            prev = env.terminals().iter().map(|t| t.residual_data).collect();
        }
    }

    #[test]
    fn finished_episode_rejects_steps() {
        let cfg = WorldConfig {
            horizon: 2,
            n_terminals: 2,
            ..WorldConfig::default()
        };
        let mut env = Environment::new(cfg).unwrap();
        env.reset(1);
        env.step(Action::new(0.0, 0.0)).unwrap();
        let out = env.step(Action::new(0.0, 0.0)).unwrap();
        assert!(out.done);
        assert!(matches!(
            env.step(Action::new(0.0, 0.0)),
            Err(EnvError::EpisodeFinished)
        ));
    }

    #[test]
    fn constraint_check_boundary_conventions() {
        // SNR exactly at threshold passes.
        let v = constraint_check(Some((2.0, 5e5)), None, 2.0, 1e5, 150);
        assert!(!v.any());
        // Below threshold flags decode; weak rate flags throughput.
        let v = constraint_check(Some((0.5, 5e4)), None, 2.0, 1e5, 150);
        assert!(v.decode && v.throughput && !v.freshness);
        // Stale pending terminal flags freshness even without a transmission.
        let v = constraint_check(None, Some(41), 2.0, 1e5, 40);
        assert!(v.freshness && !v.decode && !v.throughput);
        // At the deadline is still fresh.
        let v = constraint_check(None, Some(40), 2.0, 1e5, 40);
        assert!(!v.any());
    }

    #[test]
    fn freshness_violation_fires_past_deadline_in_rollout() {
        // Park the UAV in a corner far from everything; terminals never get
        // charged enough to transmit, so ages keep climbing.
        let cfg = WorldConfig {
            aoi_max: 40,
            horizon: 60,
            n_terminals: 3,
            ..WorldConfig::default()
        };
        let mut env = Environment::new(cfg).unwrap();
        env.reset(23);
        let mut first_violation_slot = None;
        for slot in 0..60 {
            if env.is_done() {
                break;
            }
            // Hug the origin corner.
            let out = env.step(Action::new(-1.0, -1.0)).unwrap();
            if out.info.violations.freshness && first_violation_slot.is_none() {
                first_violation_slot = Some(slot + 1);
            }
        }
        assert_eq!(first_violation_slot, Some(41));
    }

    #[test]
    fn factors_are_in_range_across_a_rollout() {
        let mut env = Environment::new(tiny_config()).unwrap();
        env.reset(29);
        let mut rng = crate::seed::rng(29, 5);
        for _ in 0..40 {
            if env.is_done() {
                break;
            }
            let a = Action::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let out = env.step(a).unwrap();
            assert!(out.factors.in_range(2.0), "{:?}", out.factors);
            let _ = FactorValues::zeros();
        }
    }

    #[test]
    fn violation_labels_are_stable() {
        let v = Violations {
            decode: true,
            throughput: false,
            freshness: true,
        };
        assert_eq!(v.label(), "decode|freshness");
        assert_eq!(Violations::default().label(), "");
        assert_eq!(v.count(), 2);
    }
}
