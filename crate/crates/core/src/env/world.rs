//! The slotted-time world simulation.
//!
//! Each slot: the UAV moves (or hovers), broadcasts charging power to every
//! undelivered terminal, schedules at most one uplink transmission, relays
//! decoded bits onward, and updates ages and energy ledgers. Everything is
//! driven by one seeded generator owned by the instance, so identical
//! (config, seed, action sequence) triples replay bit-identically.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::channel::{uplink_rate, Channel};
use super::config::WorldConfig;
use super::power::{harvest, PropulsionModel};
use super::{EnvError, Violations};
use crate::reward::{FactorValues, DEFAULT_PENALTY_MULTIPLIER};
use crate::seed;

/// Flat observation vector. Layout: UAV position (2, normalized by the area
/// side), then per terminal: relative position (2), residual-data fraction,
/// age fraction, harvested-energy fraction.
pub type Observation = Vec<f64>;

/// Continuous movement command; both components live in [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Action {
    pub x: f64,
    pub y: f64,
}

impl Action {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Components clamped into [-1, 1] before interpretation.
    pub fn clamped(self) -> Self {
        Self {
            x: self.x.clamp(-1.0, 1.0),
            y: self.y.clamp(-1.0, 1.0),
        }
    }
}

/// Commands below this norm mean "hover".
pub const MOVE_THRESHOLD: f64 = 0.3;

/// One terminal's mutable episode state.
#[derive(Debug, Clone)]
pub struct TerminalState {
    /// Ground position, fixed for the episode.
    pub position: [f64; 2],
    /// Bits of its packet still undelivered.
    pub residual_data: f64,
    /// Energy harvested from the UAV so far, joules.
    pub harvested_energy: f64,
    /// Energy spent transmitting so far, joules.
    pub spent_energy: f64,
    /// Slots since packet generation; frozen at delivery.
    pub aoi: u32,
    pub delivered: bool,
}

/// UAV pose and cumulative energy ledgers.
#[derive(Debug, Clone)]
pub struct UavState {
    pub position: [f64; 2],
    /// Cumulative propulsion energy, joules.
    pub propulsion_energy: f64,
    /// Cumulative communication energy (charging + relay), joules.
    pub comm_energy: f64,
}

/// Per-slot energy breakdown and event record.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotInfo {
    /// Terminal transmit energy this slot, joules.
    pub terminal_tx: f64,
    /// UAV propulsion energy this slot, joules.
    pub propulsion: f64,
    /// UAV charging broadcast energy this slot, joules.
    pub wpt: f64,
    /// UAV relay energy this slot, joules.
    pub relay: f64,
    pub violations: Violations,
    /// Index of the terminal scheduled for uplink, if any.
    pub scheduled: Option<usize>,
    /// SNR of the scheduled transmission.
    pub snr: Option<f64>,
    /// Bits decoded and relayed this slot.
    pub bits_delivered: f64,
}

impl SlotInfo {
    /// Total system energy spent this slot.
    pub fn total(&self) -> f64 {
        self.terminal_tx + self.propulsion + self.wpt + self.relay
    }
}

/// Everything a learner needs back from one slot.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub observation: Observation,
    pub factors: FactorValues,
    pub done: bool,
    pub info: SlotInfo,
}

/// Decides the slot's violation set from the transmission record and ages.
///
/// Power limits need no check here: transmit power is structurally capped at
/// `p_tx_max` everywhere it is used.
pub fn constraint_check(
    transmission: Option<(f64, f64)>, // (snr, rate) of the scheduled uplink
    max_undelivered_aoi: Option<u32>,
    snr_threshold: f64,
    min_throughput: f64,
    aoi_max: u32,
) -> Violations {
    let mut v = Violations::default();
    if let Some((snr, rate)) = transmission {
        // Equality passes: the decoder works at exactly the threshold.
        if snr < snr_threshold {
            v.decode = true;
        }
        if rate < min_throughput {
            v.throughput = true;
        }
    }
    if let Some(aoi) = max_undelivered_aoi {
        if aoi > aoi_max {
            v.freshness = true;
        }
    }
    v
}

/// The simulation instance. Single-threaded; spawn one per worker.
#[derive(Debug, Clone)]
pub struct Environment {
    cfg: WorldConfig,
    channel: Channel,
    propulsion: PropulsionModel,
    penalty_multiplier: f64,
    rng: ChaCha8Rng,
    uav: UavState,
    terminals: Vec<TerminalState>,
    slot: u32,
    started: bool,
    done: bool,
    total_energy: f64,
    // Normalization references, fixed per configuration.
    ref_slot_energy: f64,
    ref_slot_capacity: f64,
    ref_harvest_budget: f64,
    gain_scratch: Vec<f64>,
}

impl Environment {
    pub fn new(cfg: WorldConfig) -> Result<Self, EnvError> {
        cfg.validate()?;
        let channel = Channel {
            ref_gain: cfg.pathloss_ref_gain,
            exponent: cfg.pathloss_exponent,
            rician_k: cfg.rician_k,
        };
        let propulsion = PropulsionModel::default();
        // Worst plausible propulsion over the admissible speed range.
        let max_prop = (0..=100)
            .map(|i| {
                let v = cfg.uav_speed * i as f64 / 100.0;
                propulsion.power(v).expect("speed grid is non-negative")
            })
            .fold(0.0_f64, f64::max);
        let ref_slot_energy =
            (max_prop + cfg.p_wpt + cfg.p_relay + cfg.p_tx_max) * cfg.slot_duration;
        // Nominal best-case uplink: directly overhead, mean fading power.
        let overhead_gain = cfg.pathloss_ref_gain * cfg.uav_altitude.powf(-cfg.pathloss_exponent);
        let best_rate = cfg.bandwidth * (1.0 + cfg.p_tx_max * overhead_gain / cfg.noise_power).log2();
        let ref_slot_capacity = (best_rate * cfg.slot_duration).max(f64::MIN_POSITIVE);
        // "Fully charged" scale for observations: ten transmit slots of energy.
        let ref_harvest_budget = 10.0 * cfg.p_tx_max * cfg.slot_duration;
        let n = cfg.n_terminals;
        Ok(Self {
            rng: seed::rng(cfg.seed, 0),
            cfg,
            channel,
            propulsion,
            penalty_multiplier: DEFAULT_PENALTY_MULTIPLIER,
            uav: UavState {
                position: [0.0, 0.0],
                propulsion_energy: 0.0,
                comm_energy: 0.0,
            },
            terminals: Vec::with_capacity(n),
            slot: 0,
            started: false,
            done: false,
            total_energy: 0.0,
            ref_slot_energy,
            ref_slot_capacity,
            ref_harvest_budget,
            gain_scratch: vec![0.0; n],
        })
    }

    /// Overrides the multiplier reported in [`FactorValues::penalty`].
    pub fn with_penalty_multiplier(mut self, multiplier: f64) -> Self {
        self.penalty_multiplier = multiplier;
        self
    }

    /// Starts a fresh episode: terminals placed uniformly at random from the
    /// seeded generator, UAV at the area center, ledgers zeroed.
    pub fn reset(&mut self, episode_seed: u64) -> Observation {
        self.rng = seed::rng(episode_seed, 0);
        let side = self.cfg.area_side;
        self.terminals.clear();
        for _ in 0..self.cfg.n_terminals {
            let x = self.rng.gen_range(0.0..side);
            let y = self.rng.gen_range(0.0..side);
            self.terminals.push(TerminalState {
                position: [x, y],
                residual_data: self.cfg.packet_size,
                harvested_energy: 0.0,
                spent_energy: 0.0,
                aoi: 0,
                delivered: false,
            });
        }
        self.uav = UavState {
            position: [side / 2.0, side / 2.0],
            propulsion_energy: 0.0,
            comm_energy: 0.0,
        };
        self.slot = 0;
        self.started = true;
        self.done = false;
        self.total_energy = 0.0;
        self.observation()
    }

    /// Advances one slot.
    pub fn step(&mut self, action: Action) -> Result<StepOutcome, EnvError> {
        if !self.started {
            return Err(EnvError::NotReset);
        }
        if self.done {
            return Err(EnvError::EpisodeFinished);
        }
        let cfg = &self.cfg;
        let dt = cfg.slot_duration;

        // Movement: constant cruise speed along the commanded heading, or
        // hover below the norm threshold. Propulsion is billed for the
        // distance actually flown after clamping to the area.
        let a = action.clamped();
        let norm = (a.x * a.x + a.y * a.y).sqrt();
        let effective_speed = if norm >= MOVE_THRESHOLD {
            let heading = a.y.atan2(a.x);
            let step_len = cfg.uav_speed * dt;
            let raw = [
                self.uav.position[0] + step_len * heading.cos(),
                self.uav.position[1] + step_len * heading.sin(),
            ];
            let clamped = [
                raw[0].clamp(0.0, cfg.area_side),
                raw[1].clamp(0.0, cfg.area_side),
            ];
            let moved = ((clamped[0] - self.uav.position[0]).powi(2)
                + (clamped[1] - self.uav.position[1]).powi(2))
            .sqrt();
            self.uav.position = clamped;
            moved / dt
        } else {
            0.0
        };
        let e_prop = self.propulsion.power(effective_speed)? * dt;

        // Per-terminal instantaneous gains; one coherence block per slot is
        // shared by charging and uplink.
        let any_pending = self.terminals.iter().any(|t| !t.delivered);
        for (idx, t) in self.terminals.iter().enumerate() {
            self.gain_scratch[idx] = if t.delivered {
                0.0
            } else {
                let d = dist3(self.uav.position, t.position, cfg.uav_altitude);
                self.channel.gain(d, &mut self.rng)?
            };
        }

        // Charging broadcast.
        let mut e_wpt = 0.0;
        if any_pending {
            e_wpt = cfg.p_wpt * dt;
            for (idx, t) in self.terminals.iter_mut().enumerate() {
                if !t.delivered {
                    t.harvested_energy += harvest(
                        cfg.harvest_efficiency,
                        cfg.p_wpt,
                        self.gain_scratch[idx],
                        dt,
                    )?;
                }
            }
        }

        // Uplink scheduling: best instantaneous gain among terminals that can
        // afford a full slot at the power cap. Exact ties keep the lowest index.
        let slot_cost = cfg.p_tx_max * dt;
        let mut best: Option<(usize, f64)> = None;
        for (idx, t) in self.terminals.iter().enumerate() {
            if t.delivered || t.harvested_energy - t.spent_energy < slot_cost {
                continue;
            }
            let g = self.gain_scratch[idx];
            if best.map_or(true, |(_, bg)| g > bg) {
                best = Some((idx, g));
            }
        }
        let scheduled = best.map(|(i, _)| i);

        let mut e_tx = 0.0;
        let mut e_relay = 0.0;
        let mut bits_delivered = 0.0;
        let mut tx_record = None;
        if let Some(idx) = scheduled {
            let gain = self.gain_scratch[idx];
            let snr = cfg.p_tx_max * gain / cfg.noise_power;
            let rate = uplink_rate(cfg.bandwidth, cfg.noise_power, cfg.p_tx_max, gain, cfg.p_tx_max)?;
            tx_record = Some((snr, rate));
            let t = &mut self.terminals[idx];
            if snr >= cfg.snr_threshold {
                let tx_time = dt.min(t.residual_data / rate);
                let bits = rate * tx_time;
                t.residual_data = (t.residual_data - bits).max(0.0);
                if t.residual_data <= 1e-9 {
                    t.residual_data = 0.0;
                    t.delivered = true;
                }
                t.spent_energy += cfg.p_tx_max * tx_time;
                e_tx = cfg.p_tx_max * tx_time;
                e_relay = cfg.p_relay * tx_time;
                bits_delivered = bits;
            } else {
                // Undecodable: the whole slot's transmission is wasted.
                t.spent_energy += slot_cost;
                e_tx = slot_cost;
            }
        }

        // Ages tick for everything still pending after this slot's delivery.
        let mut max_pending_aoi = None;
        for t in &mut self.terminals {
            if !t.delivered {
                t.aoi += 1;
                max_pending_aoi = Some(max_pending_aoi.map_or(t.aoi, |m: u32| m.max(t.aoi)));
            }
        }

        let violations = constraint_check(
            tx_record,
            max_pending_aoi,
            cfg.snr_threshold,
            cfg.min_throughput,
            cfg.aoi_max,
        );

        self.slot += 1;
        let all_delivered = self.terminals.iter().all(|t| t.delivered);
        self.done = all_delivered || self.slot >= cfg.horizon;

        self.uav.propulsion_energy += e_prop;
        self.uav.comm_energy += e_wpt + e_relay;
        let info = SlotInfo {
            terminal_tx: e_tx,
            propulsion: e_prop,
            wpt: e_wpt,
            relay: e_relay,
            violations,
            scheduled,
            snr: tx_record.map(|(snr, _)| snr),
            bits_delivered,
        };
        self.total_energy += info.total();

        let factors = self.factors(&info);
        Ok(StepOutcome {
            observation: self.observation(),
            factors,
            done: self.done,
            info,
        })
    }

    fn factors(&self, info: &SlotInfo) -> FactorValues {
        let cfg = &self.cfg;
        let energy = (info.total() / self.ref_slot_energy).clamp(0.0, 1.0);
        let pending: Vec<&TerminalState> =
            self.terminals.iter().filter(|t| !t.delivered).collect();
        let position = if pending.is_empty() {
            0.0
        } else {
            let inv = 1.0 / pending.len() as f64;
            let cx = pending.iter().map(|t| t.position[0]).sum::<f64>() * inv;
            let cy = pending.iter().map(|t| t.position[1]).sum::<f64>() * inv;
            let d = ((self.uav.position[0] - cx).powi(2) + (self.uav.position[1] - cy).powi(2))
                .sqrt();
            (d / (cfg.area_side * std::f64::consts::SQRT_2)).clamp(0.0, 1.0)
        };
        let aoi = pending
            .iter()
            .map(|t| t.aoi as f64 / cfg.aoi_max as f64)
            .fold(0.0_f64, f64::max)
            .clamp(0.0, 1.0);
        let throughput = (info.bits_delivered / self.ref_slot_capacity).clamp(0.0, 1.0);
        let penalty = if info.violations.any() {
            self.penalty_multiplier
        } else {
            1.0
        };
        FactorValues {
            energy,
            position,
            aoi,
            throughput,
            penalty,
        }
    }

    /// Current observation vector; see [`Observation`] for the layout.
    pub fn observation(&self) -> Observation {
        let cfg = &self.cfg;
        let side = cfg.area_side;
        let mut obs = Vec::with_capacity(cfg.observation_len());
        obs.push(self.uav.position[0] / side);
        obs.push(self.uav.position[1] / side);
        for t in &self.terminals {
            obs.push((t.position[0] - self.uav.position[0]) / side);
            obs.push((t.position[1] - self.uav.position[1]) / side);
            obs.push(t.residual_data / cfg.packet_size);
            obs.push((t.aoi as f64 / cfg.aoi_max as f64).min(1.0));
            obs.push((t.harvested_energy / self.ref_harvest_budget).min(1.0));
        }
        obs
    }

    pub fn config(&self) -> &WorldConfig {
        &self.cfg
    }

    pub fn uav(&self) -> &UavState {
        &self.uav
    }

    pub fn terminals(&self) -> &[TerminalState] {
        &self.terminals
    }

    pub fn slot(&self) -> u32 {
        self.slot
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn packets_delivered(&self) -> usize {
        self.terminals.iter().filter(|t| t.delivered).count()
    }

    /// Cumulative system energy across the episode so far, joules.
    pub fn total_energy(&self) -> f64 {
        self.total_energy
    }

    /// Worst-case slot energy used to normalize the energy factor.
    pub fn reference_slot_energy(&self) -> f64 {
        self.ref_slot_energy
    }
}

fn dist3(a: [f64; 2], b: [f64; 2], altitude: f64) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy + altitude * altitude).sqrt()
}
