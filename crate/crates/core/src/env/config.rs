//! World configuration and validation.

use serde::{Deserialize, Serialize};

use crate::config::{ConfigError, KvMap};

/// Static description of the world: geometry, radio, power, and constraint
/// parameters. All values are SI units unless noted.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WorldConfig {
    /// Side of the square service area, meters.
    pub area_side: f64,
    /// Number of IoT terminals deployed per episode.
    pub n_terminals: usize,
    /// Fixed UAV flight altitude, meters.
    pub uav_altitude: f64,
    /// Constant UAV cruise speed when moving, meters/second.
    pub uav_speed: f64,
    /// Length of one decision slot, seconds.
    pub slot_duration: f64,
    /// Slots per episode.
    pub horizon: u32,
    /// Uplink bandwidth, Hz.
    pub bandwidth: f64,
    /// Receiver noise power, watts.
    pub noise_power: f64,
    /// Rician K factor (linear). 0 is Rayleigh; `inf` is pure line of sight.
    pub rician_k: f64,
    /// Reference path gain at 1 m (linear).
    pub pathloss_ref_gain: f64,
    /// Path loss exponent.
    pub pathloss_exponent: f64,
    /// UAV downlink charging power, watts.
    pub p_wpt: f64,
    /// UAV-to-base-station relay power, watts.
    pub p_relay: f64,
    /// Terminal transmit power limit, watts.
    pub p_tx_max: f64,
    /// RF-to-stored-energy conversion efficiency, (0, 1].
    pub harvest_efficiency: f64,
    /// Packet size per terminal, bits.
    pub packet_size: f64,
    /// Minimum SNR (linear) for the receiver to decode a slot.
    pub snr_threshold: f64,
    /// Data-freshness deadline, slots.
    pub aoi_max: u32,
    /// Minimum acceptable uplink rate, bits/second.
    pub min_throughput: f64,
    /// Default placement seed; runs usually override it.
    pub seed: u64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self {
            area_side: 300.0,
            n_terminals: 10,
            uav_altitude: 20.0,
            uav_speed: 10.0,
            slot_duration: 0.5,
            horizon: 200,
            bandwidth: 1.0e6,
            noise_power: 1.0e-13,
            rician_k: 10.0,
            pathloss_ref_gain: 1.0e-3,
            pathloss_exponent: 2.1,
            p_wpt: 20.0,
            p_relay: 0.5,
            p_tx_max: 5.0e-6,
            harvest_efficiency: 0.6,
            packet_size: 2.0e6,
            snr_threshold: 2.0,
            aoi_max: 150,
            min_throughput: 1.0e5,
            seed: 0,
        }
    }
}

impl WorldConfig {
    /// Checks every invariant, reporting the offending field by name.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive: [(&str, f64); 13] = [
            ("area_side", self.area_side),
            ("uav_altitude", self.uav_altitude),
            ("uav_speed", self.uav_speed),
            ("slot_duration", self.slot_duration),
            ("bandwidth", self.bandwidth),
            ("noise_power", self.noise_power),
            ("pathloss_ref_gain", self.pathloss_ref_gain),
            ("pathloss_exponent", self.pathloss_exponent),
            ("p_wpt", self.p_wpt),
            ("p_relay", self.p_relay),
            ("p_tx_max", self.p_tx_max),
            ("packet_size", self.packet_size),
            ("min_throughput", self.min_throughput),
        ];
        for (field, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(invalid(field, format!("must be strictly positive, got {value}")));
            }
        }
        if self.n_terminals < 1 {
            return Err(invalid("n_terminals", "at least one terminal required".into()));
        }
        if self.horizon < 1 {
            return Err(invalid("horizon", "must be at least one slot".into()));
        }
        if self.aoi_max < 1 {
            return Err(invalid("aoi_max", "must be at least one slot".into()));
        }
        if !(self.harvest_efficiency > 0.0 && self.harvest_efficiency <= 1.0) {
            return Err(invalid(
                "harvest_efficiency",
                format!("must lie in (0, 1], got {}", self.harvest_efficiency),
            ));
        }
        if !(self.rician_k >= 0.0) {
            return Err(invalid(
                "rician_k",
                format!("must be non-negative, got {}", self.rician_k),
            ));
        }
        if !(self.snr_threshold > 0.0 && self.snr_threshold.is_finite()) {
            return Err(invalid(
                "snr_threshold",
                format!("must be strictly positive, got {}", self.snr_threshold),
            ));
        }
        // One slot of flight must never cross the whole area.
        if self.uav_speed * self.slot_duration >= self.area_side {
            return Err(invalid(
                "uav_speed",
                format!(
                    "uav_speed * slot_duration = {} must stay below area_side = {}",
                    self.uav_speed * self.slot_duration,
                    self.area_side
                ),
            ));
        }
        Ok(())
    }

    /// Observation vector length for this configuration.
    pub fn observation_len(&self) -> usize {
        2 + 5 * self.n_terminals
    }

    /// Reads a config from a `key = value` map; absent keys keep defaults.
    pub fn from_kv(mut map: KvMap) -> Result<Self, ConfigError> {
        let d = Self::default();
        let cfg = Self {
            area_side: map.take_parsed("area_side", d.area_side)?,
            n_terminals: map.take_parsed("n_terminals", d.n_terminals)?,
            uav_altitude: map.take_parsed("uav_altitude", d.uav_altitude)?,
            uav_speed: map.take_parsed("uav_speed", d.uav_speed)?,
            slot_duration: map.take_parsed("slot_duration", d.slot_duration)?,
            horizon: map.take_parsed("horizon", d.horizon)?,
            bandwidth: map.take_parsed("bandwidth", d.bandwidth)?,
            noise_power: map.take_parsed("noise_power", d.noise_power)?,
            rician_k: map.take_parsed("rician_k", d.rician_k)?,
            pathloss_ref_gain: map.take_parsed("pathloss_ref_gain", d.pathloss_ref_gain)?,
            pathloss_exponent: map.take_parsed("pathloss_exponent", d.pathloss_exponent)?,
            p_wpt: map.take_parsed("p_wpt", d.p_wpt)?,
            p_relay: map.take_parsed("p_relay", d.p_relay)?,
            p_tx_max: map.take_parsed("p_tx_max", d.p_tx_max)?,
            harvest_efficiency: map.take_parsed("harvest_efficiency", d.harvest_efficiency)?,
            packet_size: map.take_parsed("packet_size", d.packet_size)?,
            snr_threshold: map.take_parsed("snr_threshold", d.snr_threshold)?,
            aoi_max: map.take_parsed("aoi_max", d.aoi_max)?,
            min_throughput: map.take_parsed("min_throughput", d.min_throughput)?,
            seed: map.take_parsed("seed", d.seed)?,
        };
        map.finish()?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn invalid(field: &str, message: String) -> ConfigError {
    ConfigError::InvalidField {
        field: field.to_string(),
        message,
    }
}
