//! Air-to-ground channel: distance path loss with Rician small-scale fading.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::EnvError;

/// Samples the small-scale power |h|^2 of a unit-mean-power Rician channel.
///
/// The line-of-sight component has amplitude sqrt(K/(K+1)) and the scattered
/// component is circularly symmetric Gaussian with total variance 1/(K+1),
/// so E[|h|^2] = 1 for every K. K = 0 degenerates to Rayleigh fading and an
/// infinite K returns exactly 1 (pure line of sight).
pub fn rician_power<R: Rng + ?Sized>(rician_k: f64, rng: &mut R) -> f64 {
    if rician_k.is_infinite() {
        return 1.0;
    }
    let los = (rician_k / (rician_k + 1.0)).sqrt();
    let sigma = (0.5 / (rician_k + 1.0)).sqrt();
    let re: f64 = los + sigma * StandardNormal.sample(rng);
    let im: f64 = sigma * StandardNormal.sample(rng);
    re * re + im * im
}

/// Fading channel with power-law path loss.
#[derive(Debug, Clone, Copy)]
pub struct Channel {
    /// Reference path gain at 1 m (linear).
    pub ref_gain: f64,
    /// Path loss exponent.
    pub exponent: f64,
    /// Rician K factor (linear).
    pub rician_k: f64,
}

impl Channel {
    /// Instantaneous channel power gain at `distance_3d` meters.
    ///
    /// gain = ref_gain * d^(-exponent) * |h|^2 with |h|^2 drawn from `rng`.
    pub fn gain<R: Rng + ?Sized>(&self, distance_3d: f64, rng: &mut R) -> Result<f64, EnvError> {
        if !(distance_3d > 0.0) {
            return Err(EnvError::NonPositiveDistance(distance_3d));
        }
        let pathloss = self.ref_gain * distance_3d.powf(-self.exponent);
        Ok(pathloss * rician_power(self.rician_k, rng))
    }

    /// Deterministic mean gain (|h|^2 replaced by its unit mean).
    pub fn mean_gain(&self, distance_3d: f64) -> Result<f64, EnvError> {
        if !(distance_3d > 0.0) {
            return Err(EnvError::NonPositiveDistance(distance_3d));
        }
        Ok(self.ref_gain * distance_3d.powf(-self.exponent))
    }
}

/// Shannon-capacity uplink rate in bits/second.
///
/// Transmit power is bounded by `p_tx_max`; anything above is a caller bug
/// surfaced as an error rather than silently clamped.
pub fn uplink_rate(
    bandwidth: f64,
    noise_power: f64,
    p_tx_max: f64,
    gain: f64,
    p_tx: f64,
) -> Result<f64, EnvError> {
    if !(gain >= 0.0) {
        return Err(EnvError::NegativeGain(gain));
    }
    if !(p_tx > 0.0) || p_tx > p_tx_max {
        return Err(EnvError::TransmitPowerOutOfRange { p_tx, p_tx_max });
    }
    let snr = p_tx * gain / noise_power;
    Ok(bandwidth * (1.0 + snr).log2())
}
