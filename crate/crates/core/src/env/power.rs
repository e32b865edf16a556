//! Rotary-wing propulsion power and RF energy harvesting.

use super::EnvError;

/// Rotary-wing propulsion model.
///
/// P(V) = P0 (1 + 3 V^2 / U_tip^2)
///      + Pi (sqrt(1 + V^4 / (4 v0^4)) - V^2 / (2 v0^2))^(1/2)
///      + (1/2) d0 rho s A V^3
///
/// The three terms are blade profile power, induced power, and parasite
/// (fuselage drag) power. Hovering costs P0 + Pi.
#[derive(Debug, Clone, Copy)]
pub struct PropulsionModel {
    /// Blade profile power in hover, watts.
    pub p0: f64,
    /// Induced power in hover, watts.
    pub p_i: f64,
    /// Rotor tip speed, m/s.
    pub u_tip: f64,
    /// Mean rotor induced velocity in hover, m/s.
    pub v0: f64,
    /// Fuselage drag ratio.
    pub d0: f64,
    /// Air density, kg/m^3.
    pub rho: f64,
    /// Rotor solidity.
    pub s: f64,
    /// Rotor disc area, m^2.
    pub a: f64,
}

impl Default for PropulsionModel {
    fn default() -> Self {
        Self {
            p0: 79.86,
            p_i: 88.63,
            u_tip: 120.0,
            v0: 4.03,
            d0: 0.6,
            rho: 1.225,
            s: 0.05,
            a: 0.503,
        }
    }
}

impl PropulsionModel {
    /// Propulsion power at forward speed `v` (m/s).
    pub fn power(&self, v: f64) -> Result<f64, EnvError> {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(EnvError::NegativeSpeed(v));
        }
        let v2 = v * v;
        let blade = self.p0 * (1.0 + 3.0 * v2 / (self.u_tip * self.u_tip));
        let v0_2 = self.v0 * self.v0;
        let induced_inner = (1.0 + v2 * v2 / (4.0 * v0_2 * v0_2)).sqrt() - v2 / (2.0 * v0_2);
        let induced = self.p_i * induced_inner.sqrt();
        let parasite = 0.5 * self.d0 * self.rho * self.s * self.a * v2 * v;
        Ok(blade + induced + parasite)
    }

    /// Hover power, P(0) = P0 + Pi.
    pub fn hover_power(&self) -> f64 {
        self.p0 + self.p_i
    }
}

/// Energy harvested from a WPT broadcast over `duration` seconds.
///
/// Linear model: efficiency * p_wpt * gain * duration.
pub fn harvest(
    efficiency: f64,
    p_wpt: f64,
    gain: f64,
    duration: f64,
) -> Result<f64, EnvError> {
    if !(gain >= 0.0) {
        return Err(EnvError::NegativeGain(gain));
    }
    if !(duration > 0.0) {
        return Err(EnvError::NonPositiveDuration(duration));
    }
    Ok(efficiency * p_wpt * gain * duration)
}
