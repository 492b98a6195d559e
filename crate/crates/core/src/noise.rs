//! Noise-line conventions, effective temperatures and field spectra.

use crate::error::{non_negative, nonzero, positive, Error, Result};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;

/// Signed angular frequency in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Frequency(f64);

impl Frequency {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(Frequency(value))
        } else {
            Err(Error::BadFrequency { name: "omega", value })
        }
    }

    /// Frequency in Hz converted to rad/s.
    pub fn from_hz(hz: f64) -> Result<Self> {
        Self::new(core::f64::consts::TAU * hz)
    }

    /// Same as [`Frequency::new`] but also rejects zero, for quantities that divide by ω.
    pub fn nonzero(value: f64) -> Result<Self> {
        nonzero("omega", value).map(Frequency)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn abs(self) -> f64 {
        self.0.abs()
    }

    pub fn hz(self) -> f64 {
        self.0 / core::f64::consts::TAU
    }
}

/// Energy per mode `k_B·Θ`, in joules.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EffectiveTemperature {
    energy_per_mode: f64,
}

impl EffectiveTemperature {
    pub fn energy(self) -> f64 {
        self.energy_per_mode
    }

    /// Θ in kelvin.
    pub fn kelvin(self) -> f64 {
        self.energy_per_mode / K_B
    }
}

/// coth with the asymptote taken above 30 and the Laurent series below 1e-8.
pub fn coth(x: f64) -> f64 {
    if x > 30.0 {
        1.0
    } else if x < 1e-8 {
        1.0 / x + x / 3.0
    } else {
        1.0 / libm::tanh(x)
    }
}

/// `k_BΘ = (ħ|ω|/2)·coth(ħ|ω|/2k_BT)`; exactly `ħ|ω|/2` at `T = 0`.
pub fn effective_temperature(t: f64, omega: f64) -> Result<EffectiveTemperature> {
    let w = Frequency::nonzero(omega)?.abs();
    let t = non_negative("temperature", t)?;
    let zero_point = 0.5 * HBAR * w;
    let energy_per_mode = if t == 0.0 {
        zero_point
    } else {
        zero_point * coth(zero_point / (K_B * t))
    };
    Ok(EffectiveTemperature { energy_per_mode })
}

/// A dissipative or amplifier noise port.
///
/// `impedance` is in ohms for electrical lines and kg/s for the mechanical one.
/// `conjugated` marks the amplifier current field, whose operators enter the
/// circuit equations with creation and annihilation exchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseLine {
    pub label: &'static str,
    pub impedance: f64,
    pub temperature: f64,
    pub conjugated: bool,
}

impl NoiseLine {
    pub fn new(label: &'static str, impedance: f64, temperature: f64) -> Result<Self> {
        positive("impedance", impedance)?;
        non_negative("temperature", temperature)?;
        Ok(NoiseLine { label, impedance, temperature, conjugated: false })
    }

    pub fn conjugated(mut self) -> Self {
        self.conjugated = true;
        self
    }
}

/// Symmetrized spectrum of the incoming field, `½·coth(ħ|ω|/2k_BT)`.
pub fn input_spectrum(line: &NoiseLine, omega: f64) -> Result<f64> {
    let theta = effective_temperature(line.temperature, omega)?;
    Ok(theta.energy() / (HBAR * omega.abs()))
}

/// Spectrum of either slow quadrature around the carrier, `2k_BΘ(ω_t)/(ħω_t)`.
pub fn quadrature_spectrum(line: &NoiseLine, omega_t: f64) -> Result<f64> {
    if !(omega_t > 0.0) || !omega_t.is_finite() {
        return Err(Error::BadFrequency { name: "omega_t", value: omega_t });
    }
    let theta = effective_temperature(line.temperature, omega_t)?;
    Ok(2.0 * theta.energy() / (HBAR * omega_t))
}
