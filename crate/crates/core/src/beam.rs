//! Electron beam kinematics: relativistic wavelength and the interaction
//! constant that converts projected electrostatic potential into phase.

use alloc::format;
use core::f64::consts::PI;

use crate::constants::CODATA_2018;
use crate::error::{Error, Result};
#[allow(unused_imports)] // unused whenever std is linked
use num_traits::Float;

fn check_voltage(accelerating_voltage: f64) -> Result<()> {
    if !(accelerating_voltage > 0.0) || !accelerating_voltage.is_finite() {
        return Err(Error::Domain(format!(
            "accelerating voltage must be positive and finite, got {accelerating_voltage}"
        )));
    }
    Ok(())
}

/// Lorentz factor of an electron accelerated through `accelerating_voltage`.
fn lorentz_gamma(accelerating_voltage: f64) -> f64 {
    let k = CODATA_2018;
    1.0 + k.electron_charge_e * accelerating_voltage / k.electron_rest_energy()
}

/// Relativistic de Broglie wavelength, `h / sqrt(2 m e V (1 + e V / 2 m c²))`.
pub fn relativistic_wavelength(accelerating_voltage: f64) -> Result<f64> {
    check_voltage(accelerating_voltage)?;
    let k = CODATA_2018;
    let ev = k.electron_charge_e * accelerating_voltage;
    let p2 = 2.0 * k.electron_mass_m * ev * (1.0 + ev / (2.0 * k.electron_rest_energy()));
    Ok(k.planck_h / p2.sqrt())
}

/// Phase per unit projected potential, σ = 2π γ m e λ / h², in rad/(V·m).
///
/// The object phase is `-σ ∫Φ dz`. Using γm instead of the rest mass makes
/// this the relativistically correct form of `e m / (ħ p₀)`; the two agree
/// in the low-voltage limit.
pub fn interaction_constant(accelerating_voltage: f64) -> Result<f64> {
    let wavelength = relativistic_wavelength(accelerating_voltage)?;
    let k = CODATA_2018;
    let gamma = lorentz_gamma(accelerating_voltage);
    Ok(2.0 * PI * gamma * k.electron_mass_m * k.electron_charge_e * wavelength / (k.planck_h * k.planck_h))
}

/// Beam condition with its derived kinematic quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamParameters {
    accelerating_voltage: f64,
    wavelength: f64,
    interaction_constant: f64,
    momentum_p0: f64,
    gamma: f64,
}

impl BeamParameters {
    pub fn new(accelerating_voltage: f64) -> Result<Self> {
        let wavelength = relativistic_wavelength(accelerating_voltage)?;
        Ok(Self {
            accelerating_voltage,
            wavelength,
            interaction_constant: interaction_constant(accelerating_voltage)?,
            momentum_p0: CODATA_2018.planck_h / wavelength,
            gamma: lorentz_gamma(accelerating_voltage),
        })
    }

    /// Accelerating voltage, V.
    pub fn accelerating_voltage(&self) -> f64 {
        self.accelerating_voltage
    }

    /// Electron wavelength, m.
    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// σ in rad/(V·m).
    pub fn interaction_constant(&self) -> f64 {
        self.interaction_constant
    }

    /// Kinetic momentum p₀, kg·m/s.
    pub fn momentum_p0(&self) -> f64 {
        self.momentum_p0
    }

    pub fn lorentz_gamma(&self) -> f64 {
        self.gamma
    }

    /// Wavenumber 2π/λ, 1/m.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }
}
