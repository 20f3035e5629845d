//! CODATA 2018 physical constants.

use core::f64::consts::PI;

/// The physical constants used throughout the crate, in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Planck constant h, J·s.
    pub planck_h: f64,
    /// Reduced Planck constant h/2π, J·s.
    pub hbar: f64,
    /// Elementary charge e, C.
    pub electron_charge_e: f64,
    /// Electron rest mass, kg.
    pub electron_mass_m: f64,
    /// Vacuum permeability μ₀, T·m/A.
    pub mu0: f64,
    /// Vacuum permittivity ε₀, F/m.
    pub epsilon0: f64,
    /// Speed of light, m/s.
    pub c: f64,
}

pub const PLANCK_H: f64 = 6.626_070_15e-34;
pub const HBAR: f64 = PLANCK_H / (2.0 * PI);
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
pub const MU0: f64 = 1.256_637_062_12e-6;
pub const EPSILON0: f64 = 8.854_187_812_8e-12;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
    planck_h: PLANCK_H,
    hbar: HBAR,
    electron_charge_e: ELEMENTARY_CHARGE,
    electron_mass_m: ELECTRON_MASS,
    mu0: MU0,
    epsilon0: EPSILON0,
    c: SPEED_OF_LIGHT,
};

impl PhysicalConstants {
    /// Electron rest energy m·c², J.
    pub fn electron_rest_energy(&self) -> f64 {
        self.electron_mass_m * self.c * self.c
    }

    /// Magnetic charge that imprints one unit of topological charge, h/(eμ₀), in A·m.
    pub fn flux_quantum_charge(&self) -> f64 {
        self.planck_h / (self.electron_charge_e * self.mu0)
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        CODATA_2018
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hbar_is_h_over_two_pi() {
        let c = CODATA_2018;
        let rel = (c.hbar - c.planck_h / (2.0 * PI)).abs() / c.hbar;
        assert!(rel < 1e-15, "rel = {rel:e}");
    }

    #[test]
    fn vacuum_constants_consistent() {
        let c = CODATA_2018;
        let prod = c.mu0 * c.epsilon0 * c.c * c.c;
        assert!((prod - 1.0).abs() < 1e-12, "mu0 eps0 c^2 = {prod}");
    }

    #[test]
    fn codata_2018_literals() {
        assert_eq!(ELEMENTARY_CHARGE, 1.602176634e-19);
        assert_eq!(PLANCK_H, 6.62607015e-34);
        assert_eq!(ELECTRON_MASS, 9.1093837015e-31);
    }
}
