//! Physical constants (CODATA 2018 exact or recommended values, SI).

/// Fundamental constants used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Newton constant, m³ kg⁻¹ s⁻².
    pub g: f64,
    /// Speed of light, m/s.
    pub c: f64,
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Boltzmann constant, J/K.
    pub k_b: f64,
    /// Vacuum permittivity, F/m.
    pub eps0: f64,
    /// Vacuum permeability, N/A².
    pub mu0: f64,
    /// Wien displacement constant, m·K.
    pub wien_b: f64,
}

impl PhysicalConstants {
    pub const CODATA2018: PhysicalConstants = PhysicalConstants {
        g: 6.674_30e-11,
        c: 299_792_458.0,
        hbar: 1.054_571_817e-34,
        k_b: 1.380_649e-23,
        eps0: 8.854_187_812_8e-12,
        mu0: 1.256_637_062_12e-6,
        wien_b: 2.897_771_955e-3,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA2018
    }
}

/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Unified atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Mass of a hydrogen molecule, kg.
pub const H2_MASS: f64 = 2.015_88 * ATOMIC_MASS_UNIT;
