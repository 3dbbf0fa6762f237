//! Experiment configuration and the scalar scales derived from it.

use num_complex::Complex64;

use crate::constants::{PhysicalConstants, H2_MASS};
use crate::error::{Error, Result};

/// Material and kinematic description of one sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereSpec {
    /// Radius, m.
    pub radius: f64,
    /// Mass density, kg/m³.
    pub density: f64,
    /// Rotation rate, rad/s.
    pub angular_velocity: f64,
    pub relative_permittivity: f64,
    pub refractive_index: Complex64,
    /// Volume magnetic susceptibility (negative for diamagnets).
    pub magnetic_susceptibility: f64,
    /// rad s⁻¹ T⁻¹.
    pub gyromagnetic_ratio: f64,
}

impl SphereSpec {
    /// Fused-silica sphere of radius 50 µm spinning at 10⁷ rad/s.
    pub fn silica() -> Self {
        SphereSpec {
            radius: 50e-6,
            density: 2200.0,
            angular_velocity: 1e7,
            relative_permittivity: 3.9,
            refractive_index: Complex64::new(1.47, 0.01 * 300e-9 / (4.0 * std::f64::consts::PI)),
            magnetic_susceptibility: -1.13e-5,
            gyromagnetic_ratio: 8e6,
        }
    }

    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * std::f64::consts::PI * self.radius.powi(3)
    }

    pub fn mass(&self) -> f64 {
        self.density * self.volume()
    }

    /// Moment of inertia of a uniform solid sphere.
    pub fn inertia(&self) -> f64 {
        0.4 * self.mass() * self.radius * self.radius
    }
}

/// All physical inputs of one experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    pub sphere_a: SphereSpec,
    pub sphere_b: SphereSpec,
    /// Centre-to-centre distance, m.
    pub separation: f64,
    /// K.
    pub bath_temperature: f64,
    /// Pa.
    pub gas_pressure: f64,
    /// kg.
    pub gas_molecule_mass: f64,
    /// T.
    pub magnetic_field: f64,
    /// T/m.
    pub field_gradient: f64,
    pub constants: PhysicalConstants,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            sphere_a: SphereSpec::silica(),
            sphere_b: SphereSpec::silica(),
            separation: 200e-6,
            bath_temperature: 0.1,
            gas_pressure: 1e-17,
            gas_molecule_mass: H2_MASS,
            magnetic_field: 1.0,
            field_gradient: 1e6,
            constants: PhysicalConstants::CODATA2018,
        }
    }
}

/// One broken invariant of an [`ExperimentConfig`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigViolation {
    pub field: &'static str,
    pub message: String,
}

impl std::fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn check_sphere(prefix: &'static [&'static str; 4], s: &SphereSpec, out: &mut Vec<ConfigViolation>) {
    let mut push = |field, ok: bool, message: &str| {
        if !ok {
            out.push(ConfigViolation { field, message: message.to_string() });
        }
    };
    push(prefix[0], s.radius > 0.0 && s.radius.is_finite(), "radius not positive");
    push(prefix[1], s.density > 0.0 && s.density.is_finite(), "density not positive");
    push(prefix[2], s.angular_velocity >= 0.0 && s.angular_velocity.is_finite(), "angular_velocity negative");
    push(prefix[3], s.relative_permittivity >= 1.0, "relative_permittivity below 1");
}

/// Report every violated invariant; an empty list means the config is usable.
pub fn validate_config(config: &ExperimentConfig) -> Vec<ConfigViolation> {
    let mut out = Vec::new();
    check_sphere(
        &["sphere_a.radius", "sphere_a.density", "sphere_a.angular_velocity", "sphere_a.relative_permittivity"],
        &config.sphere_a,
        &mut out,
    );
    check_sphere(
        &["sphere_b.radius", "sphere_b.density", "sphere_b.angular_velocity", "sphere_b.relative_permittivity"],
        &config.sphere_b,
        &mut out,
    );
    let contact = config.sphere_a.radius + config.sphere_b.radius;
    if !(config.separation > contact) {
        out.push(ConfigViolation { field: "separation", message: "separation ≤ contact distance".into() });
    }
    let nonneg = [("bath_temperature", config.bath_temperature), ("gas_pressure", config.gas_pressure)];
    for (field, v) in nonneg {
        if !(v >= 0.0) {
            out.push(ConfigViolation { field, message: format!("{field} negative") });
        }
    }
    if !(config.gas_molecule_mass > 0.0) {
        out.push(ConfigViolation { field: "gas_molecule_mass", message: "gas_molecule_mass not positive".into() });
    }
    out
}

/// Mechanical scales of a single sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereScales {
    /// kg.
    pub mass: f64,
    /// kg·m².
    pub inertia: f64,
    /// J·s.
    pub angular_momentum: f64,
    /// L/ħ.
    pub quantum_number: f64,
}

impl SphereScales {
    fn of(s: &SphereSpec, hbar: f64) -> Self {
        let mass = s.mass();
        let inertia = s.inertia();
        let angular_momentum = inertia * s.angular_velocity;
        SphereScales { mass, inertia, angular_momentum, quantum_number: angular_momentum / hbar }
    }
}

/// Scalars derived from an [`ExperimentConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScales {
    pub a: SphereScales,
    pub b: SphereScales,
    /// Għ/(c²r³), s⁻¹.
    pub alpha: f64,
    /// αħ·l_A·l_B, J.
    pub v_g: f64,
}

impl DerivedScales {
    /// g(t) = α t l_A l_B / 2.
    pub fn coupling_g(&self, t: f64) -> f64 {
        0.5 * self.alpha * t * self.a.quantum_number * self.b.quantum_number
    }

    /// κ(m, t) = α t m² / 2.
    pub fn coupling_kappa(&self, m: f64, t: f64) -> f64 {
        0.5 * self.alpha * t * m * m
    }
}

/// Frame-dragging coupling constant α = Għ/(c²r³) in s⁻¹.
pub fn frame_dragging_alpha(k: &PhysicalConstants, separation: f64) -> f64 {
    k.g * k.hbar / (k.c * k.c * separation.powi(3))
}

pub fn derive_scales(config: &ExperimentConfig) -> Result<DerivedScales> {
    for (name, s) in [("sphere_a", &config.sphere_a), ("sphere_b", &config.sphere_b)] {
        if !(s.radius > 0.0) || !(s.density > 0.0) {
            return Err(Error::Config(format!("{name}: radius and density must be positive")));
        }
        if !(s.angular_velocity >= 0.0) {
            return Err(Error::Config(format!("{name}: angular_velocity must be non-negative")));
        }
    }
    if !(config.separation > config.sphere_a.radius + config.sphere_b.radius) {
        return Err(Error::Config("separation ≤ contact distance".into()));
    }
    let k = &config.constants;
    let a = SphereScales::of(&config.sphere_a, k.hbar);
    let b = SphereScales::of(&config.sphere_b, k.hbar);
    let alpha = frame_dragging_alpha(k, config.separation);
    Ok(DerivedScales { a, b, alpha, v_g: alpha * k.hbar * a.quantum_number * b.quantum_number })
}
