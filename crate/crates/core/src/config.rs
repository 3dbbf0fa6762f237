//! TOML run configuration, environment overrides and run manifests.
//!
//! ```toml
//! [sphere_a]          # also [sphere_b]
//! radius = 5e-5
//! [experiment]
//! separation = 2e-4
//! [simulation]
//! shell_half_width = 1
//! [feasibility]
//! ellipticity = 1e-5
//! ```
//!
//! Every key is optional and defaults to the nominal experiment. Unknown
//! sections or keys are errors. `FRAMEDRAG_<SECTION>_<KEY>=value` in the
//! environment overrides the file, e.g. `FRAMEDRAG_EXPERIMENT_BATH_TEMPERATURE=0.8`.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::blackbody::BlackbodySettings;
use crate::dynamics::ConvergenceSettings;
use crate::error::{Error, Result};
use crate::feasibility::FeasibilitySettings;
use crate::lindblad::IntegratorSettings;
use crate::params::{validate_config, ExperimentConfig, SphereSpec};

pub const ENV_PREFIX: &str = "FRAMEDRAG_";

const SECTIONS: [&str; 5] = ["sphere_a", "sphere_b", "experiment", "simulation", "feasibility"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SphereSection {
    pub radius: f64,
    pub density: f64,
    pub angular_velocity: f64,
    pub relative_permittivity: f64,
    pub refractive_index_re: f64,
    pub refractive_index_im: f64,
    pub magnetic_susceptibility: f64,
    pub gyromagnetic_ratio: f64,
}

impl From<SphereSpec> for SphereSection {
    fn from(s: SphereSpec) -> Self {
        SphereSection {
            radius: s.radius,
            density: s.density,
            angular_velocity: s.angular_velocity,
            relative_permittivity: s.relative_permittivity,
            refractive_index_re: s.refractive_index.re,
            refractive_index_im: s.refractive_index.im,
            magnetic_susceptibility: s.magnetic_susceptibility,
            gyromagnetic_ratio: s.gyromagnetic_ratio,
        }
    }
}

impl From<SphereSection> for SphereSpec {
    fn from(s: SphereSection) -> Self {
        SphereSpec {
            radius: s.radius,
            density: s.density,
            angular_velocity: s.angular_velocity,
            relative_permittivity: s.relative_permittivity,
            refractive_index: Complex64::new(s.refractive_index_re, s.refractive_index_im),
            magnetic_susceptibility: s.magnetic_susceptibility,
            gyromagnetic_ratio: s.gyromagnetic_ratio,
        }
    }
}

impl Default for SphereSection {
    fn default() -> Self {
        SphereSpec::silica().into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub separation: f64,
    pub bath_temperature: f64,
    pub gas_pressure: f64,
    pub gas_molecule_mass: f64,
    pub magnetic_field: f64,
    pub field_gradient: f64,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        let e = ExperimentConfig::default();
        ExperimentSection {
            separation: e.separation,
            bath_temperature: e.bath_temperature,
            gas_pressure: e.gas_pressure,
            gas_molecule_mass: e.gas_molecule_mass,
            magnetic_field: e.magnetic_field,
            field_gradient: e.field_gradient,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSection {
    pub shell_half_width: u32,
    pub m_half_width: u32,
    pub independent_baths: bool,
    pub integrator_tolerance: f64,
    pub trace_bound: f64,
    pub psd_floor: f64,
    pub initial_half_width: u32,
    pub max_half_width: u32,
    pub convergence_tolerance: f64,
}

impl Default for SimulationSection {
    fn default() -> Self {
        let b = BlackbodySettings::default();
        let c = ConvergenceSettings::default();
        SimulationSection {
            shell_half_width: b.shell_half_width,
            m_half_width: b.m_half_width,
            independent_baths: b.independent_baths,
            integrator_tolerance: b.integrator.tolerance,
            trace_bound: b.integrator.trace_bound,
            psd_floor: b.integrator.psd_floor,
            initial_half_width: c.initial_half_width,
            max_half_width: c.max_half_width,
            convergence_tolerance: c.tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeasibilitySection {
    pub nuclear_spins: f64,
    pub nuclear_gyromagnetic_ratio: f64,
    pub gyromagnetic_in_hz: bool,
    pub dipole_moment: f64,
    pub averaging_time: f64,
    pub dipole_tilt: f64,
    pub exact_dipole_average: bool,
    pub ellipticity: f64,
    pub laser_wavelength: f64,
    pub initial_temperature: f64,
    pub debye_beta: f64,
    pub heating_constant: f64,
    pub integration_time: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trap_excursion: Option<f64>,
    pub transverse_excursion: f64,
}

impl From<FeasibilitySettings> for FeasibilitySection {
    fn from(f: FeasibilitySettings) -> Self {
        FeasibilitySection {
            nuclear_spins: f.nuclear_spins,
            nuclear_gyromagnetic_ratio: f.nuclear_gyromagnetic_ratio,
            gyromagnetic_in_hz: f.gyromagnetic_in_hz,
            dipole_moment: f.dipole_moment,
            averaging_time: f.averaging_time,
            dipole_tilt: f.dipole_tilt,
            exact_dipole_average: f.exact_dipole_average,
            ellipticity: f.ellipticity,
            laser_wavelength: f.laser_wavelength,
            initial_temperature: f.initial_temperature,
            debye_beta: f.debye_beta,
            heating_constant: f.heating_constant,
            integration_time: f.integration_time,
            trap_excursion: f.trap_excursion,
            transverse_excursion: f.transverse_excursion,
        }
    }
}

impl From<FeasibilitySection> for FeasibilitySettings {
    fn from(f: FeasibilitySection) -> Self {
        FeasibilitySettings {
            nuclear_spins: f.nuclear_spins,
            nuclear_gyromagnetic_ratio: f.nuclear_gyromagnetic_ratio,
            gyromagnetic_in_hz: f.gyromagnetic_in_hz,
            dipole_moment: f.dipole_moment,
            averaging_time: f.averaging_time,
            dipole_tilt: f.dipole_tilt,
            exact_dipole_average: f.exact_dipole_average,
            ellipticity: f.ellipticity,
            laser_wavelength: f.laser_wavelength,
            initial_temperature: f.initial_temperature,
            debye_beta: f.debye_beta,
            heating_constant: f.heating_constant,
            integration_time: f.integration_time,
            trap_excursion: f.trap_excursion,
            transverse_excursion: f.transverse_excursion,
        }
    }
}

impl Default for FeasibilitySection {
    fn default() -> Self {
        FeasibilitySettings::default().into()
    }
}

/// The file as written on disk.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub sphere_a: SphereSection,
    pub sphere_b: SphereSection,
    pub experiment: ExperimentSection,
    pub simulation: SimulationSection,
    pub feasibility: FeasibilitySection,
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub experiment: ExperimentConfig,
    pub blackbody: BlackbodySettings,
    pub convergence: ConvergenceSettings,
    pub feasibility: FeasibilitySettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::try_from(ConfigFile::default()).expect("built-in defaults are valid")
    }
}

impl TryFrom<ConfigFile> for RunConfig {
    type Error = Error;

    fn try_from(f: ConfigFile) -> Result<Self> {
        let e = &f.experiment;
        let experiment = ExperimentConfig {
            sphere_a: f.sphere_a.into(),
            sphere_b: f.sphere_b.into(),
            separation: e.separation,
            bath_temperature: e.bath_temperature,
            gas_pressure: e.gas_pressure,
            gas_molecule_mass: e.gas_molecule_mass,
            magnetic_field: e.magnetic_field,
            field_gradient: e.field_gradient,
            ..ExperimentConfig::default()
        };
        let violations = validate_config(&experiment);
        if !violations.is_empty() {
            let msg: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            return Err(Error::Config(msg.join("; ")));
        }
        let s = &f.simulation;
        for (name, v) in [
            ("simulation.integrator_tolerance", s.integrator_tolerance),
            ("simulation.trace_bound", s.trace_bound),
            ("simulation.psd_floor", s.psd_floor),
            ("simulation.convergence_tolerance", s.convergence_tolerance),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if s.initial_half_width == 0 || s.max_half_width < s.initial_half_width {
            return Err(Error::Config("simulation: need 0 < initial_half_width ≤ max_half_width".into()));
        }
        let integrator = IntegratorSettings {
            tolerance: s.integrator_tolerance,
            trace_bound: s.trace_bound,
            psd_floor: s.psd_floor,
            ..IntegratorSettings::default()
        };
        Ok(RunConfig {
            experiment,
            blackbody: BlackbodySettings {
                shell_half_width: s.shell_half_width,
                m_half_width: s.m_half_width,
                independent_baths: s.independent_baths,
                integrator,
            },
            convergence: ConvergenceSettings {
                initial_half_width: s.initial_half_width,
                max_half_width: s.max_half_width,
                tolerance: s.convergence_tolerance,
            },
            feasibility: f.feasibility.into(),
        })
    }
}

impl RunConfig {
    pub fn to_file(&self) -> ConfigFile {
        let e = &self.experiment;
        let b = &self.blackbody;
        let c = &self.convergence;
        ConfigFile {
            sphere_a: e.sphere_a.into(),
            sphere_b: e.sphere_b.into(),
            experiment: ExperimentSection {
                separation: e.separation,
                bath_temperature: e.bath_temperature,
                gas_pressure: e.gas_pressure,
                gas_molecule_mass: e.gas_molecule_mass,
                magnetic_field: e.magnetic_field,
                field_gradient: e.field_gradient,
            },
            simulation: SimulationSection {
                shell_half_width: b.shell_half_width,
                m_half_width: b.m_half_width,
                independent_baths: b.independent_baths,
                integrator_tolerance: b.integrator.tolerance,
                trace_bound: b.integrator.trace_bound,
                psd_floor: b.integrator.psd_floor,
                initial_half_width: c.initial_half_width,
                max_half_width: c.max_half_width,
                convergence_tolerance: c.tolerance,
            },
            feasibility: self.feasibility.into(),
        }
    }

    /// Canonical TOML rendering; identical configs give identical bytes.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.to_file()).expect("config sections serialize")
    }

    /// Parse a configuration with no environment overrides.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::from_toml_with_env(text, std::iter::empty::<(String, String)>())
    }

    /// Parse, then apply `FRAMEDRAG_*` overrides from `env`.
    pub fn from_toml_with_env<I, K, V>(text: &str, env: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut table: Table = text.parse().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
        let schema = schema();
        coerce_integers(&mut table, &schema)?;
        apply_env_overrides(&mut table, &schema, env)?;
        let file: ConfigFile = table.try_into().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
        RunConfig::try_from(file)
    }

    /// Read `path` (or the built-in defaults when `None`) and apply overrides.
    pub fn load<I, K, V>(path: Option<&Path>, env: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
            None => String::new(),
        };
        Self::from_toml_with_env(&text, env)
    }
}

/// Every accepted (section, key) with a value of the expected type.
fn schema() -> Table {
    let mut f = ConfigFile::default();
    f.feasibility.trap_excursion = Some(0.0);
    Table::try_from(f).expect("config sections serialize")
}

fn expected<'a>(schema: &'a Table, section: &str, key: &str) -> Result<&'a Value> {
    schema
        .get(section)
        .and_then(Value::as_table)
        .ok_or_else(|| Error::Parse(format!("unknown section [{section}]")))?
        .get(key)
        .ok_or_else(|| Error::Parse(format!("unknown key '{key}' in section [{section}]")))
}

/// Accept `x = 1` where a float is expected.
fn coerce_integers(table: &mut Table, schema: &Table) -> Result<()> {
    for (section, body) in table.iter_mut() {
        let Some(body) = body.as_table_mut() else {
            return Err(Error::Parse(format!("top-level key '{section}' must be a [section]")));
        };
        for (key, value) in body.iter_mut() {
            if let (Value::Integer(i), Value::Float(_)) = (&*value, expected(schema, section, key)?) {
                *value = Value::Float(*i as f64);
            }
        }
    }
    Ok(())
}

fn parse_like(raw: &str, like: &Value, name: &str) -> Result<Value> {
    let bad = |what: &str| Error::Parse(format!("{name}: expected {what}, got '{raw}'"));
    Ok(match like {
        Value::Float(_) => Value::Float(raw.trim().parse().map_err(|_| bad("a number"))?),
        Value::Integer(_) => Value::Integer(raw.trim().parse().map_err(|_| bad("an integer"))?),
        Value::Boolean(_) => Value::Boolean(raw.trim().parse().map_err(|_| bad("true or false"))?),
        _ => Value::String(raw.to_string()),
    })
}

fn apply_env_overrides<I, K, V>(table: &mut Table, schema: &Table, env: I) -> Result<()>
where
    I: IntoIterator<Item = (K, V)>,
    K: AsRef<str>,
    V: AsRef<str>,
{
    let mut vars: Vec<(String, String)> = env
        .into_iter()
        .filter_map(|(k, v)| k.as_ref().strip_prefix(ENV_PREFIX).map(|rest| (rest.to_ascii_lowercase(), v.as_ref().to_string())))
        .collect();
    vars.sort();
    for (rest, raw) in vars {
        let name = format!("{ENV_PREFIX}{}", rest.to_ascii_uppercase());
        let (section, key) = SECTIONS
            .iter()
            .find_map(|s| rest.strip_prefix(s).and_then(|k| k.strip_prefix('_')).map(|k| (*s, k)))
            .ok_or_else(|| Error::Parse(format!("{name}: no such config section")))?;
        let like = expected(schema, section, key).map_err(|e| Error::Parse(format!("{name}: {e}")))?;
        let value = parse_like(&raw, like, &name)?;
        table
            .entry(section)
            .or_insert_with(|| Value::Table(Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::Parse(format!("[{section}] is not a table")))?
            .insert(key.to_string(), value);
    }
    Ok(())
}

/// Record of one CLI invocation, written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub wall_time_seconds: f64,
    pub outputs: Vec<PathBuf>,
    pub config: ConfigFile,
}

impl RunManifest {
    pub fn new(command: &str, config: &RunConfig, wall_time_seconds: f64, outputs: Vec<PathBuf>) -> Self {
        RunManifest {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            wall_time_seconds,
            outputs,
            config: config.to_file(),
        }
    }

    /// `<output>.manifest.toml`.
    pub fn path_for(output: &Path) -> PathBuf {
        let mut s = output.as_os_str().to_owned();
        s.push(".manifest.toml");
        PathBuf::from(s)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = toml::to_string(self).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_env() -> Vec<(String, String)> {
        Vec::new()
    }

    #[test]
    fn empty_file_is_the_default() {
        let c = RunConfig::from_toml_str("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.experiment, ExperimentConfig::default());
    }

    #[test]
    fn round_trip_is_byte_stable() {
        let text = RunConfig::default().to_toml_string();
        let again = RunConfig::from_toml_str(&text).unwrap();
        assert_eq!(again.to_toml_string(), text);
    }

    #[test]
    fn integers_are_accepted_for_floats() {
        let c = RunConfig::from_toml_str("[experiment]\nbath_temperature = 1\n").unwrap();
        assert_eq!(c.experiment.bath_temperature, 1.0);
    }

    #[test]
    fn unknown_keys_are_named() {
        let err = RunConfig::from_toml_str("[experiment]\nbath_temprature = 1.0\n").unwrap_err();
        assert!(err.to_string().contains("bath_temprature"), "{err}");
        let err = RunConfig::from_toml_str("[nonsense]\nx = 1\n").unwrap_err();
        assert!(err.to_string().contains("nonsense"), "{err}");
    }

    #[test]
    fn malformed_values_are_parse_errors() {
        assert!(matches!(RunConfig::from_toml_str("[experiment]\nseparation = \"far\"\n"), Err(Error::Parse(_))));
        assert!(matches!(RunConfig::from_toml_str("[experiment\n"), Err(Error::Parse(_))));
    }

    #[test]
    fn invalid_physics_is_a_config_error() {
        let err = RunConfig::from_toml_str("[experiment]\nseparation = 1e-5\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err}");
    }

    #[test]
    fn environment_overrides() {
        let env = [
            ("FRAMEDRAG_EXPERIMENT_BATH_TEMPERATURE", "0.8"),
            ("FRAMEDRAG_SPHERE_B_RADIUS", "4e-5"),
            ("FRAMEDRAG_SIMULATION_INDEPENDENT_BATHS", "true"),
            ("UNRELATED", "x"),
        ];
        let c = RunConfig::from_toml_with_env("[experiment]\nbath_temperature = 0.2\n", env).unwrap();
        assert_eq!(c.experiment.bath_temperature, 0.8);
        assert_eq!(c.experiment.sphere_b.radius, 4e-5);
        assert!(c.blackbody.independent_baths);
        assert!(RunConfig::from_toml_with_env("", [("FRAMEDRAG_EXPERIMENT_NOPE", "1")]).is_err());
        assert!(RunConfig::from_toml_with_env("", [("FRAMEDRAG_EXPERIMENT_SEPARATION", "far")]).is_err());
        assert!(RunConfig::load(None, no_env()).is_ok());
    }

    #[test]
    fn optional_excursion() {
        let c = RunConfig::from_toml_str("[feasibility]\ntrap_excursion = 1e-5\n").unwrap();
        assert_eq!(c.feasibility.trap_excursion, Some(1e-5));
        let c = RunConfig::from_toml_with_env("", [("FRAMEDRAG_FEASIBILITY_TRAP_EXCURSION", "2e-5")]).unwrap();
        assert_eq!(c.feasibility.trap_excursion, Some(2e-5));
    }

    #[test]
    fn manifest_path() {
        assert_eq!(RunManifest::path_for(Path::new("out/fig2.csv")), PathBuf::from("out/fig2.csv.manifest.toml"));
    }
}
