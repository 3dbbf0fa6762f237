//! Command-line front end.
//!
//! Exit codes: 0 success, 1 witness not violated, 2 usage or configuration
//! error, 3 numerical failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::amspace::{build_interaction_hamiltonian, BasisWindow, TruncatedProductBasis};
use crate::blackbody::{blackbody_time_curve, negativity_vs_temperature, Preparation};
use crate::collisions::{collision_negativity_curve, config_collision_rate};
use crate::config::{RunConfig, RunManifest};
use crate::dynamics::{entropy_curve, initial_state, Propagator};
use crate::entanglement::{witness_sum_uncertainty, WitnessReport};
use crate::error::{Error, Result};
use crate::feasibility::{
    budget_report, detection_trap, field_realism_warning, render_budget_csv, render_budget_text, FeasibilitySettings,
};
use crate::params::derive_scales;
use crate::statefile::{StateData, StateFile};
use crate::wigner::Wigner3j;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_VIOLATED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub const ENTROPY_CSV_HEADER: &str = "t_seconds,m_over_l,entropy_closed_bits,entropy_exact_bits,truncation_loss";
pub const COLLISION_CSV_HEADER: &str = "t_seconds,n,preparation,log_negativity";
pub const BLACKBODY_TIME_CSV_HEADER: &str = "t_seconds,T_kelvin,log_negativity,trace_defect";
pub const BLACKBODY_SWEEP_CSV_HEADER: &str = "T_kelvin,log_negativity,global_entropy_bits";

#[derive(Debug, Parser)]
#[command(name = "framedrag", version, about = "Frame-dragging entanglement of two rotating spheres")]
pub struct Cli {
    /// TOML configuration file; defaults are used when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrepArg {
    M0,
    Ml,
}

impl From<PrepArg> for Preparation {
    fn from(p: PrepArg) -> Self {
        match p {
            PrepArg::M0 => Preparation::M0,
            PrepArg::Ml => Preparation::Ml,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BudgetFormat {
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the derived mechanical and coupling scales.
    Derive,
    /// Entanglement entropy against time for several m/l (closed form and exact).
    EntropyCurve {
        /// Comma-separated m/l fractions in [0, 1].
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,1")]
        m_list: Vec<f64>,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        /// Number of equally spaced times from 0 to t_max.
        #[arg(long, default_value_t = 21)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Log-negativity after gas collisions transferring up to n quanta.
    Collision {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        n_list: Vec<u32>,
        #[arg(long, value_enum, default_value = "ml")]
        prep: PrepArg,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 21)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Black-body decoherence: a time curve or a temperature sweep.
    Blackbody {
        /// Time curve from 0 to this time at the configured bath temperature.
        #[arg(long, conflicts_with = "sweep_t", required_unless_present = "sweep_t")]
        t_max: Option<f64>,
        /// Temperature sweep T1:T2:points at fixed time --at.
        #[arg(long = "sweep-T", value_name = "T1:T2:POINTS")]
        sweep_t: Option<String>,
        /// Evaluation time of a sweep, s.
        #[arg(long, default_value_t = 1.0)]
        at: f64,
        #[arg(long, default_value_t = 21)]
        points: usize,
        /// Defaults to ml for time curves and m0 for sweeps.
        #[arg(long, value_enum)]
        prep: Option<PrepArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the sum-uncertainty witness on a state file.
    Witness {
        #[arg(long)]
        state_file: PathBuf,
        /// Detector variance added to each collective component, ħ².
        #[arg(long, default_value_t = 0.0)]
        measurement_variance: f64,
    },
    /// Write the unitarily evolved state of a preparation to a state file.
    PrepareState {
        #[arg(long, value_enum, default_value = "m0")]
        prep: PrepArg,
        #[arg(long, default_value_t = 10.0)]
        t: f64,
        #[arg(long, default_value_t = 6)]
        half_width: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Noise budget against the gravitational interaction.
    Budget {
        #[arg(long, value_enum, default_value = "text")]
        format: BudgetFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Magneto-gravitational trap readout numbers.
    Detection {
        /// Field gradient G₀, T/m; overrides the configuration.
        #[arg(long)]
        gradient: Option<f64>,
    },
    /// Wigner 3-j symbol (j1 j2 j3; m1 m2 m3).
    #[command(allow_negative_numbers = true)]
    Wigner3j { j1: f64, j2: f64, j3: f64, m1: f64, m2: f64, m3: f64 },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Derive => "derive",
            Command::EntropyCurve { .. } => "entropy-curve",
            Command::Collision { .. } => "collision",
            Command::Blackbody { .. } => "blackbody",
            Command::Witness { .. } => "witness",
            Command::PrepareState { .. } => "prepare-state",
            Command::Budget { .. } => "budget",
            Command::Detection { .. } => "detection",
            Command::Wigner3j { .. } => "wigner3j",
        }
    }
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Parse(_) | Error::Io(_) | Error::Domain(_) | Error::SingularTime(_) => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

/// Parse `args` (including the program name), run the command and return
/// the exit code. Environment variables come from `env`.
pub fn run<A, S, E, K, V>(args: A, env: E, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    A: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
    E: IntoIterator<Item = (K, V)>,
    K: AsRef<str>,
    V: AsRef<str>,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let config = match RunConfig::load(cli.config.as_deref(), env) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    match execute(&cli.command, &config, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(command: &Command, config: &RunConfig, stdout: &mut dyn Write) -> Result<i32> {
    let started = Instant::now();
    let (text, out) = match command {
        Command::Derive => (derive_table(config)?, None),
        Command::EntropyCurve { m_list, t_max, points, out } => {
            let times = time_grid(*t_max, *points)?;
            let rows = entropy_curve(&config.experiment, m_list, &times, config.convergence)?;
            let mut s = format!("{ENTROPY_CSV_HEADER}\n");
            for r in rows {
                let _ = writeln!(s, "{},{},{:e},{:e},{:e}", r.t, r.m_over_l, r.entropy_closed, r.entropy_exact, r.truncation_loss);
            }
            (s, out.as_deref())
        }
        Command::Collision { n_list, prep, t_max, points, out } => {
            if n_list.contains(&0) {
                return Err(Error::Domain("--n-list entries must be at least 1".into()));
            }
            let times = time_grid(*t_max, *points)?;
            let rows = collision_negativity_curve(&config.experiment, (*prep).into(), n_list, &times)?;
            let mut s = format!("{COLLISION_CSV_HEADER}\n");
            for r in rows {
                let _ = writeln!(s, "{},{},{},{:e}", r.t, r.max_quanta, r.preparation.label(), r.log_negativity);
            }
            (s, out.as_deref())
        }
        Command::Blackbody { t_max, sweep_t, at, points, prep, out } => {
            let s = match (t_max, sweep_t) {
                (Some(t_max), None) => {
                    let times = time_grid(*t_max, *points)?;
                    let prep = prep.map_or(Preparation::Ml, Preparation::from);
                    let rows =
                        blackbody_time_curve(&config.experiment, prep, config.experiment.bath_temperature, &times, &config.blackbody)?;
                    let mut s = format!("{BLACKBODY_TIME_CSV_HEADER}\n");
                    for r in rows {
                        let _ = writeln!(s, "{},{},{:e},{:e}", r.t, r.temperature, r.log_negativity, r.trace_defect);
                    }
                    s
                }
                (None, Some(spec)) => {
                    let temps = parse_sweep(spec)?;
                    let prep = prep.map_or(Preparation::M0, Preparation::from);
                    let sweep = negativity_vs_temperature(&config.experiment, prep, *at, &temps, &config.blackbody)?;
                    let mut s = format!("{BLACKBODY_SWEEP_CSV_HEADER}\n");
                    for r in sweep.rows {
                        let _ = writeln!(s, "{},{:e},{:e}", r.temperature, r.log_negativity, r.global_entropy);
                    }
                    s
                }
                _ => return Err(Error::Domain("give exactly one of --t-max and --sweep-T".into())),
            };
            (s, out.as_deref())
        }
        Command::Witness { state_file, measurement_variance } => {
            let file = StateFile::read(state_file)?;
            let basis = file.basis()?;
            let report = witness_sum_uncertainty(&file.data.density(), &basis, *measurement_variance)?;
            stdout.write_all(witness_text(&report).as_bytes())?;
            return Ok(if report.violated { EXIT_OK } else { EXIT_NOT_VIOLATED });
        }
        Command::PrepareState { prep, t, half_width, out } => {
            let file = prepared_state_file(config, (*prep).into(), *t, *half_width)?;
            file.write(out)?;
            write_manifest(command, config, started, out)?;
            return Ok(EXIT_OK);
        }
        Command::Budget { format, out } => {
            let lines = budget_report(&config.experiment, &config.feasibility)?;
            let s = match format {
                BudgetFormat::Csv => render_budget_csv(&lines),
                BudgetFormat::Text => render_budget_text(&lines),
            };
            (s, out.as_deref())
        }
        Command::Detection { gradient } => {
            let mut experiment = config.experiment;
            if let Some(g) = gradient {
                experiment.field_gradient = *g;
            }
            (detection_text(&experiment, &config.feasibility)?, None)
        }
        Command::Wigner3j { j1, j2, j3, m1, m2, m3 } => {
            let v = Wigner3j::new(*j1, *j2, *j3, *m1, *m2, *m3).evaluate()?;
            (format!("{v:e}\n"), None)
        }
    };
    match out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            write_manifest(command, config, started, path)?;
        }
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(EXIT_OK)
}

fn write_manifest(command: &Command, config: &RunConfig, started: Instant, output: &Path) -> Result<()> {
    let manifest = RunManifest::new(command.name(), config, started.elapsed().as_secs_f64(), vec![output.to_path_buf()]);
    manifest.write(&RunManifest::path_for(output))
}

/// `points` equally spaced times from 0 to `t_max`; a single point is `t_max`.
pub fn time_grid(t_max: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(Error::Domain("--points must be at least 1".into()));
    }
    if !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(Error::Domain(format!("--t-max must be finite and non-negative, got {t_max}")));
    }
    if points == 1 {
        return Ok(vec![t_max]);
    }
    Ok((0..points).map(|i| t_max * i as f64 / (points - 1) as f64).collect())
}

/// `T1:T2:points`, endpoints included.
pub fn parse_sweep(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Domain(format!("--sweep-T expects T1:T2:points, got '{spec}'"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts.as_slice() else { return Err(bad()) };
    let (t1, t2): (f64, f64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    let n: usize = n.parse().map_err(|_| bad())?;
    if n == 0 || !(t1 >= 0.0) || !(t2 >= t1) || !t2.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![t1]);
    }
    Ok((0..n).map(|i| t1 + (t2 - t1) * i as f64 / (n - 1) as f64).collect())
}

fn derive_table(config: &RunConfig) -> Result<String> {
    let e = &config.experiment;
    let d = derive_scales(e)?;
    let rows: [(&str, f64, &str); 12] = [
        ("alpha", d.alpha, "1/s"),
        ("mass_a", d.a.mass, "kg"),
        ("inertia_a", d.a.inertia, "kg m^2"),
        ("angular_momentum_a", d.a.angular_momentum, "J s"),
        ("l_a", d.a.quantum_number, "1"),
        ("mass_b", d.b.mass, "kg"),
        ("inertia_b", d.b.inertia, "kg m^2"),
        ("angular_momentum_b", d.b.angular_momentum, "J s"),
        ("l_b", d.b.quantum_number, "1"),
        ("g_per_second", d.coupling_g(1.0), "1/s"),
        ("v_g", d.v_g, "J"),
        ("collision_rate", config_collision_rate(e)?, "1/s"),
    ];
    let mut s = String::new();
    for (name, value, unit) in rows {
        let _ = writeln!(s, "{name:<20} {value:>14.6e}  {unit}");
    }
    Ok(s)
}

fn witness_text(r: &WitnessReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "var_jx          {:.12e}", r.variances[0]);
    let _ = writeln!(s, "var_jy          {:.12e}", r.variances[1]);
    let _ = writeln!(s, "var_jz          {:.12e}", r.variances[2]);
    let _ = writeln!(s, "total           {:.12e}", r.total_variance_sum);
    let _ = writeln!(s, "bound           {:.12e}", r.bound);
    let _ = writeln!(s, "margin          {:.6e}", r.margin);
    let _ = writeln!(s, "violated        {}", r.violated);
    s
}

fn detection_text(experiment: &crate::params::ExperimentConfig, settings: &FeasibilitySettings) -> Result<String> {
    let r = detection_trap(experiment, settings)?;
    let mut s = String::new();
    let _ = writeln!(s, "gradient                 {:.6e} T/m", r.gradient);
    let _ = writeln!(s, "trap_frequency           {:.6e} rad/s", r.omega);
    let _ = writeln!(s, "lambda                   {:.6e}", r.lambda);
    let _ = writeln!(s, "variance_map_coefficient {:.6e}", r.variance_map_coefficient);
    let _ = writeln!(s, "field_term               {:.6e} T^2", r.field_term);
    let _ = writeln!(s, "angular_momentum_term    {:.6e} T^2", r.angular_momentum_term);
    let _ = writeln!(s, "field_dominates          {}", r.field_dominates);
    let _ = writeln!(s, "required_resolution      {:.6e} m", r.required_resolution);
    let _ = writeln!(s, "integration_time         {} s", r.integration_time);
    if let Some(w) = field_realism_warning(experiment, settings) {
        let _ = writeln!(s, "warning                  {w}");
    }
    Ok(s)
}

/// Unitarily evolved preparation on single-shell windows, ready to save.
pub fn prepared_state_file(config: &RunConfig, prep: Preparation, t: f64, half_width: u32) -> Result<StateFile> {
    let d = derive_scales(&config.experiment)?;
    let (l_a, l_b) = (d.a.quantum_number.round(), d.b.quantum_number.round());
    let window = |l: f64| {
        let m = prep.m_for(l);
        let anchors: Vec<f64> = if m == 0.0 { vec![0.0] } else { vec![m, -m] };
        BasisWindow::new(l, &anchors, half_width)
    };
    let basis = TruncatedProductBasis::new(window(l_a)?, window(l_b)?);
    let h = build_interaction_hamiltonian(&basis, d.alpha)?;
    let psi0 = initial_state(&basis, prep.m_for(l_a), prep.m_for(l_b))?;
    let psi = Propagator::new(&h)?.apply(&psi0, t);
    StateFile::new(&basis, StateData::Vector(psi))
}
