//! Reading the angular-momentum variance off the trapped sphere's position.

use framedrag::feasibility::{detection_trap, detection_variance_map, displacement, DetectionReport, FeasibilitySettings};
use framedrag::params::{derive_scales, ExperimentConfig};

pub fn run_example() -> framedrag::Result<DetectionReport> {
    let config = ExperimentConfig::default();
    let report = detection_trap(&config, &FeasibilitySettings::default())?;
    println!("trap frequency        {:.4e} rad/s", report.omega);
    println!("G0^2 <z^2>            {:.4e} T^2", report.field_term);
    println!("<L^2>/(I gamma)^2     {:.4e} T^2", report.angular_momentum_term);
    println!("required resolution   {:.3e} m", report.required_resolution);

    // The separable-bound spread in L_z, mapped to position at half a trap
    // period and back.
    let d = derive_scales(&config)?;
    let hbar = config.constants.hbar;
    let sigma_l = (d.a.quantum_number + d.b.quantum_number).sqrt() * hbar;
    let t = std::f64::consts::PI / report.omega;
    let dz = displacement(sigma_l, t, &config)?;
    let recovered = detection_variance_map(dz * dz, 0.0, t, &config)?.sqrt();
    println!("Delta z at t = {t} s: {dz:.3e} m, recovered Delta L / true = {:.6}", recovered / sigma_l);
    Ok(report)
}

fn main() -> framedrag::Result<()> {
    run_example().map(|_| ())
}
