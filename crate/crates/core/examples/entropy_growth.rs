//! Entanglement entropy against time for m = 0, l/2 and l preparations.

use framedrag::dynamics::{entropy_curve, ConvergenceSettings, EntropyRow};
use framedrag::params::ExperimentConfig;

pub fn run_example() -> framedrag::Result<Vec<EntropyRow>> {
    let config = ExperimentConfig::default();
    let times: Vec<f64> = (0..=10).map(f64::from).collect();
    let rows = entropy_curve(&config, &[0.0, 0.5, 1.0], &times, ConvergenceSettings::default())?;

    println!("{:>5} {:>6} {:>13} {:>13}", "t/s", "m/l", "S closed", "S exact");
    for r in rows.iter().filter(|r| r.t as u32 % 2 == 0) {
        println!("{:>5} {:>6} {:>13.5e} {:>13.5e}", r.t, r.m_over_l, r.entropy_closed, r.entropy_exact);
    }
    let worst = rows
        .iter()
        .filter(|r| r.entropy_exact > 0.0)
        .map(|r| (r.entropy_closed - r.entropy_exact).abs() / r.entropy_exact)
        .fold(0.0, f64::max);
    println!("largest closed/exact relative difference: {worst:.2e}");
    Ok(rows)
}

fn main() -> framedrag::Result<()> {
    run_example().map(|_| ())
}
