//! Temperature at which thermal emission wipes out the m = 0 preparation's
//! entanglement after one second.

use framedrag::blackbody::{negativity_vs_temperature, BlackbodySettings, Preparation, TemperatureSweep};
use framedrag::params::ExperimentConfig;

pub fn run_example() -> framedrag::Result<TemperatureSweep> {
    let temps: Vec<f64> = (0..=25).map(|i| 0.1 * f64::from(i)).collect();
    let sweep = negativity_vs_temperature(&ExperimentConfig::default(), Preparation::M0, 1.0, &temps, &BlackbodySettings::default())?;
    for r in &sweep.rows {
        println!("T = {:.1} K  E_N = {:.4e}  S_AB = {:.4} bits", r.temperature, r.log_negativity, r.global_entropy);
    }
    match (sweep.vanishing_temperature, sweep.vanishing_entropy) {
        (Some(t), Some(s)) => println!("E_N below 1e-6 from T = {t:.1} K, where S_AB = {s:.3} bits"),
        _ => println!("E_N stays above 1e-6 on this grid"),
    }
    Ok(sweep)
}

fn main() -> framedrag::Result<()> {
    run_example().map(|_| ())
}
