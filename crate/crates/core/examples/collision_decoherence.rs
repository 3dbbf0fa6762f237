//! Log-negativity after a single gas collision that kicks up to n quanta.

use framedrag::blackbody::Preparation;
use framedrag::collisions::{collision_negativity_curve, config_collision_rate, CollisionRow};
use framedrag::params::ExperimentConfig;

pub fn run_example() -> framedrag::Result<Vec<CollisionRow>> {
    let config = ExperimentConfig::default();
    println!("collision rate r = {:.4} 1/s", config_collision_rate(&config)?);
    let times = [0.0, 2.5, 5.0, 7.5, 10.0];
    let mut all = Vec::new();
    for prep in [Preparation::M0, Preparation::Ml] {
        let rows = collision_negativity_curve(&config, prep, &[1, 2, 3], &times)?;
        println!("preparation {}", prep.label());
        for r in &rows {
            println!("  t = {:>4} s  n = {}  E_N = {:.5e}", r.t, r.max_quanta, r.log_negativity);
        }
        all.extend(rows);
    }
    Ok(all)
}

fn main() -> framedrag::Result<()> {
    run_example().map(|_| ())
}
