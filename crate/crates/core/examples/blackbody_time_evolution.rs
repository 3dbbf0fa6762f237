//! Log-negativity of the m = l preparation under black-body emission and
//! absorption at several bath temperatures.

use framedrag::blackbody::{blackbody_time_curve, BlackbodySettings, Preparation, TimeRow};
use framedrag::dynamics::top_state_negativity;
use framedrag::params::{derive_scales, ExperimentConfig};

pub fn run_example() -> framedrag::Result<Vec<TimeRow>> {
    let config = ExperimentConfig::default();
    let settings = BlackbodySettings::default();
    let d = derive_scales(&config)?;
    let times: Vec<f64> = (0..=5).map(|i| 2.0 * f64::from(i)).collect();
    let mut all = Vec::new();
    println!("{:>5} {:>12} {:>12} {:>12} {:>12} {:>12}", "t/s", "unitary", "0 K", "0.6 K", "0.8 K", "1.1 K");
    let curves = [0.0, 0.6, 0.8, 1.1]
        .iter()
        .map(|&temp| blackbody_time_curve(&config, Preparation::Ml, temp, &times, &settings))
        .collect::<framedrag::Result<Vec<_>>>()?;
    for (i, &t) in times.iter().enumerate() {
        print!("{t:>5} {:>12.5e}", top_state_negativity(d.coupling_g(t)));
        for c in &curves {
            print!(" {:>12.5e}", c[i].log_negativity);
        }
        println!();
    }
    for c in curves {
        all.extend(c);
    }
    let drift = all.iter().map(|r| r.trace_defect.abs()).fold(0.0, f64::max);
    println!("largest trace defect {drift:.1e}");
    Ok(all)
}

fn main() -> framedrag::Result<()> {
    run_example().map(|_| ())
}
