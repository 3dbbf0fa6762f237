//! Where the second-order entropy formula stops tracking exact evolution.

use framedrag::dynamics::{converged_entropies, entropy_closed_form, ConvergenceSettings};
use framedrag::params::{derive_scales, ExperimentConfig};

/// (g, S_closed, S_exact) for the m = l/2 preparation.
pub fn run_example() -> framedrag::Result<Vec<(f64, Option<f64>, f64)>> {
    let d = derive_scales(&ExperimentConfig::default())?;
    let l = d.a.quantum_number;
    let m = 0.5 * l;
    let times = [1.0, 10.0, 100.0, 1000.0, 3000.0];
    let (exact, _) = converged_entropies(l, l, m, m, d.alpha, &times, ConvergenceSettings::default())?;

    println!("{:>8} {:>10} {:>12} {:>12} {:>9}", "t/s", "g", "S closed", "S exact", "rel diff");
    let mut out = Vec::new();
    for (&t, &s) in times.iter().zip(&exact) {
        let g = d.coupling_g(t);
        let closed = entropy_closed_form(g, 0.5 * d.alpha * t * m * m).ok();
        match closed {
            Some(c) => println!("{t:>8} {g:>10.3e} {c:>12.5e} {s:>12.5e} {:>9.2e}", (c - s).abs() / s),
            None => println!("{t:>8} {g:>10.3e} {:>12} {s:>12.5e}", "n/a"),
        }
        out.push((g, closed, s));
    }
    Ok(out)
}

fn main() -> framedrag::Result<()> {
    run_example().map(|_| ())
}
