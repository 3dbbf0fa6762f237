//! Exact 3-j symbols and the closed form used at l ~ 1e23.

use framedrag::wigner::{wigner3j_dipole, wigner3j_oracle, Wigner3j};

pub fn run_example() -> framedrag::Result<f64> {
    let mut worst: f64 = 0.0;
    for l in [1.0, 7.0, 30.0, 49.0] {
        for m in [-l, 0.0, l - 1.0] {
            for b in [-1, 0, 1] {
                let exact = wigner3j_oracle([1.0, l, l + 1.0], [-f64::from(b), -m, m + f64::from(b)])?;
                let closed = wigner3j_dipole(l, b, m)?;
                if exact != 0.0 {
                    worst = worst.max((closed - exact).abs() / exact.abs());
                }
            }
        }
    }
    println!("closed form vs exact, worst relative difference: {worst:.2e}");
    println!("(1 2 3; 0 -1 1)            = {:.12}", Wigner3j::new(1.0, 2.0, 3.0, 0.0, -1.0, 1.0).evaluate()?);
    let l = 1e15;
    println!("(1 l l+1; 0 -l/2 l/2), l=1e15 = {:.6e}", Wigner3j::new(1.0, l, l + 1.0, 0.0, -l / 2.0, l / 2.0).evaluate()?);
    println!("sqrt(l) (1 l l+1; 0 0 0), l=1e23 = {:.6} (limit ±1/2)", wigner3j_dipole(1e23, 0, 0.0)? * 1e23f64.sqrt());
    Ok(worst)
}

fn main() -> framedrag::Result<()> {
    run_example().map(|_| ())
}
