//! Sum-uncertainty witness on product and entangled states of two small
//! rotors, and on an evolved state of the full-size spheres.

use framedrag::amspace::{build_interaction_hamiltonian, BasisWindow, StateVector, TruncatedProductBasis};
use framedrag::dynamics::{initial_state, Propagator};
use framedrag::entanglement::{log_negativity_pure, witness_sum_uncertainty, WitnessReport};
use framedrag::linalg::{CVector, C64};

fn report(label: &str, r: &WitnessReport) {
    println!("{label:<28} sum = {:>12.5e}  bound = {:>10.4e}  violated = {}", r.total_variance_sum, r.bound, r.violated);
}

pub fn run_example() -> framedrag::Result<Vec<WitnessReport>> {
    let w = BasisWindow::new(2.0, &[0.0], 2)?;
    let basis = TruncatedProductBasis::new(w.clone(), w.clone());
    let top = w.index_of(0, 2.0).expect("m = l is in the window");
    let mut out = Vec::new();

    let product = StateVector::basis_state(&basis, top, top);
    out.push(witness_sum_uncertainty(&product.density(), &basis, 0.0)?);
    report("|2,2>|2,2>", &out[0]);

    // J = 0 combination of two l = 2 rotors: Σ_m (−1)^m |m⟩|−m⟩ / √5.
    let mut singlet = CVector::zeros(basis.dim());
    for m in -2i32..=2 {
        let (ia, ib) = (w.index_of(0, f64::from(m)).unwrap(), w.index_of(0, f64::from(-m)).unwrap());
        singlet[basis.index(ia, ib)] = C64::new(if m % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
    }
    let singlet = StateVector::new(basis.dims(), singlet)?.normalized()?;
    out.push(witness_sum_uncertainty(&singlet.density(), &basis, 0.0)?);
    report("l = 2 singlet", &out[1]);

    let big = TruncatedProductBasis::new(BasisWindow::new(8.0, &[0.0], 8)?, BasisWindow::new(8.0, &[0.0], 8)?);
    let h = build_interaction_hamiltonian(&big, 1.0)?;
    let psi = Propagator::new(&h)?.apply(&initial_state(&big, 0.0, 0.0)?, 0.05);
    out.push(witness_sum_uncertainty(&psi.density(), &big, 0.0)?);
    report(&format!("l = 8, m = 0, E_N = {:.3}", log_negativity_pure(&psi)?), &out[2]);
    Ok(out)
}

fn main() -> framedrag::Result<()> {
    run_example().map(|_| ())
}
