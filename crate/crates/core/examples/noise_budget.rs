//! Spurious interactions and heating compared with the gravitational signal.

use framedrag::feasibility::{budget_report, render_budget_text, BudgetLine, FeasibilitySettings};
use framedrag::params::ExperimentConfig;

pub fn run_example() -> framedrag::Result<Vec<BudgetLine>> {
    let config = ExperimentConfig::default();
    let lines = budget_report(&config, &FeasibilitySettings::default())?;
    print!("{}", render_budget_text(&lines));

    let rounder = FeasibilitySettings { ellipticity: 1e-6, ..FeasibilitySettings::default() };
    let better = budget_report(&config, &rounder)?;
    let spheroid = better.iter().find(|l| l.name == "spheroid_quadrupole").expect("budget has a spheroid line");
    println!("\nwith ellipticity 1e-6 the spheroid line is {}", spheroid.verdict);
    Ok(lines)
}

fn main() -> framedrag::Result<()> {
    run_example().map(|_| ())
}
