//! Mechanical and coupling scales of the nominal two-sphere experiment.

use framedrag::collisions::config_collision_rate;
use framedrag::params::{derive_scales, DerivedScales, ExperimentConfig};

pub fn run_example() -> framedrag::Result<DerivedScales> {
    let config = ExperimentConfig::default();
    let d = derive_scales(&config)?;
    println!("alpha          {:.4e} 1/s", d.alpha);
    println!("mass           {:.4e} kg", d.a.mass);
    println!("inertia        {:.4e} kg m^2", d.a.inertia);
    println!("L = I omega    {:.4e} J s", d.a.angular_momentum);
    println!("l = L / hbar   {:.4e}", d.a.quantum_number);
    println!("g(t) / t       {:.4e} 1/s", d.coupling_g(1.0));
    println!("V_G            {:.4e} J", d.v_g);
    println!("collision rate {:.4} 1/s", config_collision_rate(&config)?);

    let closer = ExperimentConfig { separation: 150e-6, ..config };
    let g_closer = derive_scales(&closer)?.coupling_g(1.0);
    println!("g / t at r = 150 um: {g_closer:.4e} 1/s (x{:.2})", g_closer / d.coupling_g(1.0));
    Ok(d)
}

fn main() -> framedrag::Result<()> {
    run_example().map(|_| ())
}
