//! The same UDD sequences on a static bath and on a bath whose operators
//! are cubic polynomials in time. The fitted orders should agree.

use tdcontrol::control::{generate_sequence, SequenceKind};
use tdcontrol::lab::{default_grid, sweep_and_fit, PropagationSettings, DEFAULT_FLOOR};
use tdcontrol::linalg::pauli::{identity, sigma_x, sigma_z};
use tdcontrol::models::{random_static_model, random_time_dependent_model};

fn main() -> tdcontrol::Result<()> {
    let ops = [identity(), sigma_z()];
    let grid = default_grid();
    let settings = PropagationSettings::default();

    println!("{:>4} {:>4} {:>10} {:>10} {:>8}", "n", "seed", "static", "cubic", "delta");
    for n in 1..=3 {
        let seq = generate_sequence(SequenceKind::Udd, n, &sigma_x())?;
        for seed in 1..=3 {
            let st = random_static_model(2, 4, &ops, 1.0, seed)?;
            let td = random_time_dependent_model(2, 4, &ops, 3, 1.0, seed)?;
            let a = sweep_and_fit(&st, &seq, &grid, seq.omega(), &settings, DEFAULT_FLOOR)?;
            let b = sweep_and_fit(&td, &seq, &grid, seq.omega(), &settings, DEFAULT_FLOOR)?;
            let steps: usize = b.points.iter().map(|p| p.steps_used).sum();
            println!(
                "{n:>4} {seed:>4} {:>10.3} {:>10.3} {:>8.3}   ({steps} integrator steps)",
                a.fit.slope,
                b.fit.slope,
                b.fit.slope - a.fit.slope
            );
        }
    }
    Ok(())
}
