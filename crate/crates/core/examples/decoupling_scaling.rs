//! Commutant distance against duration for free evolution, periodic and UDD
//! sequences on a dephasing qubit coupled to a random 4-level bath.

use tdcontrol::control::{generate_sequence, SequenceKind};
use tdcontrol::lab::{default_grid, sweep_and_fit, PropagationSettings, DEFAULT_FLOOR};
use tdcontrol::linalg::pauli::{identity, sigma_x, sigma_z};
use tdcontrol::models::random_static_model;

fn main() -> tdcontrol::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let model = random_static_model(2, 4, &[identity(), sigma_z()], 1.0, seed)?;
    let grid = default_grid();
    let settings = PropagationSettings::default();

    println!("{:<10} {:>8} {:>10}", "sequence", "slope", "r^2");
    let cases = [
        (SequenceKind::Free, 0),
        (SequenceKind::Periodic, 2),
        (SequenceKind::Periodic, 4),
        (SequenceKind::Udd, 1),
        (SequenceKind::Udd, 2),
        (SequenceKind::Udd, 3),
        (SequenceKind::Udd, 4),
    ];
    for (kind, n) in cases {
        let seq = generate_sequence(kind, n, &sigma_x())?;
        let run = sweep_and_fit(&model, &seq, &grid, seq.omega(), &settings, DEFAULT_FLOOR)?;
        println!("{:<10} {:>8.3} {:>10.6}", format!("{kind}-{n}"), run.fit.slope, run.fit.r_squared);
    }
    Ok(())
}
