//! Truncated short-time expansion of the interaction-picture error
//! propagator against brute-force propagation.

use tdcontrol::control::{generate_sequence, toggling_frame, SequenceKind};
use tdcontrol::dyson::DysonExpansion;
use tdcontrol::lab::{default_grid, expansion_sweep, PropagationSettings, DEFAULT_FLOOR};
use tdcontrol::linalg::pauli::{identity, sigma_x, sigma_z};
use tdcontrol::models::{random_static_model, random_time_dependent_model};

fn main() -> tdcontrol::Result<()> {
    let ops = [identity(), sigma_x(), sigma_z()];
    let seq = generate_sequence(SequenceKind::Udd, 2, &sigma_x())?;
    let settings = PropagationSettings::default();

    let st = random_static_model(2, 3, &ops, 1.0, 1)?;
    let frame = toggling_frame(&seq, &st.system_ops())?;
    let expansion = DysonExpansion::new(&st, &frame, 3)?;
    println!("{} terms up to order 3", expansion.terms().len());
    for term in expansion.terms().iter().take(6) {
        println!("  {}  |S| = {:.3e}", term.index, term.system.frobenius_norm());
    }

    for (label, td) in [("static", false), ("cubic bath", true)] {
        for order in 1..=3 {
            let run = if td {
                let m = random_time_dependent_model(2, 3, &ops, 3, 1.0, 1)?;
                expansion_sweep(&m, &seq, &default_grid(), order, &settings, DEFAULT_FLOOR)?
            } else {
                expansion_sweep(&st, &seq, &default_grid(), order, &settings, DEFAULT_FLOOR)?
            };
            println!("{label:<11} N={order}  residual slope {:.3}", run.fit.slope);
        }
    }
    Ok(())
}
