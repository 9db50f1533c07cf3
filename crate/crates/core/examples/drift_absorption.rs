//! A time-dependent system drift `(0.3 + 0.5 t + 0.4 t²) σ_z` folded into the
//! bath couplings. UDD-2 keeps its order.

use tdcontrol::control::{generate_sequence, SequenceKind};
use tdcontrol::lab::{default_grid, sweep_and_fit, PropagationSettings, DEFAULT_FLOOR};
use tdcontrol::linalg::pauli::{identity, sigma_x, sigma_z};
use tdcontrol::models::{absorb_drift, evaluate_hamiltonian, random_time_dependent_model};

fn main() -> tdcontrol::Result<()> {
    let model = random_time_dependent_model(2, 4, &[identity(), sigma_z()], 3, 1.0, 1)?;
    let drift = [sigma_z().scale_real(0.3), sigma_z().scale_real(0.5), sigma_z().scale_real(0.8)];
    let absorbed = absorb_drift(&model, &drift)?;

    let t = 0.4;
    let shift = &evaluate_hamiltonian(&absorbed, t).into_operator()
        - evaluate_hamiltonian(&model, t).as_operator();
    println!("added term at t = {t}: {:.6} σ_z ⊗ I", shift.get(0, 0).re);

    let seq = generate_sequence(SequenceKind::Udd, 2, &sigma_x())?;
    let settings = PropagationSettings::default();
    for (name, m) in [("without drift", &model), ("with drift", &absorbed)] {
        let run = sweep_and_fit(m, &seq, &default_grid(), seq.omega(), &settings, DEFAULT_FLOOR)?;
        println!("{name:<14} slope {:.3}  ln prefactor {:.4}", run.fit.slope, run.fit.intercept);
    }
    Ok(())
}
