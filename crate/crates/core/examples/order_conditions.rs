//! Moments of the switching function and the operator-level order check.

use tdcontrol::control::{generate_sequence, modulation_profile, toggling_frame, SequenceKind};
use tdcontrol::dyson::order_check;
use tdcontrol::linalg::pauli::{identity, sigma_x, sigma_y, sigma_z};

fn main() -> tdcontrol::Result<()> {
    let dephasing = [identity(), sigma_z()];
    for n in 1..=5 {
        let seq = generate_sequence(SequenceKind::Udd, n, &sigma_x())?;
        let frame = toggling_frame(&seq, &dephasing)?;
        let profile = modulation_profile(&frame, 1, &sigma_z())?;
        let moments: Vec<String> = (0..=n as u32).map(|p| format!("{:.1e}", profile.moment(p))).collect();
        println!("UDD-{n}  moments p=0..{n}: [{}]", moments.join(", "));
        let report = order_check(&frame, seq.omega(), (n + 1).min(6))?;
        println!("        achieved order {}", report.achieved_order);
    }

    // a general qubit coupling needs more than dephasing control
    let general = [identity(), sigma_x(), sigma_y(), sigma_z()];
    let xy4 = tdcontrol::control::ControlSequence::from_pulses(
        2,
        [0.125, 0.375, 0.625, 0.875]
            .iter()
            .zip([sigma_x(), sigma_y(), sigma_x(), sigma_y()])
            .map(|(&t, p)| tdcontrol::control::PulseEvent::new(t, p))
            .collect::<tdcontrol::Result<Vec<_>>>()?,
        tdcontrol::control::ProtectedSet::full_algebra(2),
    )?;
    for (name, seq) in [
        ("UDD-2 (X pulses)", generate_sequence(SequenceKind::Udd, 2, &sigma_x())?),
        ("XY-4", xy4),
    ] {
        let report = order_check(&toggling_frame(&seq, &general)?, seq.omega(), 3)?;
        println!("\n{name} on a general coupling:");
        for row in &report.rows {
            println!("  order {}  {:>3} terms  max violation {:.2e}  {:?}", row.order, row.count, row.max_violation, row.verdict);
        }
    }
    Ok(())
}
