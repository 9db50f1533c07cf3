use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::fit::{fit_power_law, FitResult};
use super::propagate::{
    error_propagator, interaction_error_propagator, propagate, PropagationSettings,
};
use crate::control::{toggling_frame, ControlSequence, ProtectedSet};
use crate::dyson::DysonExpansion;
use crate::error::{Error, Result};
use crate::linalg::{commutator_norm, ComplexOperator};
use crate::models::ModelRef;

/// `max_{S∈Ω} ‖[U_E, S ⊗ I_B]‖_F`.
pub fn commutant_distance(u_e: &ComplexOperator, omega: &ProtectedSet) -> Result<f64> {
    let d_s = omega.dim();
    if u_e.dim() % d_s != 0 {
        return Err(Error::dims(format!(
            "error propagator {} vs protected set {}",
            u_e.dim(),
            d_s
        )));
    }
    let ident_b = ComplexOperator::identity(u_e.dim() / d_s);
    omega.members().iter().try_fold(0.0f64, |acc, s| {
        Ok(acc.max(commutator_norm(u_e, &s.kron(&ident_b))?))
    })
}

/// One measured point of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingPoint {
    #[serde(rename = "T")]
    pub t: f64,
    pub distance: f64,
    pub steps_used: usize,
    pub unitarity_defect: f64,
}

/// A T-grid sweep with its power-law fit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRun {
    pub points: Vec<ScalingPoint>,
    pub fit: FitResult,
    pub floor: f64,
}

impl ScalingRun {
    pub fn t_grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn distances(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.distance).collect()
    }

    /// `T,distance,steps_used,unitarity_defect`, one row per grid point.
    /// Floats use shortest round-trip formatting, so equal runs give equal
    /// bytes.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("T,distance,steps_used,unitarity_defect\n");
        for p in &self.points {
            let _ = writeln!(
                out,
                "{:e},{:e},{},{:e}",
                p.t, p.distance, p.steps_used, p.unitarity_defect
            );
        }
        out
    }
}

/// Checks a sweep grid: at least five strictly increasing positive points
/// spanning a decade.
pub fn validate_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.len() < 5 {
        return Err(Error::arg(format!(
            "sweep needs at least 5 grid points, got {}",
            t_grid.len()
        )));
    }
    if t_grid.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::arg("grid durations must be positive and finite"));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::arg("grid must be strictly increasing"));
    }
    let span = t_grid[t_grid.len() - 1] / t_grid[0];
    if span < 10.0 * (1.0 - 1e-12) {
        return Err(Error::arg(format!(
            "grid spans a factor {span:.3}, less than one decade"
        )));
    }
    Ok(())
}

fn measure<F>(t_grid: &[f64], point: F) -> Result<Vec<ScalingPoint>>
where
    F: Fn(f64) -> Result<ScalingPoint> + Sync,
{
    // indexed collect keeps grid order independent of scheduling
    t_grid.par_iter().map(|&t| point(t)).collect()
}

/// Commutant distance of the error propagator over a T grid, with a
/// power-law fit.
pub fn sweep_and_fit<'a>(
    model: impl Into<ModelRef<'a>>,
    seq: &ControlSequence,
    t_grid: &[f64],
    omega: &ProtectedSet,
    settings: &PropagationSettings,
    floor: f64,
) -> Result<ScalingRun> {
    let model = model.into();
    validate_grid(t_grid)?;
    if omega.dim() != seq.d_s() {
        return Err(Error::dims("protected set vs control sequence"));
    }
    let points = measure(t_grid, |t| {
        let prop = propagate(model, seq, t, settings)?;
        let ue = error_propagator(&prop.unitary, seq.target())?;
        Ok(ScalingPoint {
            t,
            distance: commutant_distance(&ue, omega)?,
            steps_used: prop.steps_used,
            unitarity_defect: prop.unitarity_defect,
        })
    })?;
    let fit = fit_power_law(
        t_grid,
        &points.iter().map(|p| p.distance).collect::<Vec<_>>(),
        floor,
    )?;
    Ok(ScalingRun { points, fit, floor })
}

/// Residual `‖Ũ_E(T) − truncation at N‖_F` over a T grid, with a power-law
/// fit. `Ũ_E` comes from brute-force propagation in the interaction picture
/// of the pure-bath term.
pub fn expansion_sweep<'a>(
    model: impl Into<ModelRef<'a>>,
    seq: &ControlSequence,
    t_grid: &[f64],
    max_order: usize,
    settings: &PropagationSettings,
    floor: f64,
) -> Result<ScalingRun> {
    let model = model.into();
    validate_grid(t_grid)?;
    let frame = toggling_frame(seq, &model.system_ops())?;
    let expansion = DysonExpansion::new(model, &frame, max_order)?;
    let points = measure(t_grid, |t| {
        let exact = interaction_error_propagator(model, seq, t, settings)?;
        let truncated = expansion.evaluate(t);
        Ok(ScalingPoint {
            t,
            distance: exact.frobenius_distance(&truncated),
            steps_used: 0,
            unitarity_defect: exact.unitarity_defect(),
        })
    })?;
    let fit = fit_power_law(
        t_grid,
        &points.iter().map(|p| p.distance).collect::<Vec<_>>(),
        floor,
    )?;
    Ok(ScalingRun { points, fit, floor })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{generate_sequence, SequenceKind};
    use crate::lab::fit::{log_space, DEFAULT_FLOOR};
    use crate::linalg::pauli::*;
    use crate::linalg::{matrix_exponential, C64};
    use crate::models::random_static_model;

    fn dephasing() -> Vec<ComplexOperator> {
        vec![identity(), sigma_z()]
    }

    #[test]
    fn commutant_distance_examples() {
        let omega = ProtectedSet::full_algebra(2);
        assert_eq!(
            commutant_distance(&ComplexOperator::identity(6), &omega).unwrap(),
            0.0
        );
        let w = matrix_exponential(
            &random_static_model(2, 3, &dephasing(), 1.0, 4).unwrap().bath_ops()[1]
                .scale(C64::new(0.0, -0.9)),
        )
        .unwrap();
        assert!(commutant_distance(&identity().kron(&w), &omega).unwrap() < 1e-14);

        let z_only = ProtectedSet::new(vec![sigma_z()]).unwrap();
        let d = commutant_distance(&sigma_x(), &z_only).unwrap();
        assert!((d - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        assert!(commutant_distance(&ComplexOperator::identity(3), &z_only).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(validate_grid(&log_space(0.05, 0.5, 10)).is_ok());
        assert!(validate_grid(&log_space(0.05, 0.5, 4)).is_err());
        assert!(validate_grid(&log_space(0.1, 0.5, 10)).is_err());
        assert!(validate_grid(&[0.5, 0.4, 0.3, 0.2, 0.01]).is_err());
    }

    #[test]
    fn hahn_and_udd3_slopes() {
        let m = random_static_model(2, 4, &dephasing(), 1.0, 1).unwrap();
        let grid = log_space(0.05, 0.5, 10);
        let s = PropagationSettings::default();
        let hahn = generate_sequence(SequenceKind::Udd, 1, &sigma_x()).unwrap();
        let run = sweep_and_fit(&m, &hahn, &grid, hahn.omega(), &s, DEFAULT_FLOOR).unwrap();
        assert!(
            (1.85..=2.3).contains(&run.fit.slope),
            "Hahn slope {}",
            run.fit.slope
        );
        let udd3 = generate_sequence(SequenceKind::Udd, 3, &sigma_x()).unwrap();
        let run = sweep_and_fit(&m, &udd3, &grid, udd3.omega(), &s, DEFAULT_FLOOR).unwrap();
        assert!(
            (3.85..=4.5).contains(&run.fit.slope),
            "UDD-3 slope {}",
            run.fit.slope
        );
        assert_eq!(run.points.len(), 10);
        assert!(run.to_csv().lines().count() == 11);
    }
}
