use crate::control::ControlSequence;
use crate::error::{Error, Result};
use crate::linalg::{matrix_exponential, ComplexOperator, C64};
use crate::models::ModelRef;

/// Largest unitarity defect accepted from a propagation.
pub const UNITARITY_LIMIT: f64 = 1e-10;

/// Step control for the time-dependent integrator.
///
/// Static Hamiltonians are exponentiated exactly per inter-pulse interval
/// and ignore these settings.
#[derive(Clone, Debug, PartialEq)]
pub struct PropagationSettings {
    /// Steps per interval on the first attempt.
    pub initial_steps: usize,
    /// Frobenius change under step halving that ends refinement.
    pub tolerance: f64,
    /// Refinement gives up beyond this many steps per interval.
    pub max_steps: usize,
}

impl Default for PropagationSettings {
    fn default() -> Self {
        Self {
            initial_steps: 4,
            tolerance: 1e-12,
            max_steps: 1 << 16,
        }
    }
}

impl PropagationSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::arg("propagation tolerance must be positive"));
        }
        if self.initial_steps == 0 || self.max_steps < self.initial_steps {
            return Err(Error::arg("invalid propagation step counts"));
        }
        Ok(())
    }
}

/// A propagated unitary with bookkeeping.
#[derive(Clone, Debug)]
pub struct Propagation {
    pub unitary: ComplexOperator,
    /// Integrator steps summed over intervals at the accepted refinement.
    pub steps_used: usize,
    pub unitarity_defect: f64,
}

const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9; // √3 / 6
const COMMUTATOR_WEIGHT: f64 = 0.144_337_567_297_406_43; // √3 / 12

fn minus_i(h: &ComplexOperator) -> ComplexOperator {
    h.scale(C64::new(0.0, -1.0))
}

/// One fourth-order Magnus step with two Gauss-Legendre nodes:
/// `Ω = h/2 (A_1 + A_2) + √3 h²/12 [A_2, A_1]`, `A = -iH`.
fn magnus4_step<F>(hamiltonian: &F, t: f64, h: f64) -> Result<ComplexOperator>
where
    F: Fn(f64) -> ComplexOperator,
{
    let a1 = minus_i(&hamiltonian(t + (0.5 - GAUSS_OFFSET) * h));
    let a2 = minus_i(&hamiltonian(t + (0.5 + GAUSS_OFFSET) * h));
    let omega = &(&a1 + &a2).scale_real(0.5 * h) + &a2.commutator(&a1).scale_real(COMMUTATOR_WEIGHT * h * h);
    matrix_exponential(&omega)
}

fn magnus4<F>(hamiltonian: &F, a: f64, b: f64, steps: usize, dim: usize) -> Result<ComplexOperator>
where
    F: Fn(f64) -> ComplexOperator,
{
    let h = (b - a) / steps as f64;
    let mut u = ComplexOperator::identity(dim);
    for k in 0..steps {
        let step = magnus4_step(hamiltonian, a + k as f64 * h, h)?;
        u = &step * &u;
    }
    Ok(u)
}

/// Time-ordered exponential of `-i H(t)` over `[a, b]`, refined by step
/// doubling until the Frobenius change drops below the tolerance.
/// Returns the propagator and the accepted step count.
pub fn time_ordered_exponential<F>(
    hamiltonian: &F,
    a: f64,
    b: f64,
    settings: &PropagationSettings,
) -> Result<(ComplexOperator, usize)>
where
    F: Fn(f64) -> ComplexOperator,
{
    settings.validate()?;
    let dim = hamiltonian(a).dim();
    if b <= a {
        return Ok((ComplexOperator::identity(dim), 0));
    }
    let mut steps = settings.initial_steps;
    let mut coarse = magnus4(hamiltonian, a, b, steps, dim)?;
    loop {
        let fine_steps = steps * 2;
        if fine_steps > settings.max_steps {
            return Err(Error::NonConvergence { t: b, steps });
        }
        let fine = magnus4(hamiltonian, a, b, fine_steps, dim)?;
        let change = fine.frobenius_distance(&coarse);
        if change < settings.tolerance {
            return Ok((fine, fine_steps));
        }
        coarse = fine;
        steps = fine_steps;
    }
}

/// Inter-pulse intervals `[θ_{j-1} T, θ_j T]` and the pulse closing each.
fn intervals(seq: &ControlSequence, t: f64) -> Vec<(f64, f64, Option<&ComplexOperator>)> {
    let mut out = Vec::with_capacity(seq.pulses().len() + 1);
    let mut start = 0.0;
    for p in seq.pulses() {
        let end = p.theta() * t;
        out.push((start, end, Some(p.pulse())));
        start = end;
    }
    if seq.pulses().last().map(|p| p.theta() < 1.0).unwrap_or(true) {
        out.push((start, t, None));
    }
    out
}

/// Full system-bath propagator over duration `t`: free evolution under the
/// model between pulses, pulse `P_j ⊗ I_B` applied exactly at `θ_j t`.
pub fn propagate<'a>(
    model: impl Into<ModelRef<'a>>,
    seq: &ControlSequence,
    t: f64,
    settings: &PropagationSettings,
) -> Result<Propagation> {
    let model = model.into();
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::arg(format!("duration {t} must be positive")));
    }
    if seq.d_s() != model.d_s() {
        return Err(Error::dims("control sequence vs model"));
    }
    settings.validate()?;
    let d_b = model.d_b();
    let dim = model.d_s() * d_b;
    let ident_b = ComplexOperator::identity(d_b);
    let mut u = ComplexOperator::identity(dim);
    let mut steps_used = 0;
    let static_h = match model {
        ModelRef::Static(m) => Some(m.hamiltonian().into_operator()),
        ModelRef::TimeDependent(_) => None,
    };
    for (a, b, pulse) in intervals(seq, t) {
        if b > a {
            let step = match &static_h {
                Some(h) => {
                    steps_used += 1;
                    matrix_exponential(&h.scale(C64::new(0.0, -(b - a))))?
                }
                None => {
                    let (w, n) = time_ordered_exponential(&|s| model.hamiltonian_at(s), a, b, settings)
                        .map_err(|e| match e {
                            Error::NonConvergence { steps, .. } => Error::NonConvergence { t, steps },
                            other => other,
                        })?;
                    steps_used += n;
                    w
                }
            };
            u = &step * &u;
        }
        if let Some(p) = pulse {
            u = &p.kron(&ident_b) * &u;
        }
    }
    let unitarity_defect = u.unitarity_defect();
    if unitarity_defect > UNITARITY_LIMIT {
        return Err(Error::NotUnitary(unitarity_defect));
    }
    Ok(Propagation {
        unitary: u,
        steps_used,
        unitarity_defect,
    })
}

/// `U_E = (Q ⊗ I_B)† U`.
pub fn error_propagator(u: &ComplexOperator, q: &ComplexOperator) -> Result<ComplexOperator> {
    if u.dim() % q.dim() != 0 {
        return Err(Error::dims(format!("propagator {} vs gate {}", u.dim(), q.dim())));
    }
    let defect = u.unitarity_defect();
    if defect > UNITARITY_LIMIT {
        return Err(Error::NotUnitary(defect));
    }
    let d_b = u.dim() / q.dim();
    Ok(&q.kron(&ComplexOperator::identity(d_b)).adjoint() * u)
}

/// Bath-only propagator `W(t) = 𝒯 exp(-i ∫_0^t B'_0)`.
pub fn bath_propagator<'a>(
    model: impl Into<ModelRef<'a>>,
    t: f64,
    settings: &PropagationSettings,
) -> Result<ComplexOperator> {
    let model = model.into();
    match model {
        ModelRef::Static(m) => {
            matrix_exponential(&m.couplings()[0].bath.scale(C64::new(0.0, -t)))
        }
        ModelRef::TimeDependent(_) => {
            time_ordered_exponential(&|s| model.bath_drift_at(s), 0.0, t, settings).map(|(w, _)| w)
        }
    }
}

/// Error propagator in the interaction picture of the pure-bath term:
/// `Ũ_E(T) = (I_S ⊗ W(T))† (Q ⊗ I_B)† U(T)`.
pub fn interaction_error_propagator<'a>(
    model: impl Into<ModelRef<'a>>,
    seq: &ControlSequence,
    t: f64,
    settings: &PropagationSettings,
) -> Result<ComplexOperator> {
    let model = model.into();
    let u = propagate(model, seq, t, settings)?;
    let ue = error_propagator(&u.unitary, seq.target())?;
    let w = bath_propagator(model, t, settings)?;
    let frame = ComplexOperator::identity(model.d_s()).kron(&w).adjoint();
    Ok(&frame * &ue)
}
