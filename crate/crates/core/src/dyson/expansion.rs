use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use super::{
    adjoint_series, enumerate_indices, factorial, interaction_taylor, system_integral, MultiIndex,
    PolyOperatorSeries,
};
use crate::control::{ProtectedSet, TogglingFrame};
use crate::error::{Error, Result};
use crate::linalg::{commutator_norm, ComplexOperator, C64};
use crate::models::ModelRef;

/// Enumeration cap on `n + |p⃗|`.
pub const DEFAULT_MAX_ORDER: usize = 6;
/// Order-condition violations below this count as satisfied.
pub const PASS_THRESHOLD: f64 = 1e-10;
/// Violations above this count as genuine failures.
pub const FAIL_THRESHOLD: f64 = 1e-3;

/// One expansion term: `S_n^{α⃗,p⃗}` on the system and the matching bath
/// operator (`𝓑_n` for static baths, `𝓑'_n` for time-dependent ones).
#[derive(Clone, Debug)]
pub struct DysonTerm {
    pub index: MultiIndex,
    pub system: ComplexOperator,
    pub bath: ComplexOperator,
}

impl DysonTerm {
    /// `(-i)^n T^{n+|p⃗|} S ⊗ 𝓑`.
    pub fn contribution(&self, t: f64) -> ComplexOperator {
        let n = self.index.n();
        let phase = match n % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, -1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, 1.0),
        };
        self.system
            .kron(&self.bath)
            .scale(phase * t.powi(self.index.order() as i32))
    }
}

/// All terms of the interaction-picture error propagator up to a given
/// order. The terms do not depend on `T`, so one expansion serves a whole
/// sweep.
#[derive(Clone, Debug)]
pub struct DysonExpansion {
    d_s: usize,
    d_b: usize,
    max_order: usize,
    terms: Vec<DysonTerm>,
}

impl DysonExpansion {
    pub fn new<'a>(
        model: impl Into<ModelRef<'a>>,
        frame: &TogglingFrame,
        max_order: usize,
    ) -> Result<Self> {
        Self::with_order_bound(model, frame, max_order, DEFAULT_MAX_ORDER)
    }

    pub fn with_order_bound<'a>(
        model: impl Into<ModelRef<'a>>,
        frame: &TogglingFrame,
        max_order: usize,
        bound: usize,
    ) -> Result<Self> {
        let model = model.into();
        if max_order == 0 {
            return Err(Error::arg("expansion order must be at least 1"));
        }
        if max_order > bound {
            return Err(Error::BudgetExceeded {
                what: "expansion order",
                needed: max_order,
                budget: bound,
            });
        }
        if frame.num_ops() != model.num_couplings() || frame.d_s() != model.d_s() {
            return Err(Error::dims("toggling frame vs model"));
        }
        let couplings = model.num_couplings();
        // factors[α][p] = (p-th interaction-picture coefficient of B_α) / p!
        let max_p = max_order - 1;
        let factors: Vec<Vec<ComplexOperator>> = match model {
            ModelRef::Static(m) => {
                let baths = m.bath_ops();
                (0..couplings)
                    .map(|alpha| {
                        (0..=max_p)
                            .map(|p| {
                                adjoint_series(&baths[0], &baths[alpha], p)
                                    .map(|a| a.scale_real(1.0 / factorial(p)))
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<_>>()?
            }
            ModelRef::TimeDependent(m) => {
                let b0 = PolyOperatorSeries::from(&m.couplings()[0].bath);
                m.couplings()
                    .iter()
                    .map(|c| {
                        let series = interaction_taylor(&b0, &PolyOperatorSeries::from(&c.bath), max_p)?;
                        Ok(series
                            .coefficients()
                            .iter()
                            .enumerate()
                            .map(|(p, b)| b.scale_real(1.0 / factorial(p)))
                            .collect())
                    })
                    .collect::<Result<_>>()?
            }
        };
        let d_b = model.d_b();
        let terms = enumerate_indices(couplings, max_order)
            .into_par_iter()
            .map(|index| {
                let system = system_integral(frame, &index)?;
                let mut bath = ComplexOperator::identity(d_b);
                for (&a, &p) in index.alphas().iter().zip(index.ps()) {
                    bath = &bath * &factors[a][p];
                }
                Ok(DysonTerm {
                    index,
                    system,
                    bath,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            d_s: model.d_s(),
            d_b,
            max_order,
            terms,
        })
    }

    pub fn terms(&self) -> &[DysonTerm] {
        &self.terms
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Sum of all terms of exactly order `m` at duration `t`.
    pub fn order_term(&self, m: usize, t: f64) -> ComplexOperator {
        let mut acc = ComplexOperator::zeros(self.d_s * self.d_b);
        for term in self.terms.iter().filter(|x| x.index.order() == m) {
            acc += &term.contribution(t);
        }
        acc
    }

    /// `1 + Σ_{order ≤ N} (-i)^n T^{order} S ⊗ 𝓑`, summed in index order.
    pub fn evaluate(&self, t: f64) -> ComplexOperator {
        let mut acc = ComplexOperator::identity(self.d_s * self.d_b);
        for term in &self.terms {
            acc += &term.contribution(t);
        }
        acc
    }
}

/// Interaction-picture error propagator `Ũ_E(T)` truncated at
/// `n + |p⃗| ≤ max_order`.
pub fn truncated_error_propagator<'a>(
    model: impl Into<ModelRef<'a>>,
    frame: &TogglingFrame,
    max_order: usize,
    t: f64,
) -> Result<ComplexOperator> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::arg(format!("duration {t} must be positive")));
    }
    Ok(DysonExpansion::new(model, frame, max_order)?.evaluate(t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

impl Verdict {
    pub fn classify(violation: f64) -> Self {
        if violation < PASS_THRESHOLD {
            Verdict::Pass
        } else if violation > FAIL_THRESHOLD {
            Verdict::Fail
        } else {
            Verdict::Indeterminate
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderRow {
    pub order: usize,
    pub count: usize,
    pub max_violation: f64,
    pub verdict: Verdict,
}

/// Per-order maximum of `‖[S_n^{α⃗,p⃗}, S]‖_F` over indices and `S ∈ Ω`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderReport {
    pub rows: Vec<OrderRow>,
    /// Largest `m` such that every order `≤ m` passes.
    pub achieved_order: usize,
}

impl OrderReport {
    pub fn achieves(&self, order: usize) -> bool {
        self.achieved_order >= order
    }

    pub fn row(&self, order: usize) -> Option<&OrderRow> {
        self.rows.iter().find(|r| r.order == order)
    }
}

/// Checks which nested integrals commute with the protected set.
pub fn order_check(frame: &TogglingFrame, omega: &ProtectedSet, max_order: usize) -> Result<OrderReport> {
    if max_order == 0 {
        return Err(Error::arg("order_check needs N >= 1"));
    }
    if omega.dim() != frame.d_s() {
        return Err(Error::dims("protected set vs frame"));
    }
    let indices = enumerate_indices(frame.num_ops(), max_order);
    let violations = indices
        .par_iter()
        .map(|index| {
            let s = system_integral(frame, index)?;
            omega
                .members()
                .iter()
                .map(|w| commutator_norm(&s, w))
                .try_fold(0.0f64, |acc, v| v.map(|v| acc.max(v)))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut rows = Vec::with_capacity(max_order);
    for order in 1..=max_order {
        let (count, max_violation) = indices
            .iter()
            .zip(&violations)
            .filter(|(i, _)| i.order() == order)
            .fold((0, 0.0f64), |(c, m), (_, &v)| (c + 1, m.max(v)));
        rows.push(OrderRow {
            order,
            count,
            max_violation,
            verdict: Verdict::classify(max_violation),
        });
    }
    let achieved_order = rows
        .iter()
        .take_while(|r| r.verdict == Verdict::Pass)
        .count();
    Ok(OrderReport {
        rows,
        achieved_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{generate_sequence, toggling_frame, SequenceKind};
    use crate::linalg::pauli::*;
    use crate::linalg::HermitianOperator;
    use crate::models::{random_static_model, StaticModel};

    fn dephasing() -> Vec<ComplexOperator> {
        vec![identity(), sigma_z()]
    }

    fn frame(kind: SequenceKind, n: usize, ops: &[ComplexOperator]) -> TogglingFrame {
        let seq = generate_sequence(kind, n, &sigma_x()).unwrap();
        toggling_frame(&seq, ops).unwrap()
    }

    #[test]
    fn zero_coupling_gives_identity() {
        let zero = ComplexOperator::zeros(3);
        let b0 = random_static_model(2, 3, &dephasing(), 1.0, 4).unwrap().bath_ops()[0].clone();
        let m = StaticModel::new(&dephasing(), &[b0, zero], None).unwrap();
        let f = frame(SequenceKind::Udd, 2, &dephasing());
        let u = truncated_error_propagator(&m, &f, 3, 0.3).unwrap();
        assert!(u.max_abs_diff(&ComplexOperator::identity(6)) < 1e-15);
    }

    #[test]
    fn first_order_free_evolution() {
        let m = random_static_model(2, 3, &dephasing(), 1.0, 8).unwrap();
        let f = frame(SequenceKind::Free, 0, &dephasing());
        let t = 0.2;
        let u = truncated_error_propagator(&m, &f, 1, t).unwrap();
        let b = m.bath_ops()[1].clone();
        let expected = &ComplexOperator::identity(6) - &sigma_z().kron(&b).scale(C64::new(0.0, t));
        assert!(u.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn constant_series_match_static_machinery() {
        let ops = vec![identity(), sigma_x(), sigma_z()];
        let m = random_static_model(2, 3, &ops, 1.0, 11).unwrap();
        let td = m.to_time_dependent();
        let f = frame(SequenceKind::Udd, 3, &ops);
        let a = DysonExpansion::new(&m, &f, 4).unwrap();
        let b = DysonExpansion::new(&td, &f, 4).unwrap();
        for t in [0.05, 0.3] {
            assert!(a.evaluate(t).max_abs_diff(&b.evaluate(t)) <= 1e-13);
        }
    }

    #[test]
    fn first_order_term_is_anti_hermitian() {
        let ops = vec![identity(), sigma_x(), sigma_z()];
        let m = random_static_model(2, 3, &ops, 1.0, 2).unwrap();
        let f = frame(SequenceKind::Periodic, 3, &ops);
        let exp = DysonExpansion::new(&m, &f, 2).unwrap();
        let first = exp.order_term(1, 0.4).scale(C64::new(0.0, 1.0));
        assert!(HermitianOperator::new(first).is_ok());
    }

    #[test]
    fn linear_in_first_system_operator() {
        let ops = vec![identity(), sigma_x(), sigma_z()];
        let doubled = vec![identity(), sigma_x().scale_real(2.0), sigma_z()];
        let f1 = frame(SequenceKind::Udd, 2, &ops);
        let f2 = frame(SequenceKind::Udd, 2, &doubled);
        let idx = MultiIndex::new(vec![1, 2], vec![1, 0]).unwrap();
        let a = system_integral(&f1, &idx).unwrap();
        let b = system_integral(&f2, &idx).unwrap();
        assert!(b.max_abs_diff(&a.scale_real(2.0)) < 1e-15);
    }

    #[test]
    fn order_budget() {
        let m = random_static_model(2, 2, &dephasing(), 1.0, 1).unwrap();
        let f = frame(SequenceKind::Free, 0, &dephasing());
        assert!(matches!(
            DysonExpansion::new(&m, &f, DEFAULT_MAX_ORDER + 1),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(truncated_error_propagator(&m, &f, 1, -1.0).is_err());
    }

    #[test]
    fn order_check_examples() {
        let free = frame(SequenceKind::Free, 0, &dephasing());
        let omega = ProtectedSet::new(vec![sigma_x()]).unwrap();
        let r = order_check(&free, &omega, 1).unwrap();
        assert!((r.rows[0].max_violation - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(r.rows[0].verdict, Verdict::Fail);
        assert_eq!(r.achieved_order, 0);

        let hahn = frame(SequenceKind::Udd, 1, &dephasing());
        let r = order_check(&hahn, &ProtectedSet::full_algebra(2), 2).unwrap();
        assert!(r.rows[0].max_violation < 1e-12);
        assert_eq!(r.rows[1].verdict, Verdict::Fail);
        // from S = -σ_z/4: ‖[σ_z, σ_x]‖/4
        assert!((r.rows[1].max_violation - 2.0 * 2f64.sqrt() / 4.0).abs() < 1e-14);
        assert_eq!(r.achieved_order, 1);
    }

    #[test]
    fn udd_achieves_its_order() {
        for n in 1..=4 {
            let f = frame(SequenceKind::Udd, n, &dephasing());
            let r = order_check(&f, &ProtectedSet::full_algebra(2), n + 1).unwrap();
            assert!(r.achieves(n), "UDD-{n}: {:?}", r.rows);
            assert_eq!(r.row(n + 1).unwrap().verdict, Verdict::Fail);
        }
    }

    #[test]
    fn failing_order_shows_in_expansion() {
        // Hahn fails at order 2, so the order-2 expansion term does not commute with Ω
        let m = random_static_model(2, 3, &dephasing(), 1.0, 6).unwrap();
        let f = frame(SequenceKind::Udd, 1, &dephasing());
        let exp = DysonExpansion::new(&m, &f, 2).unwrap();
        let term = exp.order_term(2, 1.0);
        let sx = sigma_x().kron(&ComplexOperator::identity(3));
        assert!(commutator_norm(&term, &sx).unwrap() > FAIL_THRESHOLD);
        let first = exp.order_term(1, 1.0);
        assert!(commutator_norm(&first, &sx).unwrap() < PASS_THRESHOLD);
    }
}
