use super::i_commutator;
use crate::error::{Error, Result};
use crate::linalg::ComplexOperator;
use crate::models::PolyBathSeries;

/// Largest Taylor order the interaction-picture recursion will produce.
pub const MAX_TAYLOR_ORDER: usize = 16;

/// Operator Taylor coefficients at `t = 0`, stored as derivatives
/// (`C(t) = Σ_p c_p t^p / p!`).
#[derive(Clone, Debug, PartialEq)]
pub struct PolyOperatorSeries {
    coefficients: Vec<ComplexOperator>,
}

impl PolyOperatorSeries {
    pub fn new(coefficients: Vec<ComplexOperator>) -> Result<Self> {
        let first = coefficients
            .first()
            .ok_or_else(|| Error::arg("empty operator series"))?;
        let d = first.dim();
        if coefficients.iter().any(|c| c.dim() != d) {
            return Err(Error::dims("operator series coefficients"));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("operator series"));
        }
        Ok(Self { coefficients })
    }

    pub fn constant(op: ComplexOperator) -> Self {
        Self {
            coefficients: vec![op],
        }
    }

    pub fn coefficients(&self) -> &[ComplexOperator] {
        &self.coefficients
    }

    pub fn coefficient(&self, p: usize) -> Option<&ComplexOperator> {
        self.coefficients.get(p)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.coefficients[0].dim()
    }

    /// Coefficient `p`, zero beyond the stored degree.
    fn padded(&self, p: usize) -> ComplexOperator {
        self.coefficients
            .get(p)
            .cloned()
            .unwrap_or_else(|| ComplexOperator::zeros(self.dim()))
    }
}

impl From<&PolyBathSeries> for PolyOperatorSeries {
    fn from(s: &PolyBathSeries) -> Self {
        Self {
            coefficients: s.coefficients().iter().map(|c| c.as_operator().clone()).collect(),
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Taylor coefficients of `W†(t) B'_α(t) W(t)` with `W` the bath-only
/// time-ordered exponential of `B'_0`.
///
/// The derivative of the conjugated operator is the conjugate of
/// `𝒟C = Ċ + i[B'_0(t), C(t)]`, so the `p`-th coefficient is `(𝒟^p B'_α)(0)`.
/// Each application of `𝒟` is exact on truncated derivative arrays via the
/// Leibniz rule and shortens the valid length by one.
pub fn interaction_taylor(
    b0_series: &PolyOperatorSeries,
    ba_series: &PolyOperatorSeries,
    p_max: usize,
) -> Result<PolyOperatorSeries> {
    if p_max > MAX_TAYLOR_ORDER {
        return Err(Error::BudgetExceeded {
            what: "interaction-picture Taylor order",
            needed: p_max,
            budget: MAX_TAYLOR_ORDER,
        });
    }
    if b0_series.dim() != ba_series.dim() {
        return Err(Error::dims("interaction_taylor: B'_0 vs B'_α"));
    }
    let b0: Vec<ComplexOperator> = (0..=p_max).map(|k| b0_series.padded(k)).collect();
    let mut c: Vec<ComplexOperator> = (0..=p_max).map(|k| ba_series.padded(k)).collect();
    let mut out = Vec::with_capacity(p_max + 1);
    out.push(c[0].clone());
    for step in 1..=p_max {
        let len = p_max + 1 - step;
        let next: Vec<ComplexOperator> = (0..len)
            .map(|m| {
                let mut d = c[m + 1].clone();
                for k in 0..=m {
                    d += &i_commutator(&b0[k], &c[m - k]).scale_real(binomial(m, k));
                }
                d
            })
            .collect();
        c = next;
        out.push(c[0].clone());
    }
    PolyOperatorSeries::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyson::adjoint_series;
    use crate::linalg::matrix_exponential;
    use crate::linalg::pauli::*;
    use crate::linalg::C64;

    #[test]
    fn zeroth_coefficient_is_value_at_zero() {
        let b0 = PolyOperatorSeries::new(vec![sigma_z(), sigma_x()]).unwrap();
        let ba = PolyOperatorSeries::new(vec![sigma_y(), sigma_z()]).unwrap();
        let out = interaction_taylor(&b0, &ba, 3).unwrap();
        assert_eq!(out.coefficients()[0], sigma_y());
        assert_eq!(out.degree(), 3);
    }

    #[test]
    fn constant_series_reduce_to_adjoint_series() {
        let b0 = &sigma_z() + &sigma_x().scale_real(0.3);
        let ba = &sigma_x() + &sigma_y().scale_real(-0.7);
        let out = interaction_taylor(
            &PolyOperatorSeries::constant(b0.clone()),
            &PolyOperatorSeries::constant(ba.clone()),
            4,
        )
        .unwrap();
        for p in 0..=4 {
            let direct = adjoint_series(&b0, &ba, p).unwrap();
            assert!(out.coefficients()[p].max_abs_diff(&direct) <= 1e-13);
        }
    }

    #[test]
    fn no_conjugation_without_drift() {
        let b = &sigma_x() + &sigma_z();
        let b0 = PolyOperatorSeries::constant(ComplexOperator::zeros(2));
        let ba = PolyOperatorSeries::new(vec![ComplexOperator::zeros(2), b.clone()]).unwrap();
        let out = interaction_taylor(&b0, &ba, 4).unwrap();
        assert_eq!(out.coefficients()[1], b);
        for p in [0, 2, 3, 4] {
            assert_eq!(out.coefficients()[p].frobenius_norm(), 0.0);
        }
    }

    /// Finite-difference oracle on the closed form for a constant `B'_0`:
    /// `W = e^{-iB_0 t}`, so the conjugated operator is explicit.
    #[test]
    fn matches_finite_differences_for_static_drift() {
        let b0 = &sigma_z().scale_real(0.8) + &sigma_x().scale_real(0.2);
        let ba = PolyOperatorSeries::new(vec![
            sigma_x(),
            sigma_y().scale_real(0.5),
            sigma_z().scale_real(-0.4),
        ])
        .unwrap();
        let out = interaction_taylor(&PolyOperatorSeries::constant(b0.clone()), &ba, 2).unwrap();
        let conj = |t: f64| {
            let w = matrix_exponential(&b0.scale(C64::new(0.0, -t))).unwrap();
            let bt = &(&ba.coefficients()[0] + &ba.coefficients()[1].scale_real(t))
                + &ba.coefficients()[2].scale_real(t * t / 2.0);
            &(&w.adjoint() * &bt) * &w
        };
        let h = 1e-4;
        let d1 = (&conj(h) - &conj(-h)).scale_real(1.0 / (2.0 * h));
        let d2 = (&(&conj(h) + &conj(-h)) - &conj(0.0).scale_real(2.0)).scale_real(1.0 / (h * h));
        assert!(out.coefficients()[1].max_abs_diff(&d1) < 1e-7);
        assert!(out.coefficients()[2].max_abs_diff(&d2) < 1e-5);
    }

    #[test]
    fn order_budget() {
        let s = PolyOperatorSeries::constant(sigma_z());
        assert!(matches!(
            interaction_taylor(&s, &s, MAX_TAYLOR_ORDER + 1),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
