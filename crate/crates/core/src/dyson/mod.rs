//! Short-time perturbative expansion of the error propagator.
//!
//! In the interaction picture of the pure-bath term, the error propagator
//! expands as
//!
//! ```text
//! Ũ_E(T) = 1 + Σ_{n≥1} Σ_{α⃗} Σ_{p⃗} (-i)^n T^{n+|p⃗|} S_n^{α⃗,p⃗} ⊗ 𝓑_n^{α⃗,p⃗}
//! ```
//!
//! with the nested toggling-frame integral `S_n` ([`system_integral`]) and
//! the ordered product of normalized nested commutators `𝓑_n`
//! ([`bath_product`]). For time-dependent baths the commutators are
//! replaced by interaction-picture Taylor coefficients
//! ([`interaction_taylor`]).

mod expansion;
mod integral;
mod taylor;

pub use expansion::{
    order_check, truncated_error_propagator, DysonExpansion, DysonTerm, OrderReport, OrderRow,
    Verdict, DEFAULT_MAX_ORDER, FAIL_THRESHOLD, PASS_THRESHOLD,
};
pub use integral::system_integral;
pub use taylor::{interaction_taylor, PolyOperatorSeries, MAX_TAYLOR_ORDER};

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{ComplexOperator, C64, I};

/// One expansion label `(n, α⃗, p⃗)`: `n` factors, coupling indices
/// `α_j ≥ 1`, and Taylor powers `p_j ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    alphas: Vec<usize>,
    ps: Vec<usize>,
}

impl MultiIndex {
    pub fn new(alphas: Vec<usize>, ps: Vec<usize>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::arg("multi-index needs n >= 1"));
        }
        if alphas.len() != ps.len() {
            return Err(Error::arg("multi-index alphas and ps differ in length"));
        }
        if alphas.contains(&0) {
            return Err(Error::arg("multi-index alphas start at 1"));
        }
        Ok(Self { alphas, ps })
    }

    pub fn n(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[usize] {
        &self.alphas
    }

    pub fn ps(&self) -> &[usize] {
        &self.ps
    }

    /// `|p⃗| = Σ p_j`.
    pub fn p_total(&self) -> usize {
        self.ps.iter().sum()
    }

    /// Power of `T` the term contributes at: `n + |p⃗|`.
    pub fn order(&self) -> usize {
        self.n() + self.p_total()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} α={:?} p={:?}", self.n(), self.alphas, self.ps)
    }
}

/// All compositions of `total` into `parts` nonnegative integers, in
/// lexicographic order.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn alpha_tuples(couplings: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (1..couplings).map(move |a| {
                    let mut t = t.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    out
}

/// Every multi-index with `1 ≤ n + |p⃗| ≤ max_order` for a model with
/// `couplings` terms (`α` ranges over `1..couplings`). Sorted by order,
/// then `n`, then `α⃗`, then `p⃗`.
pub fn enumerate_indices(couplings: usize, max_order: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    if couplings < 2 {
        return out;
    }
    for order in 1..=max_order {
        for n in 1..=order {
            let ps = compositions(order - n, n);
            for alphas in alpha_tuples(couplings, n) {
                for p in &ps {
                    out.push(MultiIndex {
                        alphas: alphas.clone(),
                        ps: p.clone(),
                    });
                }
            }
        }
    }
    out
}

/// k-fold nested commutator `[iB_0, B_α]_k`, with `[iB_0, B_α]_0 = B_α`.
pub fn adjoint_series(b0: &ComplexOperator, ba: &ComplexOperator, k: usize) -> Result<ComplexOperator> {
    if b0.dim() != ba.dim() {
        return Err(Error::dims(format!("adjoint_series: {} vs {}", b0.dim(), ba.dim())));
    }
    let mut x = ba.clone();
    for _ in 0..k {
        x = i_commutator(b0, &x);
    }
    Ok(x)
}

/// `i[A, X]`. Shared by the static and interaction-picture paths so that
/// constant series reproduce the nested commutators bit for bit.
pub(crate) fn i_commutator(a: &ComplexOperator, x: &ComplexOperator) -> ComplexOperator {
    a.commutator(x).scale(I)
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `c_p^{(k)} = (-1)^k i^p / (k! (p-k)!)`.
pub fn c_coefficient(p: usize, k: usize) -> Result<C64> {
    if k > p {
        return Err(Error::arg(format!("c_coefficient needs k <= p, got k={k}, p={p}")));
    }
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let i_pow = match p % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    };
    Ok(i_pow * (sign / (factorial(k) * factorial(p - k))))
}

/// `𝓑_n = Π_j [iB_0, B_{α_j}]_{p_j} / p_j!`, leftmost factor `j = 1`.
pub fn bath_product(
    b0: &ComplexOperator,
    bath_ops: &[ComplexOperator],
    index: &MultiIndex,
) -> Result<ComplexOperator> {
    let mut acc = ComplexOperator::identity(b0.dim());
    for (&alpha, &p) in index.alphas.iter().zip(&index.ps) {
        let b = bath_ops
            .get(alpha)
            .ok_or_else(|| Error::arg(format!("coupling {alpha} out of range")))?;
        let factor = adjoint_series(b0, b, p)?.scale_real(1.0 / factorial(p));
        acc = acc.checked_mul(&factor)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli::*;

    #[test]
    fn adjoint_series_examples() {
        let x = sigma_x();
        assert_eq!(adjoint_series(&sigma_z(), &x, 0).unwrap(), x);
        let k1 = adjoint_series(&sigma_z(), &x, 1).unwrap();
        assert!(k1.max_abs_diff(&sigma_y().scale_real(-2.0)) < 1e-15);
        let k2 = adjoint_series(&sigma_z(), &x, 2).unwrap();
        assert!(k2.max_abs_diff(&sigma_x().scale_real(-4.0)) < 1e-15);
        assert!(adjoint_series(&sigma_z(), &ComplexOperator::identity(3), 1).is_err());
    }

    #[test]
    fn c_coefficient_examples() {
        assert_eq!(c_coefficient(0, 0).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(c_coefficient(1, 0).unwrap(), C64::new(0.0, 1.0));
        assert_eq!(c_coefficient(1, 1).unwrap(), C64::new(0.0, -1.0));
        assert_eq!(c_coefficient(2, 1).unwrap(), C64::new(1.0, 0.0));
        assert!(c_coefficient(1, 2).is_err());
        for p in 0..8 {
            for k in 0..=p {
                assert!(c_coefficient(p, k).unwrap().norm() > 0.0);
            }
        }
    }

    #[test]
    fn bath_product_examples() {
        let b0 = sigma_z();
        let ops = vec![sigma_z(), sigma_x(), sigma_y()];
        let one = MultiIndex::new(vec![1], vec![0]).unwrap();
        assert_eq!(bath_product(&b0, &ops, &one).unwrap(), sigma_x());
        let two = MultiIndex::new(vec![1, 2], vec![0, 0]).unwrap();
        assert_eq!(bath_product(&b0, &ops, &two).unwrap(), &sigma_x() * &sigma_y());
        let rev = MultiIndex::new(vec![2, 1], vec![0, 0]).unwrap();
        assert_ne!(bath_product(&b0, &ops, &rev).unwrap(), &sigma_x() * &sigma_y());
        let p2 = MultiIndex::new(vec![1], vec![2]).unwrap();
        let v = bath_product(&b0, &ops, &p2).unwrap();
        assert!(v.max_abs_diff(&sigma_x().scale_real(-2.0)) < 1e-15);
    }

    #[test]
    fn multi_index_validation() {
        assert!(MultiIndex::new(vec![], vec![]).is_err());
        assert!(MultiIndex::new(vec![0], vec![0]).is_err());
        assert!(MultiIndex::new(vec![1], vec![0, 1]).is_err());
        let m = MultiIndex::new(vec![1, 2], vec![1, 0]).unwrap();
        assert_eq!((m.n(), m.p_total(), m.order()), (2, 1, 3));
    }

    #[test]
    fn enumeration_counts() {
        // one non-identity coupling: 2^{m-1} compositions of order m
        let idx = enumerate_indices(2, 3);
        assert_eq!(idx.len(), 1 + 2 + 4);
        assert!(idx.windows(2).all(|w| w[0].order() <= w[1].order()));
        // two couplings: order m has Σ_n 2^n C(m-1, n-1) = 2·3^{m-1}
        let idx = enumerate_indices(3, 3);
        assert_eq!(idx.len(), 2 + 6 + 18);
        assert!(enumerate_indices(1, 3).is_empty());
    }
}
