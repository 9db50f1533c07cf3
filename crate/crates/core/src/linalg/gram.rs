use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use super::{ComplexOperator, C64};
use crate::error::{Error, Result};

/// Relative eigenvalue cutoff used when no tolerance is given.
pub const DEFAULT_GRAM_TOLERANCE: f64 = 1e-9;

/// Operators that carry the trace inner product `⟨A, B⟩ = Tr(A† B)`.
pub trait HilbertSchmidt: Sync {
    fn hs_dim(&self) -> usize;
    fn hs_inner(&self, other: &Self) -> C64;
}

impl HilbertSchmidt for ComplexOperator {
    fn hs_dim(&self) -> usize {
        self.dim()
    }

    fn hs_inner(&self, other: &Self) -> C64 {
        self.matrix()
            .iter()
            .zip(other.matrix().iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Result of a Gram-matrix rank computation.
#[derive(Clone, Debug, PartialEq)]
pub struct GramRank {
    pub rank: usize,
    /// Gram eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    pub tolerance: f64,
}

impl GramRank {
    /// Singular values of the operators stacked as vectors, descending.
    pub fn singular_values(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|&e| e.max(0.0).sqrt()).collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }
}

/// `G_ij = Tr(A_i† A_j)`, entries computed independently in parallel.
pub fn gram_matrix<T: HilbertSchmidt>(ops: &[T]) -> Result<DMatrix<C64>> {
    let first = ops.first().ok_or_else(|| Error::arg("gram of empty list"))?;
    let dim = first.hs_dim();
    if let Some(bad) = ops.iter().find(|o| o.hs_dim() != dim) {
        return Err(Error::dims(format!(
            "gram: {} vs {}",
            dim,
            bad.hs_dim()
        )));
    }
    let n = ops.len();
    let upper: Vec<(usize, usize, C64)> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(i, j)| (i, j, ops[i].hs_inner(&ops[j])))
        .collect();
    let mut g = DMatrix::<C64>::zeros(n, n);
    for (i, j, v) in upper {
        g[(i, j)] = v;
        g[(j, i)] = v.conj();
    }
    Ok(g)
}

/// Numerical rank of a list of operators under the trace inner product.
///
/// Counts Gram eigenvalues above `tolerance × λ_max`.
pub fn gram_rank<T: HilbertSchmidt>(ops: &[T], tolerance: f64) -> Result<GramRank> {
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(Error::arg(format!("gram tolerance {tolerance} not in (0,1)")));
    }
    let g = gram_matrix(ops)?;
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(g).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    let largest = eigenvalues.first().copied().unwrap_or(0.0);
    let rank = if largest <= 0.0 {
        0
    } else {
        eigenvalues.iter().filter(|&&e| e > tolerance * largest).count()
    };
    Ok(GramRank {
        rank,
        eigenvalues,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli::*;

    #[test]
    fn examples() {
        let r = gram_rank(&[identity(), sigma_z()], DEFAULT_GRAM_TOLERANCE).unwrap();
        assert_eq!(r.rank, 2);
        let r = gram_rank(&[sigma_x(), sigma_x()], DEFAULT_GRAM_TOLERANCE).unwrap();
        assert_eq!(r.rank, 1);
        let r = gram_rank(
            &[identity(), sigma_x(), sigma_y(), sigma_z()],
            DEFAULT_GRAM_TOLERANCE,
        )
        .unwrap();
        assert_eq!(r.rank, 4);
        // Pauli basis is orthogonal with norm² = 2
        for e in &r.eigenvalues {
            assert!((e - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn errors() {
        let empty: Vec<ComplexOperator> = vec![];
        assert!(gram_rank(&empty, 1e-9).is_err());
        assert!(gram_rank(&[identity(), ComplexOperator::identity(3)], 1e-9).is_err());
        assert!(gram_rank(&[identity()], 0.0).is_err());
        assert!(gram_rank(&[identity()], 1.0).is_err());
    }

    #[test]
    fn dependent_combination() {
        let combo = &sigma_x().scale_real(2.0) + &sigma_z().scale_real(-3.0);
        let r = gram_rank(&[sigma_x(), sigma_z(), combo], 1e-9).unwrap();
        assert_eq!(r.rank, 2);
        assert_eq!(r.singular_values().len(), 3);
    }
}
