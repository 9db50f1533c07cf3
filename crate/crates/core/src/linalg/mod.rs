//! Finite-dimensional complex operator arithmetic.
//!
//! [`ComplexOperator`] is the dense currency of the crate (system, bath and
//! joint propagators). [`SparseOperator`] carries the large, integer-valued
//! witness constructions. Both implement [`HilbertSchmidt`] so that
//! [`gram_rank`] can certify linear independence of either kind.

mod expm;
mod gram;
pub mod pauli;
mod sparse;

use std::ops::{Add, AddAssign, Deref, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
pub use num_complex::Complex64 as C64;

pub use expm::matrix_exponential;
pub use gram::{gram_matrix, gram_rank, GramRank, HilbertSchmidt, DEFAULT_GRAM_TOLERANCE};
pub use sparse::SparseOperator;

use crate::error::{Error, Result};

/// Relative Frobenius tolerance for the Hermiticity check.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// A square complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexOperator {
    m: DMatrix<C64>,
}

impl ComplexOperator {
    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::arg("operator dimension must be positive"));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("operator"));
        }
        Ok(Self { m })
    }

    /// Wraps a matrix that is square and finite by construction.
    pub(crate) fn from_matrix_unchecked(m: DMatrix<C64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Self { m }
    }

    /// Builds an operator from row-major rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        Self::from_matrix(DMatrix::from_fn(n, n, |r, c| rows[r][c]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_matrix_unchecked(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_matrix_unchecked(DMatrix::identity(dim, dim))
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let n = entries.len();
        Self::from_matrix_unchecked(DMatrix::from_fn(n, n, |r, c| {
            if r == c {
                entries[r]
            } else {
                ZERO
            }
        }))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    #[inline]
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.m
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.m[(row, col)]
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_matrix_unchecked(self.m.adjoint())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_matrix_unchecked(&self.m * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other, "product")?;
        Ok(self * other)
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        self.m
            .column_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        self.m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖A - A†‖_F / max(‖A‖_F, 1e-300)`.
    pub fn hermitian_defect(&self) -> f64 {
        let diff = self.frobenius_distance(&self.adjoint());
        diff / self.frobenius_norm().max(1e-300)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// `‖U†U - I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        (&self.adjoint() * self).frobenius_distance(&Self::identity(self.dim()))
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::from_matrix_unchecked(self.m.kronecker(&other.m))
    }

    /// Unit phase `e^{iφ}` with `self ≈ e^{iφ} other`, read off the
    /// largest-magnitude entry of `other`.
    pub fn phase_relative_to(&self, other: &Self) -> C64 {
        let (idx, _) = other
            .m
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, z)| {
                if z.norm() > best.1 {
                    (i, z.norm())
                } else {
                    best
                }
            });
        let ratio = self.m.as_slice()[idx] / other.m.as_slice()[idx];
        if ratio.norm() == 0.0 || !ratio.re.is_finite() {
            ONE
        } else {
            ratio / ratio.norm()
        }
    }

    /// Max entrywise deviation after aligning the global phase of `other` to `self`.
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        let phase = self.phase_relative_to(other);
        self.max_abs_diff(&other.scale(phase))
    }

    /// Eigenvalues (ascending) of the Hermitian part of the operator.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = (&self.m + self.m.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    fn same_dim(&self, other: &Self, what: &str) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::dims(format!(
                "{what}: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }
}

impl<'a> Mul<&'a ComplexOperator> for &'a ComplexOperator {
    type Output = ComplexOperator;
    fn mul(self, rhs: &'a ComplexOperator) -> ComplexOperator {
        ComplexOperator::from_matrix_unchecked(&self.m * &rhs.m)
    }
}

impl<'a> Add<&'a ComplexOperator> for &'a ComplexOperator {
    type Output = ComplexOperator;
    fn add(self, rhs: &'a ComplexOperator) -> ComplexOperator {
        ComplexOperator::from_matrix_unchecked(&self.m + &rhs.m)
    }
}

impl<'a> Sub<&'a ComplexOperator> for &'a ComplexOperator {
    type Output = ComplexOperator;
    fn sub(self, rhs: &'a ComplexOperator) -> ComplexOperator {
        ComplexOperator::from_matrix_unchecked(&self.m - &rhs.m)
    }
}

impl Neg for &ComplexOperator {
    type Output = ComplexOperator;
    fn neg(self) -> ComplexOperator {
        ComplexOperator::from_matrix_unchecked(-&self.m)
    }
}

impl AddAssign<&ComplexOperator> for ComplexOperator {
    fn add_assign(&mut self, rhs: &ComplexOperator) {
        self.m += &rhs.m;
    }
}

/// A [`ComplexOperator`] checked to equal its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(ComplexOperator);

impl HermitianOperator {
    pub fn new(op: ComplexOperator) -> Result<Self> {
        let defect = op.hermitian_defect();
        if defect > HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self(op))
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexOperator::identity(dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(ComplexOperator::zeros(dim))
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> f64 {
        self.0
            .hermitian_eigenvalues()
            .iter()
            .fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn as_operator(&self) -> &ComplexOperator {
        &self.0
    }

    pub fn into_operator(self) -> ComplexOperator {
        self.0
    }
}

impl Deref for HermitianOperator {
    type Target = ComplexOperator;
    fn deref(&self) -> &ComplexOperator {
        &self.0
    }
}

impl TryFrom<ComplexOperator> for HermitianOperator {
    type Error = Error;
    fn try_from(op: ComplexOperator) -> Result<Self> {
        Self::new(op)
    }
}

/// `‖US - SU‖_F`.
pub fn commutator_norm(u: &ComplexOperator, s: &ComplexOperator) -> Result<f64> {
    u.same_dim(s, "commutator_norm")?;
    Ok(u.commutator(s).frobenius_norm())
}

/// Kronecker product, `A[i,j]·B` blocks.
pub fn tensor_product(a: &ComplexOperator, b: &ComplexOperator) -> ComplexOperator {
    a.kron(b)
}

#[cfg(test)]
mod tests {
    use super::pauli::*;
    use super::*;

    #[test]
    fn commutator_norm_examples() {
        assert_eq!(commutator_norm(&identity(), &sigma_z()).unwrap(), 0.0);
        assert_eq!(commutator_norm(&sigma_z(), &sigma_z()).unwrap(), 0.0);
        let v = commutator_norm(&sigma_x(), &sigma_z()).unwrap();
        assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert!(commutator_norm(&sigma_x(), &ComplexOperator::identity(3)).is_err());
    }

    #[test]
    fn tensor_product_examples() {
        let i2 = identity();
        assert_eq!(tensor_product(&i2, &i2), ComplexOperator::identity(4));
        let zi = tensor_product(&sigma_z(), &i2);
        let expected = ComplexOperator::diagonal(&[ONE, ONE, -ONE, -ONE]);
        assert_eq!(zi, expected);
        let xx = tensor_product(&sigma_x(), &sigma_x());
        assert_eq!(&xx * &xx, ComplexOperator::identity(4));
    }

    #[test]
    fn construction_rejects_bad_input() {
        let rect = DMatrix::<C64>::zeros(2, 3);
        assert!(matches!(
            ComplexOperator::from_matrix(rect),
            Err(Error::NotSquare { .. })
        ));
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(0, 1)] = C64::new(f64::NAN, 0.0);
        assert!(matches!(
            ComplexOperator::from_matrix(m),
            Err(Error::NonFinite(_))
        ));
        assert!(HermitianOperator::new(&sigma_x() * &sigma_y()).is_err());
        assert!(HermitianOperator::new(sigma_y()).is_ok());
    }

    #[test]
    fn phase_alignment() {
        let x = sigma_x();
        let minus_ix = x.scale(-I);
        assert!(minus_ix.distance_up_to_phase(&x) < 1e-15);
        assert!(sigma_z().distance_up_to_phase(&x) > 0.5);
    }
}
