//! Compressed-sparse-row complex operators.

use nalgebra::DMatrix;

use super::gram::HilbertSchmidt;
use super::{ComplexOperator, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Products fall back to dense arithmetic when both operands are filled
/// beyond this fraction of `dim²`.
const DENSE_FILL: f64 = 0.25;

/// Square sparse operator in CSR layout. Column indices are sorted within
/// each row and unique; explicit zeros are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl SparseOperator {
    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        if dim == 0 {
            return Err(Error::arg("sparse operator dimension must be positive"));
        }
        let mut t: Vec<(usize, usize, C64)> = triplets.into_iter().collect();
        for &(r, c, v) in &t {
            if r >= dim || c >= dim {
                return Err(Error::arg(format!(
                    "sparse index ({r},{c}) out of range for dim {dim}"
                )));
            }
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite("sparse operator"));
            }
        }
        t.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut col_idx = Vec::with_capacity(t.len());
        let mut values: Vec<C64> = Vec::with_capacity(t.len());
        let mut rows = Vec::with_capacity(t.len());
        for (r, c, v) in t {
            if let (Some(&lr), Some(&lc)) = (rows.last(), col_idx.last()) {
                if lr == r && lc == c {
                    *values.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(r);
            col_idx.push(c);
            values.push(v);
        }
        let mut out_cols = Vec::with_capacity(col_idx.len());
        let mut out_vals = Vec::with_capacity(values.len());
        for ((r, c), v) in rows.into_iter().zip(col_idx).zip(values) {
            if v != ZERO {
                row_ptr[r + 1] += 1;
                out_cols.push(c);
                out_vals.push(v);
            }
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self {
            dim,
            row_ptr,
            col_idx: out_cols,
            values: out_vals,
        })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: vec![0; dim + 1],
            col_idx: vec![],
            values: vec![],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: (0..=dim).collect(),
            col_idx: (0..dim).collect(),
            values: vec![ONE; dim],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn density(&self) -> f64 {
        self.nnz() as f64 / (self.dim as f64 * self.dim as f64)
    }

    /// Column indices and values stored in `row`.
    pub fn row(&self, row: usize) -> (&[usize], &[C64]) {
        let (a, b) = (self.row_ptr[row], self.row_ptr[row + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let (cols, vals) = self.row(row);
        match cols.binary_search(&col) {
            Ok(i) => vals[i],
            Err(_) => ZERO,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(r, c, v)| (c, r, v.conj())))
            .expect("adjoint of a valid operator is valid")
    }

    pub fn scale(&self, s: C64) -> Self {
        if s == ZERO {
            return Self::zeros(self.dim);
        }
        Self {
            values: self.values.iter().map(|v| v * s).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Self::from_triplets(self.dim, self.triplets().chain(other.triplets()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Self::from_triplets(
            self.dim,
            self.triplets().chain(other.triplets().map(|(r, c, v)| (r, c, -v))),
        )
    }

    /// Row-by-row (Gustavson) product, with a dense fallback for heavily
    /// filled operands.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        if self.density() > DENSE_FILL && other.density() > DENSE_FILL {
            let prod = self.to_dense().matrix() * other.to_dense().matrix();
            return Ok(Self::from_dense(&ComplexOperator::from_matrix_unchecked(prod)));
        }
        let n = self.dim;
        let mut acc = vec![ZERO; n];
        let mut touched_flag = vec![false; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for r in 0..n {
            let (a_cols, a_vals) = self.row(r);
            for (&k, &a) in a_cols.iter().zip(a_vals) {
                let (b_cols, b_vals) = other.row(k);
                for (&c, &b) in b_cols.iter().zip(b_vals) {
                    if !touched_flag[c] {
                        touched_flag[c] = true;
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                let v = acc[c];
                if v != ZERO {
                    col_idx.push(c);
                    values.push(v);
                }
                acc[c] = ZERO;
                touched_flag[c] = false;
            }
            touched.clear();
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            dim: n,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let d = other.dim;
        let triplets = self.triplets().flat_map(|(r, c, a)| {
            other
                .triplets()
                .map(move |(rr, cc, b)| (r * d + rr, c * d + cc, a * b))
        });
        Self::from_triplets(self.dim * d, triplets).expect("kron of valid operators is valid")
    }

    pub fn to_dense(&self) -> ComplexOperator {
        let mut m = DMatrix::<C64>::zeros(self.dim, self.dim);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        ComplexOperator::from_matrix_unchecked(m)
    }

    /// Keeps every nonzero entry of a dense operator.
    pub fn from_dense(op: &ComplexOperator) -> Self {
        let n = op.dim();
        let triplets = (0..n).flat_map(|r| (0..n).map(move |c| (r, c, op.get(r, c))));
        Self::from_triplets(n, triplets).expect("dense operators are finite")
    }

    /// Extracts the `block_dim × block_dim` block at block coordinates
    /// `(block_row, block_col)`.
    pub fn block(&self, block_dim: usize, block_row: usize, block_col: usize) -> Result<Self> {
        if block_dim == 0 || self.dim % block_dim != 0 {
            return Err(Error::dims(format!(
                "block size {block_dim} does not divide {}",
                self.dim
            )));
        }
        let r0 = block_row * block_dim;
        let c0 = block_col * block_dim;
        let triplets = (r0..r0 + block_dim).flat_map(|r| {
            let (cols, vals) = self.row(r);
            cols.iter()
                .zip(vals)
                .filter(move |(&c, _)| c >= c0 && c < c0 + block_dim)
                .map(move |(&c, &v)| (r - r0, c - c0, v))
        });
        Self::from_triplets(block_dim, triplets)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc + v.norm_sqr()).sqrt()
    }

    pub fn frobenius_distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.frobenius_norm())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let diff = self
            .sub(&self.adjoint())
            .map(|d| d.frobenius_norm())
            .unwrap_or(f64::INFINITY);
        diff <= tol * self.frobenius_norm().max(1e-300)
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::dims(format!("sparse: {} vs {}", self.dim, other.dim)));
        }
        Ok(())
    }
}

impl HilbertSchmidt for SparseOperator {
    fn hs_dim(&self) -> usize {
        self.dim
    }

    fn hs_inner(&self, other: &Self) -> C64 {
        let mut acc = ZERO;
        for r in 0..self.dim {
            let (ac, av) = self.row(r);
            let (bc, bv) = other.row(r);
            let (mut i, mut j) = (0, 0);
            while i < ac.len() && j < bc.len() {
                match ac[i].cmp(&bc[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        acc += av[i].conj() * bv[j];
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn canonicalization() {
        let s = SparseOperator::from_triplets(
            3,
            vec![(0, 1, c(1.0)), (0, 1, c(2.0)), (2, 0, c(1.0)), (2, 0, c(-1.0))],
        )
        .unwrap();
        assert_eq!(s.nnz(), 1);
        assert_eq!(s.get(0, 1), c(3.0));
        assert!(SparseOperator::from_triplets(2, vec![(2, 0, c(1.0))]).is_err());
    }

    #[test]
    fn products_match_dense() {
        let x = SparseOperator::from_dense(&sigma_x());
        let y = SparseOperator::from_dense(&sigma_y());
        let xy = x.matmul(&y).unwrap();
        assert_eq!(xy.to_dense(), &sigma_x() * &sigma_y());
        let comm = x.commutator(&y).unwrap();
        assert_eq!(comm.to_dense(), sigma_x().commutator(&sigma_y()));
        let k = x.kron(&y);
        assert_eq!(k.to_dense(), sigma_x().kron(&sigma_y()));
    }

    #[test]
    fn sparse_path_matches_dense_on_shift() {
        // cyclic shift on 10 sites: density 0.1, takes the Gustavson path
        let n = 10;
        let shift =
            SparseOperator::from_triplets(n, (0..n).map(|l| (l, (l + 1) % n, c(1.0)))).unwrap();
        let sq = shift.matmul(&shift).unwrap();
        let dense = shift.to_dense();
        assert_eq!(sq.to_dense(), &dense * &dense);
        assert_eq!(sq.nnz(), n);
    }

    #[test]
    fn hs_inner_matches_dense() {
        let a = SparseOperator::from_dense(&(&sigma_x() + &sigma_z().scale(C64::new(0.0, 2.0))));
        let b = SparseOperator::from_dense(&sigma_z());
        let dense = a.to_dense().hs_inner(&b.to_dense());
        assert_eq!(a.hs_inner(&b), dense);
    }

    #[test]
    fn block_extraction() {
        let op = SparseOperator::from_dense(&sigma_x().kron(&sigma_z()));
        let b01 = op.block(2, 0, 1).unwrap();
        assert_eq!(b01.to_dense(), sigma_z());
        assert!(op.block(3, 0, 0).is_err());
    }
}
