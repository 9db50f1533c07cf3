//! Dense and sparse operator basics: exponentials, commutator norms,
//! Gram ranks and Kronecker products.

use tdcontrol::linalg::pauli::{pauli_word, sigma_x, sigma_z};
use tdcontrol::linalg::{commutator_norm, gram_rank, matrix_exponential, DEFAULT_GRAM_TOLERANCE};
use tdcontrol::{SparseOperator, C64};

fn main() -> tdcontrol::Result<()> {
    let u = matrix_exponential(&sigma_x().scale(C64::new(0.0, -std::f64::consts::FRAC_PI_2)))?;
    println!("exp(-iπ/2 X) = -iX: deviation {:.1e}", u.max_abs_diff(&sigma_x().scale(C64::new(0.0, -1.0))));
    println!("‖[X, Z]‖_F = {:.6}", commutator_norm(&sigma_x(), &sigma_z())?);

    let words = ["II", "XZ", "ZX", "YY", "XX"];
    let ops = words.iter().map(|w| pauli_word(w)).collect::<tdcontrol::Result<Vec<_>>>()?;
    let mut with_dependent = ops.clone();
    with_dependent.push(&ops[1] + &ops[3].scale_real(2.0));
    println!("rank of {words:?} = {}", gram_rank(&ops, DEFAULT_GRAM_TOLERANCE)?.rank);
    println!("adding XZ + 2 YY: rank {}", gram_rank(&with_dependent, DEFAULT_GRAM_TOLERANCE)?.rank);

    let shift = SparseOperator::from_triplets(4, (0..4).map(|r| (r, (r + 1) % 4, C64::new(1.0, 0.0))))?;
    let big = shift.kron(&SparseOperator::identity(64));
    println!("shift ⊗ I_64: dim {}, {} nonzeros, density {:.4}", big.dim(), big.nnz(), big.density());
    Ok(())
}
