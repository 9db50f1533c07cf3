//! Single-qubit Pauli operators and multi-qubit Pauli words.

use super::{ComplexOperator, C64, I, ONE, ZERO};
use crate::error::{Error, Result};

pub fn identity() -> ComplexOperator {
    ComplexOperator::identity(2)
}

pub fn sigma_x() -> ComplexOperator {
    ComplexOperator::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap()
}

pub fn sigma_y() -> ComplexOperator {
    ComplexOperator::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).unwrap()
}

pub fn sigma_z() -> ComplexOperator {
    ComplexOperator::from_rows(&[vec![ONE, ZERO], vec![ZERO, -ONE]]).unwrap()
}

fn letter(c: char) -> Option<ComplexOperator> {
    match c {
        'I' => Some(identity()),
        'X' => Some(sigma_x()),
        'Y' => Some(sigma_y()),
        'Z' => Some(sigma_z()),
        _ => None,
    }
}

/// Tensor word such as `"XZ"` = σ_x ⊗ σ_z, leftmost letter is the most
/// significant factor.
pub fn pauli_word(word: &str) -> Result<ComplexOperator> {
    let mut chars = word.chars();
    let first = chars
        .next()
        .ok_or_else(|| Error::arg("empty Pauli word"))?;
    let mut acc = letter(first).ok_or_else(|| Error::arg(format!("unknown Pauli letter in `{word}`")))?;
    for c in chars {
        let f = letter(c).ok_or_else(|| Error::arg(format!("unknown Pauli letter in `{word}`")))?;
        acc = acc.kron(&f);
    }
    Ok(acc)
}

/// Rotation `exp(-i θ/2 σ)` about a Pauli axis.
pub fn rotation(axis: char, angle: f64) -> Result<ComplexOperator> {
    let s = letter(axis).ok_or_else(|| Error::arg(format!("unknown axis `{axis}`")))?;
    let c = C64::new((angle / 2.0).cos(), 0.0);
    let sn = C64::new(0.0, -(angle / 2.0).sin());
    Ok(&identity().scale(c) + &s.scale(sn))
}
