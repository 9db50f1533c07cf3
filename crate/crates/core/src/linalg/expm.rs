//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13 (Higham 2005).

use nalgebra::DMatrix;

use super::{ComplexOperator, C64};
use crate::error::{Error, Result};

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// `exp(A)` for a square, finite operator.
pub fn matrix_exponential(a: &ComplexOperator) -> Result<ComplexOperator> {
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix_exponential input"));
    }
    Ok(ComplexOperator::from_matrix_unchecked(expm_matrix(a.matrix())))
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub(crate) fn expm_matrix(a: &DMatrix<C64>) -> DMatrix<C64> {
    let n = a.nrows();
    let norm = a
        .column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    if norm == 0.0 {
        return DMatrix::identity(n, n);
    }
    let ident = DMatrix::<C64>::identity(n, n);
    let a2 = a * a;

    let low = |b: &[f64]| -> (DMatrix<C64>, DMatrix<C64>) {
        // odd coefficients build U, even build V
        let mut power = ident.clone();
        let mut u = &ident * c(b[1]);
        let mut v = &ident * c(b[0]);
        for k in 1..b.len() / 2 {
            power = &power * &a2;
            u += &power * c(b[2 * k + 1]);
            v += &power * c(b[2 * k]);
        }
        (a * u, v)
    };

    let (u, v, squarings) = if norm <= THETA_3 {
        let (u, v) = low(&B3);
        (u, v, 0)
    } else if norm <= THETA_5 {
        let (u, v) = low(&B5);
        (u, v, 0)
    } else if norm <= THETA_7 {
        let (u, v) = low(&B7);
        (u, v, 0)
    } else if norm <= THETA_9 {
        let (u, v) = low(&B9);
        (u, v, 0)
    } else {
        let s = (norm / THETA_13).log2().ceil().max(0.0) as i32;
        let scale = c(2f64.powi(-s));
        let a1 = a * scale;
        let a2 = &a1 * &a1;
        let a4 = &a2 * &a2;
        let a6 = &a4 * &a2;
        let b = &B13;
        let inner_u = &a6 * c(b[13]) + &a4 * c(b[11]) + &a2 * c(b[9]);
        let u = &a1
            * (&a6 * inner_u
                + &a6 * c(b[7])
                + &a4 * c(b[5])
                + &a2 * c(b[3])
                + &ident * c(b[1]));
        let inner_v = &a6 * c(b[12]) + &a4 * c(b[10]) + &a2 * c(b[8]);
        let v = &a6 * inner_v + &a6 * c(b[6]) + &a4 * c(b[4]) + &a2 * c(b[2]) + &ident * c(b[0]);
        (u, v, s)
    };

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular within the θ_m bounds");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}
