use super::MultiIndex;
use crate::control::TogglingFrame;
use crate::error::{Error, Result};
use crate::linalg::ComplexOperator;

/// Operator-valued polynomial `Σ_q C_q θ^q` on one frame segment.
type SegmentPoly = Vec<ComplexOperator>;

fn horner(poly: &SegmentPoly, theta: f64) -> ComplexOperator {
    let mut acc = poly.last().unwrap().clone();
    for c in poly.iter().rev().skip(1) {
        acc = &acc.scale_real(theta) + c;
    }
    acc
}

/// Nested toggling-frame integral
///
/// ```text
/// S_n = ∫_0^1 dθ_1 Ŝ_{α_1}(θ_1) θ_1^{p_1} ∫_0^{θ_1} dθ_2 Ŝ_{α_2}(θ_2) θ_2^{p_2} ⋯ ∫_0^{θ_{n-1}} dθ_n Ŝ_{α_n}(θ_n) θ_n^{p_n}
/// ```
///
/// evaluated exactly. Working from the innermost integral outwards, each
/// level is a continuous piecewise polynomial in `θ` with operator
/// coefficients; the frame is constant on each segment, so every level
/// integrates in closed form.
pub fn system_integral(frame: &TogglingFrame, index: &MultiIndex) -> Result<ComplexOperator> {
    let segments = frame.segments();
    if let Some(&bad) = index.alphas().iter().find(|&&a| a >= frame.num_ops()) {
        return Err(Error::arg(format!(
            "coupling {bad} not present in a frame of {} operators",
            frame.num_ops()
        )));
    }
    let d = frame.d_s();

    // level n+1: the constant 1
    let mut inner: Vec<SegmentPoly> = segments
        .iter()
        .map(|_| vec![ComplexOperator::identity(d)])
        .collect();
    let mut value_at_one = ComplexOperator::identity(d);

    for (&alpha, &p) in index.alphas().iter().zip(index.ps()).rev() {
        let mut carried = ComplexOperator::zeros(d);
        let mut level = Vec::with_capacity(segments.len());
        for (seg, g) in segments.iter().zip(&inner) {
            let s_hat = &seg.ops[alpha];
            let top = g.len() + p;
            let mut coeffs = vec![ComplexOperator::zeros(d); top + 1];
            let mut constant = carried.clone();
            for (q, gq) in g.iter().enumerate() {
                let k = q + p + 1;
                let term = (s_hat * gq).scale_real(1.0 / k as f64);
                constant = &constant - &term.scale_real(seg.start.powi(k as i32));
                coeffs[k] += &term;
            }
            coeffs[0] = constant;
            carried = horner(&coeffs, seg.end);
            level.push(coeffs);
        }
        value_at_one = carried;
        inner = level;
    }
    Ok(value_at_one)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{generate_sequence, modulation_profile, toggling_frame, SequenceKind};
    use crate::linalg::pauli::*;

    fn frame(kind: SequenceKind, n: usize) -> TogglingFrame {
        let seq = generate_sequence(kind, n, &sigma_x()).unwrap();
        toggling_frame(&seq, &[identity(), sigma_z()]).unwrap()
    }

    fn idx(alphas: &[usize], ps: &[usize]) -> MultiIndex {
        MultiIndex::new(alphas.to_vec(), ps.to_vec()).unwrap()
    }

    #[test]
    fn first_order_examples() {
        let free = frame(SequenceKind::Free, 0);
        let s = system_integral(&free, &idx(&[1], &[0])).unwrap();
        assert!(s.max_abs_diff(&sigma_z()) < 1e-15);

        let hahn = frame(SequenceKind::Udd, 1);
        let s = system_integral(&hahn, &idx(&[1], &[0])).unwrap();
        assert!(s.frobenius_norm() < 1e-15);
        let s = system_integral(&hahn, &idx(&[1], &[1])).unwrap();
        assert!(s.max_abs_diff(&sigma_z().scale_real(-0.25)) < 1e-15);

        let udd2 = frame(SequenceKind::Udd, 2);
        let s = system_integral(&udd2, &idx(&[1], &[1])).unwrap();
        assert!(s.frobenius_norm() < 1e-15);
    }

    #[test]
    fn matches_scalar_shadow() {
        for n in 1..=4 {
            let f = frame(SequenceKind::Udd, n);
            let prof = modulation_profile(&f, 1, &sigma_z()).unwrap();
            for p in 0..6 {
                let s = system_integral(&f, &idx(&[1], &[p])).unwrap();
                let expected = sigma_z().scale_real(prof.moment(p as u32));
                assert!(s.max_abs_diff(&expected) < 1e-14, "n={n} p={p}");
            }
        }
    }

    /// Brute-force oracle: midpoint rule on a fine grid for a double integral
    /// of the free-evolution frame, where the answer is 1/2 · σ_z².
    #[test]
    fn second_order_free_evolution() {
        let free = frame(SequenceKind::Free, 0);
        let s = system_integral(&free, &idx(&[1, 1], &[0, 0])).unwrap();
        assert!(s.max_abs_diff(&identity().scale_real(0.5)) < 1e-15);
        // ∫_0^1 θ_1 ∫_0^{θ_1} θ_2^2 dθ_2 dθ_1 = ∫ θ^4/3 = 1/15
        let s = system_integral(&free, &idx(&[1, 1], &[1, 2])).unwrap();
        assert!(s.max_abs_diff(&identity().scale_real(1.0 / 15.0)) < 1e-15);
    }

    #[test]
    fn hahn_double_integral_against_grid() {
        // nested integral over θ_1 > θ_2 of F(θ_1) θ_1 F(θ_2); grid oracle
        let hahn = frame(SequenceKind::Udd, 1);
        let s = system_integral(&hahn, &idx(&[1, 1], &[1, 0])).unwrap();
        let f = |t: f64| if t < 0.5 { 1.0 } else { -1.0 };
        let m = 4000;
        let h = 1.0 / m as f64;
        let mut total = 0.0;
        let mut inner = 0.0;
        for i in 0..m {
            let t = (i as f64 + 0.5) * h;
            // inner integral up to t (exact for piecewise constant F)
            let inner_at_t = inner + f(t) * 0.5 * h;
            total += f(t) * t * inner_at_t * h;
            inner += f(t) * h;
        }
        assert!(s.max_abs_diff(&identity().scale_real(total)) < 1e-6);
    }

    #[test]
    fn rejects_unknown_coupling() {
        let free = frame(SequenceKind::Free, 0);
        assert!(system_integral(&free, &idx(&[2], &[0])).is_err());
    }
}
