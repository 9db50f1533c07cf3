use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tdcontrol::control::{generate_sequence, pulse_fractions, toggling_frame, SequenceKind};
use tdcontrol::dyson::{truncated_error_propagator, DysonExpansion};
use tdcontrol::lab::{
    commutant_distance, error_propagator, propagate, PropagationSettings,
};
use tdcontrol::linalg::pauli::{identity, pauli_word, rotation, sigma_x, sigma_y, sigma_z};
use tdcontrol::linalg::{
    commutator_norm, gram_rank, matrix_exponential, tensor_product, DEFAULT_GRAM_TOLERANCE,
};
use tdcontrol::models::{
    absorb_drift, evaluate_hamiltonian, random_hermitian, random_static_model,
    random_time_dependent_model,
};
use tdcontrol::witness::witness_bath;
use tdcontrol::{ComplexOperator, C64};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn dephasing() -> Vec<ComplexOperator> {
    vec![identity(), sigma_z()]
}

fn random_op(seed: u64, dim: usize) -> ComplexOperator {
    let mut r = rng(seed);
    let a = random_hermitian(&mut r, dim, 1.0).into_operator();
    let b = random_hermitian(&mut r, dim, 1.0).into_operator();
    &a + &b.scale(C64::new(0.0, 1.0))
}

fn gaussian_integer(seed: u64, dim: usize) -> ComplexOperator {
    let mut x = seed;
    let mut next = || {
        x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((x >> 33) % 9) as f64 - 4.0
    };
    let rows: Vec<Vec<C64>> = (0..dim)
        .map(|_| (0..dim).map(|_| C64::new(next(), next())).collect())
        .collect();
    ComplexOperator::from_rows(&rows).unwrap_or_else(|_| ComplexOperator::identity(dim))
}

fn random_unitary(seed: u64, dim: usize) -> ComplexOperator {
    let h = random_hermitian(&mut rng(seed), dim, 2.0).into_operator();
    matrix_exponential(&h.scale(C64::new(0.0, -1.0))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exponential_inverse(seed in any::<u64>(), dim in 1usize..7, norm in 0.0f64..10.0) {
        let h = random_hermitian(&mut rng(seed), dim, norm).into_operator();
        let a = h.scale(C64::new(0.0, 1.0));
        let prod = &matrix_exponential(&a).unwrap() * &matrix_exponential(&a.scale_real(-1.0)).unwrap();
        prop_assert!(prod.frobenius_distance(&ComplexOperator::identity(dim)) < 1e-12);
    }

    #[test]
    fn gram_rank_invariances(seed in any::<u64>(), count in 1usize..7, shuffle in any::<u64>(), s in 0.01f64..100.0) {
        let mut ops: Vec<ComplexOperator> = (0..count).map(|k| random_op(seed.wrapping_add(k as u64), 2)).collect();
        // a dependent member keeps the rank below the count
        ops.push(&ops[0] + &ops[count - 1].scale_real(2.0));
        let base = gram_rank(&ops, DEFAULT_GRAM_TOLERANCE).unwrap().rank;
        let mut permuted = ops.clone();
        let n = permuted.len();
        for i in (1..n).rev() {
            let j = (shuffle.rotate_left(i as u32) % (i as u64 + 1)) as usize;
            permuted.swap(i, j);
        }
        prop_assert_eq!(gram_rank(&permuted, DEFAULT_GRAM_TOLERANCE).unwrap().rank, base);
        let mut scaled = ops.clone();
        let k = (shuffle % n as u64) as usize;
        scaled[k] = scaled[k].scale(C64::new(0.0, s));
        prop_assert_eq!(gram_rank(&scaled, DEFAULT_GRAM_TOLERANCE).unwrap().rank, base);
    }

    #[test]
    fn tensor_rules(seed in any::<u64>()) {
        let a = random_op(seed, 2);
        let b = random_op(seed ^ 1, 3);
        let c = random_op(seed ^ 2, 2);
        let d = random_op(seed ^ 3, 3);
        let left = tensor_product(&tensor_product(&a, &b), &c);
        let right = tensor_product(&a, &tensor_product(&b, &c));
        prop_assert!(left.max_abs_diff(&right) <= 1e-15 * left.max_abs_diff(&ComplexOperator::zeros(12)).max(1.0));
        // exact once every product is representable
        let (ia, ib, ic) = (gaussian_integer(seed, 2), gaussian_integer(seed ^ 9, 3), gaussian_integer(seed ^ 11, 2));
        prop_assert_eq!(
            tensor_product(&tensor_product(&ia, &ib), &ic),
            tensor_product(&ia, &tensor_product(&ib, &ic))
        );
        let mixed = &tensor_product(&a, &b) * &tensor_product(&c, &d);
        let expected = tensor_product(&(&a * &c), &(&b * &d));
        prop_assert!(mixed.max_abs_diff(&expected) < 1e-13);
    }

    #[test]
    fn commutator_norm_adjoint(seed in any::<u64>(), dim in 1usize..6) {
        let u = random_op(seed, dim);
        let s = random_op(seed ^ 7, dim);
        let a = commutator_norm(&u, &s).unwrap();
        let b = commutator_norm(&u.adjoint(), &s.adjoint()).unwrap();
        prop_assert!((a - b).abs() <= 1e-13 * a.max(1.0));
    }

    #[test]
    fn absorbed_drift_hamiltonian(seed in any::<u64>(), c in prop::collection::vec(-1.0f64..1.0, 1..4), ts in prop::collection::vec(0.0f64..1.0, 20)) {
        let model = random_time_dependent_model(2, 3, &dephasing(), 2, 1.0, seed).unwrap();
        let drift: Vec<ComplexOperator> = c.iter().map(|&x| &sigma_z().scale_real(x) + &identity().scale_real(0.5 * x)).collect();
        let absorbed = absorb_drift(&model, &drift).unwrap();
        let ident_b = ComplexOperator::identity(3);
        for &t in &ts {
            let mut hs = ComplexOperator::zeros(2);
            let mut fact = 1.0;
            for (p, h) in drift.iter().enumerate() {
                if p > 0 {
                    fact *= p as f64;
                }
                hs += &h.scale_real(t.powi(p as i32) / fact);
            }
            let expected = &hs.kron(&ident_b) + evaluate_hamiltonian(&model, t).as_operator();
            prop_assert!(evaluate_hamiltonian(&absorbed, t).max_abs_diff(&expected) <= 1e-13);
        }
    }

    #[test]
    fn random_models(seed in any::<u64>(), bound in 0.1f64..3.0) {
        let a = random_static_model(2, 3, &dephasing(), bound, seed).unwrap();
        prop_assert_eq!(&a, &random_static_model(2, 3, &dephasing(), bound, seed).unwrap());
        let b = random_static_model(2, 3, &dephasing(), bound, seed.wrapping_add(1)).unwrap();
        prop_assert!(a.hamiltonian().frobenius_distance(&b.hamiltonian()) > 0.0);
        for c in a.couplings() {
            prop_assert!(c.bath.spectral_norm() <= bound + 1e-10);
        }
        let td = random_time_dependent_model(2, 3, &dephasing(), 3, bound, seed).unwrap();
        for c in td.couplings() {
            for coeff in c.bath.coefficients() {
                prop_assert!(coeff.spectral_norm() <= bound + 1e-10);
            }
        }
    }

    #[test]
    fn frames_preserve_spectra(n in 0usize..6, periodic in any::<bool>(), axis in 0usize..3, angle in 0.1f64..3.0) {
        let kind = if n == 0 { SequenceKind::Free } else if periodic { SequenceKind::Periodic } else { SequenceKind::Udd };
        let pulse = rotation(['X', 'Y', 'Z'][axis], angle).unwrap();
        let seq = generate_sequence(kind, n, &pulse).unwrap();
        let ops = vec![identity(), sigma_x(), sigma_y(), sigma_z()];
        let frame = toggling_frame(&seq, &ops).unwrap();
        prop_assert_eq!(&frame.segment_at(0.0).ops, &ops);
        for seg in frame.segments() {
            for (s_hat, s) in seg.ops.iter().zip(&ops) {
                let a = s_hat.hermitian_eigenvalues();
                let b = s.hermitian_eigenvalues();
                for (x, y) in a.iter().zip(&b) {
                    prop_assert!((x - y).abs() < 1e-12);
                }
            }
        }
        prop_assert!(seq.pulse_product().distance_up_to_phase(seq.target()) < 1e-12);
    }

    #[test]
    fn udd_symmetry(n in 1usize..40) {
        let th = pulse_fractions(SequenceKind::Udd, n);
        for j in 0..n {
            prop_assert!((th[j] + th[n - 1 - j] - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn constant_series_expansion_matches_static(seed in 0u64..1000, order in 1usize..4, t in 0.01f64..0.6) {
        let m = random_static_model(2, 2, &[identity(), sigma_x(), sigma_z()], 1.0, seed).unwrap();
        let seq = generate_sequence(SequenceKind::Udd, 2, &sigma_x()).unwrap();
        let frame = toggling_frame(&seq, &m.system_ops()).unwrap();
        let a = truncated_error_propagator(&m, &frame, order, t).unwrap();
        let b = truncated_error_propagator(&m.to_time_dependent(), &frame, order, t).unwrap();
        prop_assert!(a.max_abs_diff(&b) <= 1e-13);

        let first = DysonExpansion::new(&m, &frame, 1).unwrap().order_term(1, t);
        prop_assert!(first.scale(C64::new(0.0, 1.0)).hermitian_defect() < 1e-12);
    }

    #[test]
    fn commutant_distance_ignores_bath_frame(seed in any::<u64>()) {
        let ue = random_unitary(seed, 6);
        let w = random_unitary(seed ^ 5, 3);
        let omega = tdcontrol::control::ProtectedSet::full_algebra(2);
        let a = commutant_distance(&ue, &omega).unwrap();
        let b = commutant_distance(&(&identity().kron(&w) * &ue), &omega).unwrap();
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn constant_series_distances_match(seed in 0u64..1000, n in 1usize..4, t in 0.05f64..0.5) {
        let m = random_static_model(2, 3, &dephasing(), 1.0, seed).unwrap();
        let seq = generate_sequence(SequenceKind::Udd, n, &sigma_x()).unwrap();
        let s = PropagationSettings::default();
        let da = {
            let u = propagate(&m, &seq, t, &s).unwrap().unitary;
            commutant_distance(&error_propagator(&u, seq.target()).unwrap(), seq.omega()).unwrap()
        };
        let td = m.to_time_dependent();
        let db = {
            let u = propagate(&td, &seq, t, &s).unwrap().unitary;
            commutant_distance(&error_propagator(&u, seq.target()).unwrap(), seq.omega()).unwrap()
        };
        prop_assert!((da - db).abs() <= 1e-12);
    }

    #[test]
    fn pauli_words_are_unitary_and_hermitian(word in "[IXYZ]{1,4}") {
        let p = pauli_word(&word).unwrap();
        prop_assert!(p.unitarity_defect() < 1e-15);
        prop_assert!(p.is_hermitian(0.0));
    }
}

#[test]
fn witness_operators_have_unit_entries() {
    for (n, d) in [(2, 2), (3, 2), (2, 3)] {
        let wb = witness_bath(n, d).unwrap();
        for b in wb.bath_ops() {
            for (_, _, v) in b.triplets() {
                assert_eq!(v.im, 0.0);
                assert!(v.re == 1.0 || v.re == -1.0 || v.re == 2.0, "{v}");
            }
        }
    }
}
