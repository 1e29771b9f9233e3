mod common;

use common::{random_density, random_hermitian, random_matrix, rng};
use proptest::prelude::*;
use xtalk_core::qcore::{expm_hermitian, kron, partial_trace_keep_last, ComplexMatrix, DensityMatrix};
use xtalk_core::scalar::cplx;

#[test]
fn kron_matches_index_formula() {
    let mut r = rng(1);
    for _ in 0..20 {
        let a = random_matrix(&mut r, 2, 2);
        let b = random_matrix(&mut r, 2, 2);
        let c = kron(&a, &b);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        assert_eq!(c[(i * 2 + k, j * 2 + l)], a[(i, j)] * b[(k, l)]);
                    }
                }
            }
        }
    }
}

#[test]
fn kron_is_associative() {
    let mut r = rng(2);
    for _ in 0..20 {
        let (a, b, c) = (random_matrix(&mut r, 2, 2), random_matrix(&mut r, 2, 3), random_matrix(&mut r, 3, 2));
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        assert!(left.approx_eq(&right, 1e-14));
    }
}

#[test]
fn partial_trace_of_product_state() {
    let mut r = rng(3);
    for _ in 0..20 {
        let aux = random_density(&mut r, 4);
        let v = random_density(&mut r, 2);
        let joint = DensityMatrix::new(kron(aux.matrix(), v.matrix())).unwrap();
        let red = partial_trace_keep_last(&joint).unwrap();
        assert!(red.matrix().approx_eq(v.matrix(), 1e-14));
        assert!((red.matrix().trace().re - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn partial_trace_is_linear() {
    let mut r = rng(4);
    for _ in 0..20 {
        let (p, q) = (random_density(&mut r, 8), random_density(&mut r, 8));
        let alpha = 0.3;
        let mix = DensityMatrix::new(&p.matrix().scale_real(alpha) + &q.matrix().scale_real(1.0 - alpha)).unwrap();
        let lhs = partial_trace_keep_last(&mix).unwrap();
        let rhs = &partial_trace_keep_last(&p).unwrap().matrix().scale_real(alpha)
            + &partial_trace_keep_last(&q).unwrap().matrix().scale_real(1.0 - alpha);
        assert!(lhs.matrix().approx_eq(&rhs, 1e-12));
    }
}

#[test]
fn expm_agrees_with_taylor_series() {
    let mut r = rng(5);
    for _ in 0..10 {
        let h = random_hermitian(&mut r, 8);
        let tau = 0.1;
        let u = expm_hermitian(&h, tau).unwrap();
        // Σ_k (−iτH)^k / k!
        let a = h.scale(cplx(0.0, -tau));
        let mut term = ComplexMatrix::identity(8);
        let mut sum = ComplexMatrix::identity(8);
        for k in 1..30 {
            term = term.matmul(&a).scale_real(1.0 / k as f64);
            sum = &sum + &term;
        }
        assert!(u.approx_eq(&sum, 1e-10));
    }
}

#[test]
fn expm_is_unitary_on_100_random_inputs() {
    let mut r = rng(6);
    for _ in 0..100 {
        let h = random_hermitian(&mut r, 8).scale_real(3.0);
        assert!(expm_hermitian(&h, 1.7).unwrap().unitarity_error() <= 1e-12);
    }
}

#[test]
fn density_validation() {
    let bad_trace = ComplexMatrix::<f64>::identity(2);
    assert!(DensityMatrix::new(bad_trace).is_err());
    let not_psd = ComplexMatrix::<f64>::from_real_rows(&[&[1.5, 0.0], &[0.0, -0.5]]);
    assert!(DensityMatrix::new(not_psd).is_err());
    assert!(DensityMatrix::<f64>::new(ComplexMatrix::identity(3).scale_real(1.0 / 3.0)).is_err());
}

proptest! {
    #[test]
    fn expm_unitary_for_any_seed(seed in any::<u64>(), tau in -5.0..5.0f64) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, 4);
        prop_assert!(expm_hermitian(&h, tau).unwrap().unitarity_error() <= 1e-12);
    }

    #[test]
    fn partial_trace_keeps_unit_trace(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rho = random_density(&mut r, 8);
        let red = partial_trace_keep_last(&rho).unwrap();
        prop_assert!((red.matrix().trace().re - 1.0).abs() <= 1e-12);
        prop_assert!(DensityMatrix::new(red.matrix().clone()).is_ok());
    }
}
