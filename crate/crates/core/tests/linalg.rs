use proptest::prelude::*;
use qht_core::linalg::{
    embed, expm, hermitian_eig, kron, null_vector, partial_trace, pauli_x, pauli_y, pauli_z, solve, ComplexMatrix,
};
use qht_core::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn matrix(dim: usize, vals: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |i, j| {
        let k = 2 * (i * dim + j);
        c(vals[k], vals[k + 1])
    })
}

fn hermitian(dim: usize, vals: &[f64]) -> ComplexMatrix {
    let a = matrix(dim, vals);
    (&a + &a.adjoint()).scale_real(0.5)
}

fn density(dim: usize, vals: &[f64]) -> ComplexMatrix {
    let a = matrix(dim, vals);
    let p = &a * &a.adjoint();
    let tr = p.trace().re;
    p.scale_real(1.0 / tr)
}

fn entries(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 2 * dim * dim)
}

fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).max_norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative(a in entries(2), b in entries(2), c in entries(3)) {
        let (a, b, c) = (matrix(2, &a), matrix(2, &b), matrix(3, &c));
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert!(max_diff(&left, &right) <= 1e-12);
    }

    #[test]
    fn kron_mixed_product(a in entries(2), b in entries(2), c in entries(2), d in entries(2)) {
        let (a, b, c, d) = (matrix(2, &a), matrix(2, &b), matrix(2, &c), matrix(2, &d));
        let lhs = &kron(&a, &b) * &kron(&c, &d);
        let rhs = kron(&(&a * &c), &(&b * &d));
        prop_assert!(max_diff(&lhs, &rhs) <= 1e-12);
    }

    #[test]
    fn eig_reconstructs(v in entries(8)) {
        let h = hermitian(8, &v);
        let e = hermitian_eig(&h).unwrap();
        prop_assert!(max_diff(&e.reconstruct(), &h) <= 1e-10);
        let u = &e.eigenvectors;
        prop_assert!(max_diff(&(&u.adjoint() * u), &ComplexMatrix::identity(8)) <= 1e-10);
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let sum: f64 = e.eigenvalues.iter().sum();
        prop_assert!((sum - h.trace().re).abs() <= 1e-10);
    }

    #[test]
    fn partial_trace_keeps_trace_and_positivity(v in entries(8), keep in 0usize..3) {
        let rho = density(8, &v);
        let r = partial_trace(&rho, keep, 3).unwrap();
        prop_assert!((r.trace() - c(1.0, 0.0)).norm() <= 1e-12);
        prop_assert!(r.hermiticity_error() <= 1e-12);
        let e = hermitian_eig(&r).unwrap();
        prop_assert!(e.eigenvalues[0] >= -1e-12);
    }

    #[test]
    fn expm_inverse(v in entries(6), scale in 0.0f64..5.0) {
        let a = matrix(6, &v);
        let a = a.scale_real(scale / a.one_norm().max(1e-300));
        let prod = &expm(&a) * &expm(&(-&a));
        prop_assert!(max_diff(&prod, &ComplexMatrix::identity(6)) <= 1e-9);
    }

    #[test]
    fn expm_of_hermitian_matches_spectrum(v in entries(5), t in -3.0f64..3.0) {
        let h = hermitian(5, &v);
        let e = hermitian_eig(&h).unwrap();
        let u = &e.eigenvectors;
        let phases = ComplexMatrix::from_fn(5, 5, |i, j| {
            if i == j { c(0.0, -t * e.eigenvalues[i]).exp() } else { c(0.0, 0.0) }
        });
        let oracle = &(u * &phases) * &u.adjoint();
        prop_assert!(max_diff(&expm(&h.scale(c(0.0, -t))), &oracle) <= 1e-10);
    }

    #[test]
    fn commutator_with_self_vanishes(v in entries(4)) {
        let a = matrix(4, &v);
        prop_assert!(a.commutator(&a).unwrap().max_norm() <= 1e-14);
    }

    #[test]
    fn vectorize_roundtrip_and_column_order(v in entries(3)) {
        let a = matrix(3, &v);
        let vec = a.vectorize();
        prop_assert_eq!(vec[1], a[(1, 0)]);
        prop_assert_eq!(vec[3], a[(0, 1)]);
        prop_assert_eq!(ComplexMatrix::unvectorize(&vec, 3).unwrap(), a);
    }

    #[test]
    fn solve_recovers_rhs(v in entries(6), b in prop::collection::vec(-1.0f64..1.0, 12)) {
        let a = &matrix(6, &v) + &ComplexMatrix::identity(6).scale_real(4.0);
        let b = ComplexMatrix::from_fn(6, 2, |i, j| c(b[2 * i + j], 0.0));
        let x = solve(&a, &b).unwrap();
        prop_assert!(max_diff(&(&a * &x), &b) <= 1e-12);
    }
}

#[test]
fn pauli_algebra() {
    let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
    let i2 = ComplexMatrix::identity(2);
    for p in [&x, &y, &z] {
        assert_eq!(&(p * p), &i2);
    }
    assert!(max_diff(&(&x * &y), &z.scale(c(0.0, 1.0))) < 1e-15);
    assert_eq!(z[(0, 0)], c(1.0, 0.0));
}

#[test]
fn embed_orders_first_qubit_most_significant() {
    let z0 = embed(&pauli_z(), 0, 3);
    for k in 0..8 {
        let expected = if k & 0b100 == 0 { 1.0 } else { -1.0 };
        assert_eq!(z0[(k, k)].re, expected);
    }
    let z2 = embed(&pauli_z(), 2, 3);
    assert_eq!(z2[(1, 1)].re, -1.0);
}

#[test]
fn bell_state_reduces_to_maximally_mixed() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = ComplexMatrix::column(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
    let rho = &psi * &psi.adjoint();
    for keep in 0..2 {
        let r = partial_trace(&rho, keep, 2).unwrap();
        assert!(max_diff(&r, &ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
    }
}

#[test]
fn partial_trace_of_product_recovers_factor() {
    let a = ComplexMatrix::from_real(2, 2, &[0.7, 0.1, 0.1, 0.3]).unwrap();
    let b = ComplexMatrix::from_real(2, 2, &[0.2, 0.0, 0.0, 0.8]).unwrap();
    let rho = kron(&a, &kron(&b, &a));
    assert!(max_diff(&partial_trace(&rho, 1, 3).unwrap(), &b) < 1e-15);
    assert!(max_diff(&partial_trace(&rho, 2, 3).unwrap(), &a) < 1e-15);
}

#[test]
fn null_vector_of_rank_deficient() {
    // rows: e1 − e2, e2 − e3, e1 − e3 -> kernel spanned by (1, 1, 1)
    let a = ComplexMatrix::from_real(3, 3, &[1.0, -1.0, 0.0, 0.0, 1.0, -1.0, 1.0, 0.0, -1.0]).unwrap();
    let n = null_vector(&a, 1e-12).unwrap();
    assert_eq!(n.nullity, 1);
    let v = n.vector.as_slice();
    for k in 1..3 {
        assert!((v[k] - v[0]).norm() < 1e-14);
    }
    assert!((a.matvec(n.vector.as_slice()).iter().map(|z| z.norm()).fold(0.0, f64::max)) < 1e-14);
}
