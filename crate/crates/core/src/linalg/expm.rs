//! Matrix exponential by scaling and squaring with a degree-13 Padé approximant.

use super::matrix::ComplexMatrix;
use super::solve::solve;

const PADE_13: [f64; 14] = [
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

/// Largest 1-norm for which the unscaled [13/13] approximant meets double precision.
const THETA_13: f64 = 5.371920351148152;

/// `exp(a)` for a square matrix.
///
/// # Panics
/// If `a` is not square.
pub fn expm(a: &ComplexMatrix) -> ComplexMatrix {
    assert!(a.is_square(), "expm requires a square matrix");
    let n = a.rows();
    let norm = a.one_norm();
    if norm == 0.0 {
        return ComplexMatrix::identity(n);
    }

    let squarings = if norm > THETA_13 { (norm / THETA_13).log2().ceil() as i32 } else { 0 };
    let a = a.scale_real(0.5f64.powi(squarings));

    let b = &PADE_13;
    let id = ComplexMatrix::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let lin = |c6: f64, c4: f64, c2: f64, c0: f64| {
        let mut m = a6.scale_real(c6);
        m += &a4.scale_real(c4);
        m += &a2.scale_real(c2);
        m += &id.scale_real(c0);
        m
    };
    let high = |c6: f64, c4: f64, c2: f64| {
        let mut m = a6.scale_real(c6);
        m += &a4.scale_real(c4);
        m += &a2.scale_real(c2);
        m
    };

    let u_inner = &(&a6 * &high(b[13], b[11], b[9])) + &lin(b[7], b[5], b[3], b[1]);
    let u = &a * &u_inner;
    let v = &(&a6 * &high(b[12], b[10], b[8])) + &lin(b[6], b[4], b[2], b[0]);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = solve(&q, &p).expect("Padé denominator is nonsingular after scaling");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}
