//! Dense LU factorizations: partial pivoting for linear solves, complete
//! pivoting for rank revelation and null vectors.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ONE, ZERO};
use crate::error::{Error, Result};

/// Solves `a · x = b` for a square `a` and any number of right-hand columns.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows();
    if !a.is_square() || b.rows() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{n}x{n} system"),
            found: format!("{}x{} with rhs {}x{}", a.rows(), a.cols(), b.rows(), b.cols()),
        });
    }
    let m = b.cols();
    let mut lu = a.clone();
    let mut x = b.clone();
    let scale = a.max_norm();
    for k in 0..n {
        let (piv, mag) = (k..n)
            .map(|i| (i, lu[(i, k)].norm()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if mag <= f64::EPSILON * scale * n as f64 || mag == 0.0 {
            return Err(Error::Singular);
        }
        if piv != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = tmp;
            }
            for j in 0..m {
                let tmp = x[(k, j)];
                x[(k, j)] = x[(piv, j)];
                x[(piv, j)] = tmp;
            }
        }
        let inv = ONE / lu[(k, k)];
        for i in k + 1..n {
            let f = lu[(i, k)] * inv;
            if f == ZERO {
                continue;
            }
            lu[(i, k)] = ZERO;
            for j in k + 1..n {
                let u = lu[(k, j)];
                lu[(i, j)] -= f * u;
            }
            for j in 0..m {
                let u = x[(k, j)];
                x[(i, j)] -= f * u;
            }
        }
    }
    for j in 0..m {
        for i in (0..n).rev() {
            let mut acc = x[(i, j)];
            for k in i + 1..n {
                acc -= lu[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = acc / lu[(i, i)];
        }
    }
    Ok(x)
}

/// Unit-norm null vector plus the numerical nullity.
#[derive(Debug, Clone)]
pub struct NullVector {
    pub vector: ComplexMatrix,
    pub nullity: usize,
}

/// Complete-pivoting elimination. A pivot counts as zero when its modulus
/// is at most `tol` times the first (largest) pivot; the number of such
/// trailing pivots is reported as the nullity.
pub fn null_vector(a: &ComplexMatrix, tol: f64) -> Result<NullVector> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            found: format!("{}x{}", a.rows(), a.cols()),
        });
    }
    let n = a.rows();
    let mut u = a.clone();
    let mut col_perm: Vec<usize> = (0..n).collect();
    let mut rank = n;
    let mut first_pivot = 0.0;

    for k in 0..n {
        let mut best = (k, k, -1.0);
        for i in k..n {
            for j in k..n {
                let mag = u[(i, j)].norm();
                if mag > best.2 {
                    best = (i, j, mag);
                }
            }
        }
        let (pi, pj, mag) = best;
        if k == 0 {
            first_pivot = mag;
        }
        if mag <= tol * first_pivot || mag == 0.0 {
            rank = k;
            break;
        }
        if pi != k {
            for j in 0..n {
                let tmp = u[(k, j)];
                u[(k, j)] = u[(pi, j)];
                u[(pi, j)] = tmp;
            }
        }
        if pj != k {
            for i in 0..n {
                let tmp = u[(i, k)];
                u[(i, k)] = u[(i, pj)];
                u[(i, pj)] = tmp;
            }
            col_perm.swap(k, pj);
        }
        let inv = ONE / u[(k, k)];
        for i in k + 1..n {
            let f = u[(i, k)] * inv;
            if f == ZERO {
                continue;
            }
            u[(i, k)] = ZERO;
            for j in k + 1..n {
                let ukj = u[(k, j)];
                u[(i, j)] -= f * ukj;
            }
        }
    }

    let nullity = n - rank;
    if nullity == 0 {
        return Err(Error::EmptyNullSpace);
    }

    // Permuted unknowns y: free variable y[rank] = 1, others free = 0.
    let mut y = vec![ZERO; n];
    y[rank] = ONE;
    for i in (0..rank).rev() {
        let mut acc = ZERO;
        for k in i + 1..n {
            acc += u[(i, k)] * y[k];
        }
        y[i] = -acc / u[(i, i)];
    }
    let mut x = vec![ZERO; n];
    for (k, &orig) in col_perm.iter().enumerate() {
        x[orig] = y[k];
    }
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let x: Vec<Complex64> = x.into_iter().map(|z| z / norm).collect();
    Ok(NullVector { vector: ComplexMatrix::column(x), nullity })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_small_system() {
        let a = ComplexMatrix::new(
            2,
            2,
            vec![Complex64::new(2.0, 1.0), Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0), Complex64::new(3.0, 0.0)],
        )
        .unwrap();
        let b = ComplexMatrix::column(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)]);
        let x = solve(&a, &b).unwrap();
        let r = &(&a * &x) - &b;
        assert!(r.max_norm() < 1e-14);
    }

    #[test]
    fn singular_solve_errors() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        let b = ComplexMatrix::identity(2);
        assert_eq!(solve(&a, &b).unwrap_err(), Error::Singular);
    }

    #[test]
    fn diag_null_vector() {
        let a = ComplexMatrix::from_diag(&[1.0, 0.0]);
        let nv = null_vector(&a, 1e-12).unwrap();
        assert_eq!(nv.nullity, 1);
        assert!(nv.vector[(0, 0)].norm() < 1e-15);
        assert!((nv.vector[(1, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_has_no_null_space() {
        let a = ComplexMatrix::identity(3);
        assert_eq!(null_vector(&a, 1e-12).unwrap_err(), Error::EmptyNullSpace);
    }

    #[test]
    fn rank_two_of_four() {
        let a = ComplexMatrix::from_real(4, 4, &[
            1.0, 2.0, 3.0, 4.0, //
            2.0, 4.0, 6.0, 8.0, //
            0.0, 1.0, 0.0, 1.0, //
            1.0, 3.0, 3.0, 5.0,
        ])
        .unwrap();
        let nv = null_vector(&a, 1e-12).unwrap();
        assert_eq!(nv.nullity, 2);
        let r = &a * &nv.vector;
        assert!(r.max_norm() <= 1e-12 * a.max_norm());
    }
}
