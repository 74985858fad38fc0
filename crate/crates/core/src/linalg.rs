//! Small dense complex determinants.
//!
//! Matrices here are at most 16×16, so a plain LU factorization with partial
//! pivoting is all that is needed.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Largest imaginary residue accepted on a Hermitian determinant, relative to
/// the Hadamard bound of the matrix (and absolute when that bound is below 1).
pub const IMAG_RESIDUE_TOL: f64 = 1e-9;

/// Determinant of the leading `order × order` block of `m` by LU with
/// partial pivoting.
pub fn leading_det(m: &DMatrix<Complex64>, order: usize) -> Complex64 {
    assert!(order <= m.nrows() && order <= m.ncols());
    let mut a: Vec<Complex64> = Vec::with_capacity(order * order);
    for r in 0..order {
        for c in 0..order {
            a.push(m[(r, c)]);
        }
    }
    lu_det_in_place(&mut a, order)
}

/// Determinant of a square complex matrix.
pub fn det(m: &DMatrix<Complex64>) -> Complex64 {
    assert_eq!(m.nrows(), m.ncols(), "determinant of a non-square matrix");
    leading_det(m, m.nrows())
}

fn lu_det_in_place(a: &mut [Complex64], n: usize) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let mut pivot = k;
        let mut best = a[k * n + k].norm();
        for r in (k + 1)..n {
            let v = a[r * n + k].norm();
            if v > best {
                best = v;
                pivot = r;
            }
        }
        if best == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != k {
            for c in 0..n {
                a.swap(k * n + c, pivot * n + c);
            }
            det = -det;
        }
        let p = a[k * n + k];
        det *= p;
        for r in (k + 1)..n {
            let f = a[r * n + k] / p;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in (k + 1)..n {
                let u = a[k * n + c];
                a[r * n + c] -= f * u;
            }
        }
    }
    det
}

/// Product of the Euclidean row norms of the leading block, an upper bound
/// on the modulus of its determinant.
pub fn hadamard_bound(m: &DMatrix<Complex64>, order: usize) -> f64 {
    (0..order)
        .map(|r| (0..order).map(|c| m[(r, c)].norm_sqr()).sum::<f64>().sqrt())
        .product()
}

/// Real determinant of the leading block of a Hermitian matrix.
///
/// The imaginary part of the LU result is pure rounding; it is checked
/// against [`IMAG_RESIDUE_TOL`] and reported as a numerical failure when it
/// is too large.
pub fn hermitian_leading_det(m: &DMatrix<Complex64>, order: usize) -> Result<f64> {
    let d = leading_det(m, order);
    let scale = hadamard_bound(m, order).max(1.0);
    if !d.re.is_finite() || d.im.abs() > IMAG_RESIDUE_TOL * scale {
        return Err(Error::ComplexResidue {
            real: d.re,
            imag: d.im,
        });
    }
    Ok(d.re)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn hermitian_min_eigenvalue(m: DMatrix<Complex64>) -> f64 {
    let eig = nalgebra::SymmetricEigen::new(m);
    eig.eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}
