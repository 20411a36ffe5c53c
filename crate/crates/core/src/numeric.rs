//! Floating-point helpers backed by nalgebra: orthonormal bases, principal
//! angles, eigenvalues and polynomial roots.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::matrix::{CMatrix, Matrix};
use crate::scalar::{Field, C64};

pub fn to_dmatrix<F: Field>(m: &Matrix<F>) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)].to_c64())
}

pub fn from_dmatrix(m: &DMatrix<Complex64>) -> CMatrix {
    Matrix::from_fn(m.nrows(), m.ncols(), |i, j| C64(m[(i, j)]))
}

/// Orthonormal basis of the column span by modified Gram–Schmidt with one
/// re-orthogonalisation pass. Columns whose residual norm falls below
/// `tol·max(1, largest column norm)` are dropped.
pub fn orthonormal_basis(m: &CMatrix, tol: f64) -> CMatrix {
    let d = m.rows();
    let scale = (0..m.cols())
        .map(|j| norm(&m.column(j)))
        .fold(1.0f64, f64::max);
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for j in 0..m.cols() {
        let mut v: Vec<Complex64> = m.column(j).iter().map(|x| x.0).collect();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let n = norm_c(&v);
        if n > tol * scale {
            basis.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    Matrix::from_fn(d, basis.len(), |i, j| C64(basis[j][i]))
}

/// `⟨a, b⟩ = Σ conj(a_i) b_i`.
pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm_c(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.0.norm_sqr()).sum::<f64>().sqrt()
}

pub fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Principal angles (ascending) between the spans of two orthonormal bases.
///
/// Small angles come from the sines, large ones from the cosines, so both
/// ends of the range keep full relative accuracy.
pub fn principal_angles(qa: &CMatrix, qb: &CMatrix) -> Vec<f64> {
    let (qa, qb) = if qa.cols() >= qb.cols() { (qa, qb) } else { (qb, qa) };
    let k = qb.cols();
    if k == 0 {
        return Vec::new();
    }
    let a = to_dmatrix(qa);
    let b = to_dmatrix(qb);
    let cross = a.adjoint() * &b;
    let resid = &b - &a * &cross;
    let mut cos = singular_values(&cross);
    cos.resize(k, 0.0);
    let mut sin = singular_values(&resid);
    sin.resize(k, 0.0);
    sin.reverse();
    (0..k)
        .map(|i| {
            let c = cos[i].clamp(0.0, 1.0);
            if c * c > 0.5 {
                sin[i].clamp(0.0, 1.0).asin()
            } else {
                c.acos()
            }
        })
        .collect()
}

/// Eigenvalues of a square complex matrix from its Schur form.
pub fn eigenvalues(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let (_, t) = m.clone().schur().unpack();
    t.diagonal().iter().copied().collect()
}

/// Roots of `Σ c_k z^k` (ascending coefficients, nonzero leading term) via
/// the companion matrix, each polished by a few Newton steps.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[n];
    let mut comp = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        comp[(i, n - 1)] = -coeffs[i] / lead;
    }
    eigenvalues(&comp).into_iter().map(|z| newton_polish(coeffs, z)).collect()
}

pub fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

fn newton_polish(coeffs: &[Complex64], mut z: Complex64) -> Complex64 {
    let deriv: Vec<Complex64> =
        coeffs.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect();
    for _ in 0..8 {
        let f = horner(coeffs, z);
        let df = horner(&deriv, z);
        if df.norm() == 0.0 {
            break;
        }
        let step = f / df;
        let next = z - step;
        if !next.re.is_finite() || !next.im.is_finite() || horner(coeffs, next).norm() > f.norm() {
            break;
        }
        z = next;
        if step.norm() <= 1e-15 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn principal_angle_of_two_lines() {
        let t = std::f64::consts::FRAC_PI_6;
        let a = CMatrix::from_vec(2, 1, vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let b = CMatrix::from_vec(2, 1, vec![C64::new(t.cos(), 0.0), C64::new(t.sin(), 0.0)]);
        let ang = principal_angles(&a, &b);
        assert!((ang[0] - t).abs() < 1e-14);
    }

    #[test]
    fn tiny_angles_are_resolved() {
        let eps = 1e-12;
        let a = CMatrix::from_vec(2, 1, vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let b = orthonormal_basis(&CMatrix::from_vec(2, 1, vec![C64::new(1.0, 0.0), C64::new(eps, 0.0)]), 1e-14);
        let ang = principal_angles(&a, &b);
        assert!((ang[0] - eps).abs() < 1e-20 + 1e-6 * eps);
    }

    #[test]
    fn roots_of_quadratic() {
        let mut r = poly_roots(&[c(2.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0)]);
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((r[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((r[1] - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn orthonormal_basis_drops_dependent_columns() {
        let m = CMatrix::from_vec(2, 2, vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(1.0, 0.0), C64::new(2.0, 0.0)]);
        assert_eq!(orthonormal_basis(&m, 1e-9).cols(), 1);
    }
}
