//! Subspaces of ℂ^d stored by a canonical basis.

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::numeric;
use crate::scalar::{Field, DEFAULT_TOL};

/// Default threshold for treating a principal angle as zero on the floating backend.
pub const ANGLE_THRESHOLD: f64 = 1e-6;

/// A subspace of `F^d`, held as a `d × k` basis matrix in canonical form:
/// column-reduced echelon (leading entry 1) when exact, orthonormal when floating.
#[derive(Clone)]
pub struct Subspace<F: Field> {
    ambient: usize,
    basis: Matrix<F>,
}

impl<F: Field> Subspace<F> {
    /// Span of the columns of `vectors`.
    pub fn span(vectors: &Matrix<F>) -> Self {
        let basis = F::canonical_span(vectors, DEFAULT_TOL);
        Subspace { ambient: vectors.rows(), basis }
    }

    pub fn span_vectors(ambient: usize, vectors: &[Vec<F>]) -> Self {
        Self::span(&Matrix::from_cols(ambient, vectors))
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::zeros(ambient, 0) }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::identity(ambient) }
    }

    /// Coordinate subspace spanned by the standard vectors with the given indices.
    pub fn coordinate(ambient: usize, idx: &[usize]) -> Self {
        let cols: Vec<Vec<F>> = idx
            .iter()
            .map(|&i| (0..ambient).map(|k| if k == i { F::one() } else { F::zero() }).collect())
            .collect();
        Self::span_vectors(ambient, &cols)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    fn check_ambient(&self, o: &Self) -> Result<()> {
        if self.ambient != o.ambient {
            return Err(Error::DimensionMismatch(format!(
                "subspaces of F^{} and F^{}",
                self.ambient, o.ambient
            )));
        }
        Ok(())
    }

    pub fn sum(&self, o: &Self) -> Result<Self> {
        self.check_ambient(o)?;
        Ok(Self::span(&self.basis.hstack(&o.basis)))
    }

    /// Intersection through the kernel of `[B_a | −B_b]`, mapped back through `B_a`.
    pub fn intersect(&self, o: &Self) -> Result<Self> {
        self.check_ambient(o)?;
        if self.is_zero() || o.is_zero() {
            return Ok(Self::zero(self.ambient));
        }
        let k = self.basis.hstack(&o.basis.neg()).nullspace();
        let coeff = k.submatrix(0..self.dim(), 0..k.cols());
        Ok(Self::span(&self.basis.mul(&coeff)))
    }

    /// Orthogonal complement under the standard Hermitian inner product.
    pub fn orthocomplement(&self) -> Self {
        if self.is_zero() {
            return Self::full(self.ambient);
        }
        Self::span(&self.basis.adjoint().nullspace())
    }

    pub fn contains_vector(&self, v: &[F]) -> bool {
        let m = Matrix::from_cols(self.ambient, &[v.to_vec()]);
        self.contains(&Self::span(&m))
    }

    /// `o ⊆ self`.
    pub fn contains(&self, o: &Self) -> bool {
        self.ambient == o.ambient
            && (o.is_zero() || self.basis.hstack(&o.basis).rank() == self.dim())
    }

    /// Image under an invertible map.
    pub fn image_under(&self, t: &Matrix<F>) -> Result<Self> {
        if t.cols() != self.ambient || !t.is_invertible() {
            return Err(Error::Singular);
        }
        Ok(self.image(t))
    }

    /// Image under an arbitrary linear map `t : F^d → F^{rows(t)}`.
    pub fn image(&self, t: &Matrix<F>) -> Self {
        assert_eq!(t.cols(), self.ambient, "map does not act on this ambient space");
        Self::span(&t.mul(&self.basis))
    }

    /// Preimage `{x : t·x ∈ self}` under `t : F^m → F^d`.
    pub fn preimage(&self, t: &Matrix<F>) -> Self {
        assert_eq!(t.rows(), self.ambient);
        // x ∈ preimage ⇔ C·t·x = 0 where rows of C span the left annihilator of the basis.
        let ann = self.left_annihilator();
        if ann.rows() == 0 {
            return Self::full(t.cols());
        }
        Self::span(&ann.mul(t).nullspace())
    }

    /// A matrix whose rows span `{c : c·B = 0}` for the basis `B`.
    pub fn left_annihilator(&self) -> Matrix<F> {
        if self.is_zero() {
            return Matrix::identity(self.ambient);
        }
        self.basis.transpose().nullspace().transpose()
    }

    /// Orthogonal projection onto this subspace, `B(BᴴB)⁻¹Bᴴ`.
    pub fn projection(&self) -> Matrix<F> {
        if self.is_zero() {
            return Matrix::zeros(self.ambient, self.ambient);
        }
        let b = &self.basis;
        let g = b.adjoint().mul(b).inverse().expect("basis Gram matrix is invertible");
        b.mul(&g).mul(&b.adjoint())
    }

    /// Embeds into `F^{offset + d + tail}` at coordinates `offset..offset+d`.
    pub fn embed(&self, offset: usize, total: usize) -> Self {
        assert!(offset + self.ambient <= total);
        let b = Matrix::from_fn(total, self.dim(), |i, j| {
            if i >= offset && i < offset + self.ambient {
                self.basis[(i - offset, j)].clone()
            } else {
                F::zero()
            }
        });
        Subspace { ambient: total, basis: b }
    }

    /// Principal angles to `o` (ascending), computed in double precision.
    pub fn principal_angles(&self, o: &Self) -> Vec<f64> {
        let qa = numeric::orthonormal_basis(&self.basis.to_c64(), DEFAULT_TOL);
        let qb = numeric::orthonormal_basis(&o.basis.to_c64(), DEFAULT_TOL);
        numeric::principal_angles(&qa, &qb)
    }

    /// Dimension of the intersection: exact on ℚ(i), otherwise the number of
    /// principal angles below `threshold`.
    pub fn intersection_dim(&self, o: &Self, threshold: f64) -> usize {
        if F::EXACT {
            self.intersect(o).map(|s| s.dim()).unwrap_or(0)
        } else {
            self.principal_angles(o).iter().filter(|&&t| t < threshold).count()
        }
    }

    pub fn to_c64(&self) -> Subspace<crate::scalar::C64> {
        Subspace::span(&self.basis.to_c64())
    }
}

impl<F: Field> PartialEq for Subspace<F> {
    fn eq(&self, o: &Self) -> bool {
        if self.ambient != o.ambient || self.dim() != o.dim() {
            return false;
        }
        if F::EXACT {
            self.basis == o.basis
        } else {
            self.principal_angles(o).iter().all(|&t| t < ANGLE_THRESHOLD)
        }
    }
}

impl<F: Field> fmt::Debug for Subspace<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in F^{}: {:?})", self.dim(), self.ambient, self.basis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::QMatrix;
    use crate::scalar::GaussRat;

    fn sp(d: usize, cols: &[&[i64]]) -> Subspace<GaussRat> {
        let vs: Vec<Vec<GaussRat>> =
            cols.iter().map(|c| c.iter().map(|&x| GaussRat::int(x)).collect()).collect();
        Subspace::span_vectors(d, &vs)
    }

    #[test]
    fn span_examples() {
        let s = sp(2, &[&[1, 0], &[2, 0]]);
        assert_eq!(s.dim(), 1);
        assert_eq!(s, sp(2, &[&[1, 0]]));
        assert!(sp(3, &[]).is_zero());
        assert_eq!(sp(3, &[&[1, 1, 1], &[1, 2, 3]]).dim(), 2);
    }

    #[test]
    fn intersect_and_sum() {
        assert!(sp(2, &[&[1, 0]]).intersect(&sp(2, &[&[0, 1]])).unwrap().is_zero());
        let e1 = sp(3, &[&[1, 0, 0], &[0, 1, 0]]);
        let e3 = sp(3, &[&[1, 0, 0], &[0, 1, 1]]);
        assert_eq!(e1.intersect(&e3).unwrap(), sp(3, &[&[1, 0, 0]]));
        assert_eq!(e1.intersect(&e1).unwrap(), e1);
        assert!(sp(2, &[&[1, 0]]).sum(&sp(2, &[&[0, 1]])).unwrap().is_full());
        let e2 = sp(3, &[&[0, 0, 1]]);
        assert_eq!(e3.sum(&e2).unwrap().dim(), 3);
        assert!(e1.intersect(&sp(2, &[])).is_err());
    }

    #[test]
    fn orthocomplements() {
        assert_eq!(sp(3, &[&[1, 0, 0], &[0, 1, 0]]).orthocomplement(), sp(3, &[&[0, 0, 1]]));
        assert_eq!(sp(2, &[&[1, 1]]).orthocomplement(), sp(2, &[&[1, -1]]));
        assert!(sp(4, &[]).orthocomplement().is_full());
        let i = GaussRat::i();
        let v = Subspace::span_vectors(2, &[vec![GaussRat::int(1), i.clone()]]);
        let w = v.orthocomplement();
        // ⟨(1,i),(i,1)⟩ = 1·i + (−i)·1 = 0
        assert_eq!(w, Subspace::span_vectors(2, &[vec![i, GaussRat::int(1)]]));
    }

    #[test]
    fn image_under_shear() {
        let t = QMatrix::from_i64_rows(&[&[1, 1], &[0, 1]]);
        assert_eq!(sp(2, &[&[0, 1]]).image_under(&t).unwrap(), sp(2, &[&[1, 1]]));
        let singular = QMatrix::from_i64_rows(&[&[1, 1], &[1, 1]]);
        assert!(sp(2, &[&[0, 1]]).image_under(&singular).is_err());
    }

    #[test]
    fn projection_is_idempotent_and_selfadjoint() {
        let s = sp(3, &[&[1, 2, 0], &[0, 1, 1]]);
        let p = s.projection();
        assert_eq!(p.mul(&p), p);
        assert_eq!(p.adjoint(), p);
    }
}
