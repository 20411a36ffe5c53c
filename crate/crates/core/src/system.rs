//! Systems of subspaces `S = (H; E₁, …, E_n)` and their basic invariants.

use std::fmt;

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Field, GaussRat, C64};
use crate::subspace::{Subspace, ANGLE_THRESHOLD};

#[derive(Clone, PartialEq)]
pub struct SubspaceSystem<F: Field> {
    ambient: usize,
    subspaces: Vec<Subspace<F>>,
}

pub type QSystem = SubspaceSystem<GaussRat>;
pub type CSystem = SubspaceSystem<C64>;

impl<F: Field> SubspaceSystem<F> {
    pub fn new(ambient: usize, subspaces: Vec<Subspace<F>>) -> Result<Self> {
        if subspaces.is_empty() {
            return Err(Error::InvalidParameter("a system needs at least one subspace".into()));
        }
        if let Some(s) = subspaces.iter().find(|s| s.ambient_dim() != ambient) {
            return Err(Error::DimensionMismatch(format!(
                "subspace of F^{} in a system on F^{ambient}",
                s.ambient_dim()
            )));
        }
        Ok(SubspaceSystem { ambient, subspaces })
    }

    /// Builds from spanning column vectors for each subspace.
    pub fn from_vectors(ambient: usize, spans: &[Vec<Vec<F>>]) -> Result<Self> {
        Self::new(ambient, spans.iter().map(|v| Subspace::span_vectors(ambient, v)).collect())
    }

    /// The system on the zero space with `n` subspaces.
    pub fn zero(n: usize) -> Self {
        SubspaceSystem { ambient: 0, subspaces: vec![Subspace::zero(0); n] }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn n(&self) -> usize {
        self.subspaces.len()
    }

    pub fn subspaces(&self) -> &[Subspace<F>] {
        &self.subspaces
    }

    pub fn subspace(&self, i: usize) -> &Subspace<F> {
        &self.subspaces[i]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subspaces.iter().map(|s| s.dim()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.ambient == 0
    }

    pub fn direct_sum(&self, o: &Self) -> Result<Self> {
        if self.n() != o.n() {
            return Err(Error::ArityMismatch(self.n(), o.n()));
        }
        let total = self.ambient + o.ambient;
        let subspaces = self
            .subspaces
            .iter()
            .zip(&o.subspaces)
            .map(|(a, b)| {
                let ea = a.embed(0, total);
                let eb = b.embed(self.ambient, total);
                Subspace::span(&ea.basis().hstack(eb.basis()))
            })
            .collect();
        Ok(SubspaceSystem { ambient: total, subspaces })
    }

    /// `(σS)ᵢ = E_{σ(i)}`, with `sigma` a 0-based permutation of `0..n`.
    pub fn permute(&self, sigma: &[usize]) -> Result<Self> {
        let n = self.n();
        let mut seen = vec![false; n];
        if sigma.len() != n || sigma.iter().any(|&k| k >= n || std::mem::replace(&mut seen[k], true)) {
            return Err(Error::InvalidParameter(format!("{sigma:?} is not a permutation of 0..{n}")));
        }
        Ok(SubspaceSystem {
            ambient: self.ambient,
            subspaces: sigma.iter().map(|&k| self.subspaces[k].clone()).collect(),
        })
    }

    /// Applies an invertible change of basis to every subspace.
    pub fn transform(&self, w: &Matrix<F>) -> Result<Self> {
        let subspaces =
            self.subspaces.iter().map(|s| s.image_under(w)).collect::<Result<Vec<_>>>()?;
        Ok(SubspaceSystem { ambient: self.ambient, subspaces })
    }

    /// True when `w` is an isomorphism `self → o`, i.e. invertible with `w(Eᵢ) = Fᵢ`.
    pub fn is_isomorphism(&self, o: &Self, w: &Matrix<F>) -> bool {
        self.n() == o.n()
            && w.rows() == o.ambient
            && w.cols() == self.ambient
            && self.transform(w).is_ok_and(|t| t == *o)
    }

    /// True when `a(Eᵢ) ⊆ Fᵢ` for all `i`.
    pub fn is_homomorphism(&self, o: &Self, a: &Matrix<F>) -> bool {
        a.rows() == o.ambient
            && a.cols() == self.ambient
            && self.subspaces.iter().zip(&o.subspaces).all(|(e, f)| f.contains(&e.image(a)))
    }

    pub fn orthocomplement(&self) -> Self {
        SubspaceSystem {
            ambient: self.ambient,
            subspaces: self.subspaces.iter().map(|s| s.orthocomplement()).collect(),
        }
    }

    pub fn to_c64(&self) -> CSystem {
        SubspaceSystem {
            ambient: self.ambient,
            subspaces: self.subspaces.iter().map(|s| s.to_c64()).collect(),
        }
    }

    pub fn defect(&self) -> Result<DefectReport> {
        self.defect_with_threshold(ANGLE_THRESHOLD)
    }

    /// Pairwise data and both defect formulas. On the floating backend
    /// intersections are counted by principal angles below `threshold`.
    pub fn defect_with_threshold(&self, threshold: f64) -> Result<DefectReport> {
        if self.n() != 4 {
            return Err(Error::NotFourSubspaces(self.n()));
        }
        let d = self.ambient;
        let dims = self.dims();
        let mut m = [[0usize; 4]; 4];
        let mut nperp = [[0usize; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let (a, b) = (&self.subspaces[i], &self.subspaces[j]);
                m[i][j] = a.intersection_dim(b, threshold);
                nperp[i][j] = d - a.sum(b)?.dim();
            }
        }
        let direct = dims.iter().sum::<usize>() as i64 - 2 * d as i64;
        let mut pair_sum = 0i64;
        for i in 0..4 {
            for j in i + 1..4 {
                pair_sum += m[i][j] as i64 - nperp[i][j] as i64;
            }
        }
        let quasi = Rational64::new(pair_sum, 3);
        let defect = Rational64::from_integer(direct);
        Ok(DefectReport {
            dims,
            m,
            nperp,
            defect,
            quasi,
            consistent: quasi == defect,
            threshold: (!F::EXACT).then_some(threshold),
        })
    }

    pub fn intersection_diagram(&self) -> IntersectionDiagram {
        self.intersection_diagram_with_threshold(ANGLE_THRESHOLD)
    }

    /// Edge `i–j` iff `Eᵢ ∩ Eⱼ = 0` (on the floating backend: smallest
    /// principal angle above `threshold`).
    pub fn intersection_diagram_with_threshold(&self, threshold: f64) -> IntersectionDiagram {
        let n = self.n();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.subspaces[i].intersection_dim(&self.subspaces[j], threshold) == 0 {
                    edges.push((i, j));
                }
            }
        }
        IntersectionDiagram::new(n, edges, (!F::EXACT).then_some(threshold))
    }

    fn sum_of(&self, idx: impl Iterator<Item = usize>, complements: bool) -> Subspace<F> {
        let mut acc = Subspace::zero(self.ambient);
        for i in idx {
            let s = if complements {
                self.subspaces[i].orthocomplement()
            } else {
                self.subspaces[i].clone()
            };
            acc = acc.sum(&s).expect("same ambient");
        }
        acc
    }

    fn intersection_of(&self, idx: impl Iterator<Item = usize>) -> Subspace<F> {
        let mut acc = Subspace::full(self.ambient);
        for i in idx {
            acc = acc.intersect(&self.subspaces[i]).expect("same ambient");
        }
        acc
    }

    /// `Σ_{i≠k} Eᵢ = H` for every `k`.
    pub fn reduced_above(&self) -> bool {
        (0..self.n()).all(|k| self.sum_of((0..self.n()).filter(|&i| i != k), false).is_full())
    }

    /// `Σ_{i≠k} Eᵢ⊥ = H` for every `k`.
    pub fn reduced_below(&self) -> bool {
        (0..self.n()).all(|k| self.sum_of((0..self.n()).filter(|&i| i != k), true).is_full())
    }

    pub fn predicates(&self) -> Predicates {
        let n = self.n();
        let pairs = || (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)));
        let nondegenerate = pairs().all(|(i, j)| {
            let (a, b) = (&self.subspaces[i], &self.subspaces[j]);
            a.intersect(b).is_ok_and(|x| x.is_zero()) && a.sum(b).is_ok_and(|x| x.is_full())
        });
        let projection_sum_invertible = {
            let sum = self
                .subspaces
                .iter()
                .fold(Matrix::zeros(self.ambient, self.ambient), |acc, s| acc.add(&s.projection()));
            sum.is_invertible()
        };
        let n_minus_1_property = (0..n).all(|skip| {
            let idx = || (0..n).filter(move |&i| i != skip);
            self.intersection_of(idx()).is_zero() && self.sum_of(idx(), false).is_full()
        });
        Predicates {
            reduced_above: self.reduced_above(),
            reduced_below: self.reduced_below(),
            nondegenerate,
            projection_sum_invertible,
            n_minus_1_property,
        }
    }

    /// Recognises `S ≅ S_{T,S}` when `(1,2)`, `(2,3)` and `(4,1)` are
    /// complementary pairs; `witness` maps the input onto the operator system.
    pub fn as_bounded_operator_system(&self) -> Result<Option<OperatorForm<F>>> {
        if self.n() != 4 {
            return Err(Error::NotFourSubspaces(self.n()));
        }
        let e = &self.subspaces;
        let complementary = |i: usize, j: usize| {
            e[i].intersect(&e[j]).is_ok_and(|x| x.is_zero())
                && e[i].sum(&e[j]).is_ok_and(|x| x.is_full())
        };
        if !(complementary(0, 1) && complementary(1, 2) && complementary(3, 0)) {
            return Ok(None);
        }
        let (k1, k2) = (e[0].dim(), e[1].dim());
        let p = e[0].basis().hstack(e[1].basis());
        let w = p.inverse()?;
        let g3 = w.mul(e[2].basis());
        let g4 = w.mul(e[3].basis());
        let x3 = g3.submatrix(0..k1, 0..g3.cols());
        let y3 = g3.submatrix(k1..k1 + k2, 0..g3.cols());
        let x4 = g4.submatrix(0..k1, 0..g4.cols());
        let y4 = g4.submatrix(k1..k1 + k2, 0..g4.cols());
        let t = y3.mul(&x3.inverse()?);
        let s = x4.mul(&y4.inverse()?);
        Ok(Some(OperatorForm { t, s, witness: w }))
    }
}

/// A basis of `Hom(S, T) = {A : A·Eᵢ ⊆ Fᵢ ∀i}`.
#[derive(Clone, Debug)]
pub struct HomBasis<F: Field> {
    pub source_dim: usize,
    pub target_dim: usize,
    pub basis: Vec<Matrix<F>>,
}

impl<F: Field> HomBasis<F> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `Σ cᵢ Aᵢ`.
    pub fn combination(&self, coeffs: &[F]) -> Matrix<F> {
        assert_eq!(coeffs.len(), self.basis.len());
        let mut out = Matrix::zeros(self.target_dim, self.source_dim);
        for (c, a) in coeffs.iter().zip(&self.basis) {
            if !c.is_zero() {
                out = out.add(&a.scale(c));
            }
        }
        out
    }

    /// Coordinates of `a` in the basis, if `a` lies in the span.
    pub fn coordinates(&self, a: &Matrix<F>) -> Option<Vec<F>> {
        let cols: Vec<Vec<F>> = self.basis.iter().map(|b| b.vec_col_major()).collect();
        let m = Matrix::from_cols(self.target_dim * self.source_dim, &cols);
        let rhs = Matrix::from_cols(self.target_dim * self.source_dim, &[a.vec_col_major()]);
        m.solve(&rhs).map(|x| x.column(0))
    }
}

/// Basis of `Hom(s, t)`. Each containment `A·Eᵢ ⊆ Fᵢ` is written as
/// `Cᵢ·A·Bᵢ = 0`, with `Bᵢ` a basis of `Eᵢ` and the rows of `Cᵢ` spanning the
/// left annihilator of a basis of `Fᵢ`; flattening `A` column-major turns it
/// into `(Bᵢᵀ ⊗ Cᵢ)·vec(A) = 0` and all constraints share one nullspace.
pub fn hom_space<F: Field>(s: &SubspaceSystem<F>, t: &SubspaceSystem<F>) -> Result<HomBasis<F>> {
    if s.n() != t.n() {
        return Err(Error::ArityMismatch(s.n(), t.n()));
    }
    let (ds, dt) = (s.ambient_dim(), t.ambient_dim());
    let mut rows: Vec<Vec<F>> = Vec::new();
    for (e, f) in s.subspaces().iter().zip(t.subspaces()) {
        if e.is_zero() || f.is_full() {
            continue;
        }
        let c = f.left_annihilator();
        let block = e.basis().transpose().kron(&c);
        for i in 0..block.rows() {
            rows.push(block.row(i).to_vec());
        }
    }
    let constraints = Matrix::from_rows(ds * dt, &rows);
    let (r, piv) = constraints.rref();
    let k = crate::matrix::nullspace_from_rref(&r, &piv, ds * dt);
    let basis = (0..k.cols()).map(|j| Matrix::from_col_major(dt, ds, &k.column(j))).collect();
    Ok(HomBasis { source_dim: ds, target_dim: dt, basis })
}

pub fn end_space<F: Field>(s: &SubspaceSystem<F>) -> HomBasis<F> {
    hom_space(s, s).expect("same arity")
}

/// Operator-system data recovered by [`SubspaceSystem::as_bounded_operator_system`].
#[derive(Clone, Debug)]
pub struct OperatorForm<F: Field> {
    /// `T : K₁ → K₂`, with `E₃` its graph.
    pub t: Matrix<F>,
    /// `S : K₂ → K₁`, with `E₄` its cograph.
    pub s: Matrix<F>,
    pub witness: Matrix<F>,
}

/// `S_{T,S}` on `K₁ ⊕ K₂`: `E₁ = K₁⊕0`, `E₂ = 0⊕K₂`, `E₃ = {(x, Tx)}`, `E₄ = {(Sy, y)}`.
pub fn operator_system<F: Field>(t: &Matrix<F>, s: &Matrix<F>) -> Result<SubspaceSystem<F>> {
    let (k1, k2) = (t.cols(), t.rows());
    if s.rows() != k1 || s.cols() != k2 {
        return Err(Error::DimensionMismatch(format!(
            "T is {}×{} but S is {}×{}",
            t.rows(),
            t.cols(),
            s.rows(),
            s.cols()
        )));
    }
    let d = k1 + k2;
    let graph = Matrix::<F>::identity(k1).vstack(t);
    let cograph = s.vstack(&Matrix::identity(k2));
    SubspaceSystem::new(
        d,
        vec![
            Subspace::coordinate(d, &(0..k1).collect::<Vec<_>>()),
            Subspace::coordinate(d, &(k1..d).collect::<Vec<_>>()),
            Subspace::span(&graph),
            Subspace::span(&cograph),
        ],
    )
}

/// `S_T = S_{T,I}`.
pub fn single_operator_system<F: Field>(t: &Matrix<F>) -> Result<SubspaceSystem<F>> {
    if !t.is_square() {
        return Err(Error::DimensionMismatch("single-operator system needs a square T".into()));
    }
    operator_system(t, &Matrix::identity(t.rows()))
}

impl<F: Field> fmt::Debug for SubspaceSystem<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "System(F^{}; dims {:?})", self.ambient, self.dims())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DefectReport {
    pub dims: Vec<usize>,
    /// `m[i][j] = dim(Eᵢ ∩ Eⱼ)`.
    pub m: [[usize; 4]; 4],
    /// `nperp[i][j] = dim((Eᵢ + Eⱼ)⊥)`.
    pub nperp: [[usize; 4]; 4],
    /// `Σ dim Eᵢ − 2 dim H`.
    pub defect: Rational64,
    /// `⅓ Σ_{i<j} (m_ij − n_ij)`.
    pub quasi: Rational64,
    pub consistent: bool,
    pub threshold: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionDiagram {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub connected: bool,
    pub threshold: Option<f64>,
}

impl IntersectionDiagram {
    pub fn new(n: usize, edges: Vec<(usize, usize)>, threshold: Option<f64>) -> Self {
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            if n == 0 || std::mem::replace(&mut seen[v], true) {
                continue;
            }
            for &(a, b) in &edges {
                if a == v && !seen[b] {
                    stack.push(b);
                } else if b == v && !seen[a] {
                    stack.push(a);
                }
            }
        }
        let connected = seen.iter().all(|&s| s);
        IntersectionDiagram { n, edges, connected, threshold }
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Predicates {
    pub reduced_above: bool,
    pub reduced_below: bool,
    pub nondegenerate: bool,
    pub projection_sum_invertible: bool,
    pub n_minus_1_property: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::QMatrix;

    fn line(v: &[i64]) -> Vec<Vec<GaussRat>> {
        vec![v.iter().map(|&x| GaussRat::int(x)).collect()]
    }

    fn one_dim(flags: &[bool]) -> QSystem {
        let spans: Vec<_> =
            flags.iter().map(|&f| if f { line(&[1]) } else { vec![] }).collect();
        QSystem::from_vectors(1, &spans).unwrap()
    }

    #[test]
    fn direct_sum_dims_add() {
        let a = one_dim(&[true, false]);
        let b = one_dim(&[false, true]);
        let s = a.direct_sum(&b).unwrap();
        assert_eq!(s.ambient_dim(), 2);
        assert_eq!(s.dims(), vec![1, 1]);
        assert_eq!(a.direct_sum(&QSystem::zero(2)).unwrap(), a);
        assert_eq!(a.direct_sum(&one_dim(&[true])), Err(Error::ArityMismatch(2, 1)));
    }

    #[test]
    fn permutations() {
        let s = one_dim(&[true, false, false, true]);
        assert_eq!(s.permute(&[0, 1, 2, 3]).unwrap(), s);
        let t = s.permute(&[1, 0, 2, 3]).unwrap();
        assert_eq!(t.dims(), vec![0, 1, 0, 1]);
        assert_eq!(t.permute(&[1, 0, 2, 3]).unwrap(), s);
        assert!(s.permute(&[0, 0, 1, 2]).is_err());
    }

    #[test]
    fn defect_of_full_system() {
        let r = one_dim(&[true; 4]).defect().unwrap();
        assert_eq!(r.defect, Rational64::from_integer(2));
        assert!(r.consistent);
        assert!(one_dim(&[true; 3]).defect().is_err());
    }

    #[test]
    fn diagram_of_full_system_has_no_edges() {
        let d = one_dim(&[true; 4]).intersection_diagram();
        assert!(d.edges.is_empty());
        assert!(!d.connected);
    }

    #[test]
    fn operator_system_round_trip() {
        let j2 = QMatrix::from_i64_rows(&[&[0, 1], &[0, 0]]);
        let s = single_operator_system(&j2).unwrap();
        let form = s.as_bounded_operator_system().unwrap().unwrap();
        assert_eq!(form.t, j2);
        assert!(form.s.is_identity());
        let p = s.predicates();
        assert!(p.reduced_above && p.reduced_below);
        let d = s.intersection_diagram();
        for (a, b) in [(0, 3), (0, 1), (1, 2)] {
            assert!(d.has_edge(a, b));
        }
    }

    #[test]
    fn hom_space_examples() {
        let s9 = QSystem::from_vectors(2, &[line(&[1, 0]), line(&[0, 1]), line(&[1, 1])]).unwrap();
        let end = end_space(&s9);
        assert_eq!(end.dim(), 1);
        assert!(end.basis[0].is_identity() || end.basis[0].rank() == 2);
        let a = one_dim(&[true, false]);
        let b = one_dim(&[false, true]);
        assert_eq!(hom_space(&a, &b).unwrap().dim(), 0);
        let j2 = QMatrix::from_i64_rows(&[&[0, 1], &[0, 0]]);
        let sj = single_operator_system(&j2).unwrap();
        let end = end_space(&sj);
        assert_eq!(end.dim(), 2);
        for x in &end.basis {
            assert!(sj.is_homomorphism(&sj, x));
        }
        assert!(end.coordinates(&QMatrix::identity(4)).is_some());
    }

    #[test]
    fn predicates_of_degenerate_system() {
        assert!(!one_dim(&[true, false, false, false]).predicates().reduced_above);
    }
}
