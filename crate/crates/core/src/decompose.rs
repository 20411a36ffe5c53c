//! Endomorphism algebras, idempotents, decomposition into indecomposables,
//! isomorphism testing and strong irreducibility.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, QMatrix};
use crate::numeric;
use crate::poly::{factor_over_gaussian_rationals, minimal_polynomial, Polynomial};
use crate::scalar::{Field, GaussRat};
use crate::subspace::Subspace;
use crate::system::{end_space, hom_space, single_operator_system, HomBasis, QSystem};

/// Number of seeded random combinations tried when searching Hom spaces.
pub const RANDOM_ATTEMPTS: usize = 32;
/// Random combinations have integer coefficients in `[-COEFF_RANGE, COEFF_RANGE]`.
pub const COEFF_RANGE: i64 = 3;

/// A subalgebra of `M_d(ℚ(i))` given by a linear basis containing the identity
/// in its span.
#[derive(Clone, Debug)]
pub struct EndAlgebra {
    d: usize,
    basis: Vec<QMatrix>,
}

impl EndAlgebra {
    pub fn new(d: usize, basis: Vec<QMatrix>) -> Self {
        EndAlgebra { d, basis }
    }

    pub fn of_system(s: &QSystem) -> Self {
        let h = end_space(s);
        EndAlgebra { d: s.ambient_dim(), basis: h.basis }
    }

    /// The commutant `{B : BT = TB}` of a square matrix.
    pub fn commutant(t: &QMatrix) -> Self {
        let n = t.rows();
        let id = QMatrix::identity(n);
        let op = id.kron(t).sub(&t.transpose().kron(&id));
        let k = op.nullspace();
        let basis = (0..k.cols()).map(|j| QMatrix::from_col_major(n, n, &k.column(j))).collect();
        EndAlgebra { d: n, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[QMatrix] {
        &self.basis
    }

    /// Jacobson radical as the kernel of the trace form `(x, y) ↦ tr(xy)`.
    pub fn radical(&self) -> Vec<QMatrix> {
        let m = self.dim();
        let gram = QMatrix::from_fn(m, m, |i, j| trace_of_product(&self.basis[i], &self.basis[j]));
        let k = gram.nullspace();
        (0..k.cols()).map(|j| self.combine(&k.column(j))).collect()
    }

    fn combine(&self, c: &[GaussRat]) -> QMatrix {
        let mut out = QMatrix::zeros(self.d, self.d);
        for (ci, b) in c.iter().zip(&self.basis) {
            if !ci.is_zero() {
                out = out.add(&b.scale(ci));
            }
        }
        out
    }

    fn random_element(&self, rng: &mut ChaCha8Rng) -> QMatrix {
        let c: Vec<GaussRat> =
            (0..self.dim()).map(|_| GaussRat::int(rng.gen_range(-COEFF_RANGE..=COEFF_RANGE))).collect();
        self.combine(&c)
    }
}

fn trace_of_product(a: &QMatrix, b: &QMatrix) -> GaussRat {
    let n = a.rows();
    let mut acc = GaussRat::zero();
    for i in 0..n {
        for k in 0..n {
            let x = &a[(i, k)];
            let y = &b[(k, i)];
            if !x.is_zero() && !y.is_zero() {
                acc += &(x * y);
            }
        }
    }
    acc
}

/// Numeric evidence that an algebra splits over ℂ although not over ℚ(i):
/// an approximate eigenprojector of a generating element.
#[derive(Clone, Debug)]
pub struct NumericWitness {
    /// The irreducible minimal polynomial over ℚ(i) of the generating element
    /// modulo the radical.
    pub polynomial: Polynomial,
    pub eigenvalues: Vec<Complex64>,
    pub projector: CMatrix,
    pub idempotent_residual: f64,
    pub commutator_residual: f64,
}

#[derive(Clone, Debug)]
pub enum IdempotentSearch {
    /// A nontrivial idempotent, exact.
    Found(QMatrix),
    /// The algebra is local over ℚ(i) with a one-dimensional top: no idempotent over ℂ either.
    Local,
    /// Local over ℚ(i), but the top is a proper field extension, so idempotents exist over ℂ.
    SplitsOnlyOverC(NumericWitness),
    Uncertified(String),
}

/// Searches `a` for a nontrivial idempotent.
pub fn find_nontrivial_idempotent(a: &EndAlgebra, seed: u64) -> Result<IdempotentSearch> {
    let m = a.dim();
    if m == 0 {
        return Ok(IdempotentSearch::Local);
    }
    let rad = a.radical();
    let top = m - rad.len();
    if top <= 1 {
        return Ok(IdempotentSearch::Local);
    }
    let d = a.d;
    // Columns: I, then radical elements; membership in F·I + rad is a rank test.
    let mut scalar_plus_rad: Vec<Vec<GaussRat>> = vec![QMatrix::identity(d).entries().to_vec()];
    scalar_plus_rad.extend(rad.iter().map(|r| r.entries().to_vec()));
    let spr = QMatrix::from_cols(d * d, &scalar_plus_rad);
    let spr_rank = spr.rank();
    let rad_flat = QMatrix::from_cols(d * d, &rad.iter().map(|r| r.entries().to_vec()).collect::<Vec<_>>());
    let in_span = |base: &QMatrix, base_rank: usize, x: &QMatrix| {
        let col = QMatrix::from_cols(d * d, &[x.entries().to_vec()]);
        base.hstack(&col).rank() == base_rank
    };
    let in_rad = |x: &QMatrix| x.is_zero() || (!rad.is_empty() && in_span(&rad_flat, rad.len(), x));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<QMatrix> = a.basis.clone();
    for _ in 0..RANDOM_ATTEMPTS {
        candidates.push(a.random_element(&mut rng));
    }
    let products: Vec<QMatrix> = a
        .basis
        .iter()
        .flat_map(|x| a.basis.iter().map(move |y| x.mul(y)))
        .take(64)
        .collect();
    candidates.extend(products);

    let mut field_top: Option<(QMatrix, Polynomial)> = None;
    for x in &candidates {
        if in_span(&spr, spr_rank, x) {
            continue;
        }
        if let Some(e) = split_by_minimal_polynomial(x)? {
            return Ok(IdempotentSearch::Found(e));
        }
        // μ_x = p^k with p not split further.
        let mu = minimal_polynomial(x)?;
        let f = factor_over_gaussian_rationals(&mu)?;
        let p = f.factors.iter().chain(&f.remainder).next().map(|(p, _)| p.clone()).expect("nonconstant");
        let y = p.eval_matrix(x);
        if !in_rad(&y) {
            // y is nilpotent but outside the radical: some y·b has nonzero
            // trace, hence is singular and not nilpotent, so its minimal
            // polynomial z^a·q splits coprimely.
            if let Some(b) = a.basis.iter().find(|b| !trace_of_product(&y, b).is_zero()) {
                if let Some(e) = split_by_minimal_polynomial(&y.mul(b))? {
                    return Ok(IdempotentSearch::Found(e));
                }
            }
            continue;
        }
        if p.degree() == top && p.degree() <= 3 && field_top.is_none() {
            field_top = Some((x.clone(), p));
        }
    }
    if let Some((x, p)) = field_top {
        // ℚ(i)[x̄] has dimension deg p = dim A/rad and p has no root in ℚ(i):
        // the top is the field ℚ(i)[z]/(p).
        return Ok(IdempotentSearch::SplitsOnlyOverC(numeric_witness(&x, p)));
    }
    Ok(IdempotentSearch::Uncertified(format!(
        "no splitting element found among {} candidates in an algebra of dimension {m} with top dimension {top}",
        candidates.len()
    )))
}

/// If the minimal polynomial of `x` has two coprime factors over ℚ(i), returns
/// the spectral idempotent `e = (t·g)(x)` for `μ = f·g`, `s·f + t·g = 1`.
fn split_by_minimal_polynomial(x: &QMatrix) -> Result<Option<QMatrix>> {
    let mu = minimal_polynomial(x)?;
    let pieces = factor_over_gaussian_rationals(&mu)?.coprime_pieces();
    if pieces.len() < 2 {
        return Ok(None);
    }
    let f = &pieces[0];
    let g = mu.div_rem(f).0;
    let (one, _s, t) = f.ext_gcd(&g);
    if one != Polynomial::one() {
        return Err(Error::Invariant("factor pieces of a minimal polynomial are not coprime".into()));
    }
    let poly = t.mul(&g).div_rem(&mu).1;
    let mut e = poly.eval_matrix(x);
    // Exact spectral idempotents are already idempotent; the cubic lift is a
    // safeguard bounded by the nilpotency index.
    for _ in 0..=x.rows() {
        let e2 = e.mul(&e);
        if e2 == e {
            break;
        }
        let e3 = e2.mul(&e);
        e = e2.scale(&GaussRat::int(3)).sub(&e3.scale(&GaussRat::int(2)));
    }
    if e.mul(&e) != e || e.is_zero() || e.is_identity() {
        return Err(Error::Invariant("spectral idempotent construction failed".into()));
    }
    Ok(Some(e))
}

fn numeric_witness(x: &QMatrix, p: Polynomial) -> NumericWitness {
    let n = x.rows();
    let xc = numeric::to_dmatrix(x);
    let roots = p.numeric_roots();
    let r = roots[0];
    let shifted = &xc - DMatrix::<Complex64>::identity(n, n) * r;
    let mut pw = DMatrix::<Complex64>::identity(n, n);
    for _ in 0..n {
        pw = &pw * &shifted;
    }
    let svd = pw.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max).max(1e-300);
    let u = svd.u.unwrap();
    let vt = svd.v_t.unwrap();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].partial_cmp(&svd.singular_values[a]).unwrap());
    let rank = order.iter().filter(|&&k| svd.singular_values[k] > 1e-8 * smax).count();
    // Kernel from right singular vectors with small σ, range from left ones with large σ.
    let mut v = DMatrix::<Complex64>::zeros(n, n);
    let kernel: Vec<usize> = order[rank..].to_vec();
    for (c, &k) in kernel.iter().enumerate() {
        let row = vt.row(k).adjoint();
        v.set_column(c, &row);
    }
    for (c, &k) in order[..rank].iter().enumerate() {
        v.set_column(kernel.len() + c, &u.column(k));
    }
    let mut diag = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..kernel.len() {
        diag[(k, k)] = Complex64::new(1.0, 0.0);
    }
    let proj = match v.clone().try_inverse() {
        Some(vi) => &v * diag * vi,
        None => DMatrix::zeros(n, n),
    };
    let idem = (&proj * &proj - &proj).norm();
    let comm = (&proj * &xc - &xc * &proj).norm();
    NumericWitness {
        polynomial: p,
        eigenvalues: roots,
        projector: numeric::from_dmatrix(&proj),
        idempotent_residual: idem,
        commutator_residual: comm,
    }
}

#[derive(Clone, Debug)]
pub enum LeafStatus {
    /// `End` is local over ℚ(i) with one-dimensional top: indecomposable over ℂ.
    Indecomposable,
    /// Indecomposable over ℚ(i) but decomposable over ℂ.
    SplitsOnlyOverC(NumericWitness),
    Uncertified(String),
}

impl LeafStatus {
    pub fn is_certified(&self) -> bool {
        matches!(self, LeafStatus::Indecomposable)
    }
}

#[derive(Clone, Debug)]
pub struct Leaf {
    pub system: QSystem,
    pub status: LeafStatus,
}

/// `witness · input = ⊕ components` exactly, subspace by subspace.
#[derive(Clone, Debug)]
pub struct DecompositionTree {
    pub components: Vec<Leaf>,
    pub witness: QMatrix,
    /// Idempotents used at each split, in the coordinates of the node being split.
    pub certificates: Vec<QMatrix>,
}

impl DecompositionTree {
    pub fn direct_sum(&self, n: usize) -> QSystem {
        self.components
            .iter()
            .fold(QSystem::zero(n), |acc, l| acc.direct_sum(&l.system).expect("same arity"))
    }

    pub fn all_certified(&self) -> bool {
        self.components.iter().all(|l| l.status.is_certified())
    }
}

/// Splits `s` into `Im e ⊕ Im(I−e)`; returns the change of basis and both parts.
pub fn split_along(s: &QSystem, e: &QMatrix) -> Result<(QMatrix, QSystem, QSystem)> {
    let d = s.ambient_dim();
    let f = QMatrix::identity(d).sub(e);
    let h1 = Subspace::span(e);
    let h2 = Subspace::span(&f);
    let k1 = h1.dim();
    let p = h1.basis().hstack(h2.basis());
    let w = p.inverse()?;
    let part = |proj: &QMatrix, rows: std::ops::Range<usize>| -> Vec<Subspace<GaussRat>> {
        s.subspaces()
            .iter()
            .map(|sub| {
                let img = w.mul(&proj.mul(sub.basis()));
                Subspace::span(&img.submatrix(rows.clone(), 0..img.cols()))
            })
            .collect()
    };
    let s1 = QSystem::new(k1, part(e, 0..k1))?;
    let s2 = QSystem::new(d - k1, part(&f, k1..d))?;
    Ok((w, s1, s2))
}

/// Recursive decomposition into indecomposable summands with an exact witness.
pub fn decompose(s: &QSystem, seed: u64) -> Result<DecompositionTree> {
    let tree = decompose_rec(s, seed)?;
    if s.transform(&tree.witness)? != tree.direct_sum(s.n()) {
        return Err(Error::Invariant("decomposition witness does not verify".into()));
    }
    Ok(tree)
}

fn decompose_rec(s: &QSystem, seed: u64) -> Result<DecompositionTree> {
    let d = s.ambient_dim();
    if d == 0 {
        return Ok(DecompositionTree { components: vec![], witness: QMatrix::identity(0), certificates: vec![] });
    }
    let status = match find_nontrivial_idempotent(&EndAlgebra::of_system(s), seed)? {
        IdempotentSearch::Found(e) => {
            let (w, s1, s2) = split_along(s, &e)?;
            let t1 = decompose_rec(&s1, seed.wrapping_add(1))?;
            let t2 = decompose_rec(&s2, seed.wrapping_add(2))?;
            let witness = t1.witness.block_diag(&t2.witness).mul(&w);
            let mut components = t1.components;
            components.extend(t2.components);
            let mut certificates = vec![e];
            certificates.extend(t1.certificates);
            certificates.extend(t2.certificates);
            return Ok(DecompositionTree { components, witness, certificates });
        }
        IdempotentSearch::Local => LeafStatus::Indecomposable,
        IdempotentSearch::SplitsOnlyOverC(w) => LeafStatus::SplitsOnlyOverC(w),
        IdempotentSearch::Uncertified(msg) => LeafStatus::Uncertified(msg),
    };
    Ok(DecompositionTree {
        components: vec![Leaf { system: s.clone(), status }],
        witness: QMatrix::identity(d),
        certificates: vec![],
    })
}

/// Indecomposable over ℂ (certified).
pub fn is_indecomposable(s: &QSystem, seed: u64) -> Result<bool> {
    match find_nontrivial_idempotent(&EndAlgebra::of_system(s), seed)? {
        IdempotentSearch::Local => Ok(s.ambient_dim() > 0),
        IdempotentSearch::Found(_) | IdempotentSearch::SplitsOnlyOverC(_) => Ok(false),
        IdempotentSearch::Uncertified(m) => Err(Error::Uncertified(m)),
    }
}

#[derive(Clone, Debug)]
pub enum Isomorphism {
    /// An exact invertible witness `W` with `W(Eᵢ) = Fᵢ`.
    Witness(QMatrix),
    /// Certified non-isomorphic, with the reason.
    NotIsomorphic(String),
    Undecided(String),
}

impl Isomorphism {
    pub fn witness(&self) -> Option<&QMatrix> {
        match self {
            Isomorphism::Witness(w) => Some(w),
            _ => None,
        }
    }
}

/// Cheap invariants that isomorphic systems share.
fn invariant_mismatch(s: &QSystem, t: &QSystem) -> Option<String> {
    if s.ambient_dim() != t.ambient_dim() {
        return Some(format!("ambient dimensions {} and {}", s.ambient_dim(), t.ambient_dim()));
    }
    if s.dims() != t.dims() {
        return Some(format!("subspace dimensions {:?} and {:?}", s.dims(), t.dims()));
    }
    let n = s.n();
    for i in 0..n {
        for j in i + 1..n {
            let a = s.subspace(i).intersect(s.subspace(j)).map(|x| x.dim()).unwrap_or(0);
            let b = t.subspace(i).intersect(t.subspace(j)).map(|x| x.dim()).unwrap_or(0);
            if a != b {
                return Some(format!("dim(E{}∩E{}) is {a} versus {b}", i + 1, j + 1));
            }
        }
    }
    None
}

fn search_invertible(h: &HomBasis<GaussRat>, s: &QSystem, t: &QSystem, seed: u64) -> Option<QMatrix> {
    for a in &h.basis {
        if a.is_invertible() && s.is_isomorphism(t, a) {
            return Some(a.clone());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_ATTEMPTS {
        let c: Vec<GaussRat> =
            (0..h.dim()).map(|_| GaussRat::int(rng.gen_range(-COEFF_RANGE..=COEFF_RANGE))).collect();
        let a = h.combination(&c);
        if a.is_invertible() && s.is_isomorphism(t, &a) {
            return Some(a);
        }
    }
    None
}

/// Decides `s ≅ t`, returning an exact witness or certified absence when possible.
pub fn are_isomorphic(s: &QSystem, t: &QSystem, seed: u64) -> Result<Isomorphism> {
    if s.n() != t.n() {
        return Err(Error::ArityMismatch(s.n(), t.n()));
    }
    if let Some(reason) = invariant_mismatch(s, t) {
        return Ok(Isomorphism::NotIsomorphic(reason));
    }
    if s.ambient_dim() == 0 {
        return Ok(Isomorphism::Witness(QMatrix::identity(0)));
    }
    let h = hom_space(s, t)?;
    if h.dim() == 0 {
        return Ok(Isomorphism::NotIsomorphic("Hom(S,T) = 0".into()));
    }
    if let Some(w) = search_invertible(&h, s, t, seed) {
        return Ok(Isomorphism::Witness(w));
    }
    let ds = decompose(s, seed)?;
    let dt = decompose(t, seed)?;
    match_summands(s, t, &ds, &dt, seed)
}

/// Isomorphism test between systems with local endomorphism algebras: `X ≅ Y`
/// iff some product `ψⱼφᵢ` (`φ ∈ Hom(X,Y)`, `ψ ∈ Hom(Y,X)`) lies outside
/// `rad End(X)`, in which case `φᵢ` itself is an isomorphism.
pub fn local_isomorphism(x: &QSystem, y: &QSystem, seed: u64) -> Result<Isomorphism> {
    if let Some(reason) = invariant_mismatch(x, y) {
        return Ok(Isomorphism::NotIsomorphic(reason));
    }
    if x.ambient_dim() == 0 {
        return Ok(Isomorphism::Witness(QMatrix::identity(0)));
    }
    let hxy = hom_space(x, y)?;
    if let Some(w) = search_invertible(&hxy, x, y, seed) {
        return Ok(Isomorphism::Witness(w));
    }
    let hyx = hom_space(y, x)?;
    let end = EndAlgebra::of_system(x);
    let rad = end.radical();
    let d = x.ambient_dim();
    let rad_flat = QMatrix::from_cols(d * d, &rad.iter().map(|r| r.entries().to_vec()).collect::<Vec<_>>());
    let rank = rad.len();
    for phi in &hxy.basis {
        for psi in &hyx.basis {
            let prod = psi.mul(phi);
            let col = QMatrix::from_cols(d * d, &[prod.entries().to_vec()]);
            let outside = if rank == 0 { !prod.is_zero() } else { rad_flat.hstack(&col).rank() > rank };
            if outside {
                if phi.is_invertible() && x.is_isomorphism(y, phi) {
                    return Ok(Isomorphism::Witness(phi.clone()));
                }
                return Err(Error::Invariant("split monomorphism between local systems is not invertible".into()));
            }
        }
    }
    Ok(Isomorphism::NotIsomorphic("every composite X→Y→X lies in rad End(X)".into()))
}

fn match_summands(
    s: &QSystem,
    t: &QSystem,
    ds: &DecompositionTree,
    dt: &DecompositionTree,
    seed: u64,
) -> Result<Isomorphism> {
    if let Some(l) = ds.components.iter().chain(&dt.components).find(|l| matches!(l.status, LeafStatus::Uncertified(_))) {
        let LeafStatus::Uncertified(m) = &l.status else { unreachable!() };
        return Ok(Isomorphism::Undecided(format!("summand not certified: {m}")));
    }
    let n = ds.components.len();
    let mut used = vec![false; dt.components.len()];
    let mut assignment = vec![(0usize, QMatrix::identity(0)); n];
    for (i, leaf) in ds.components.iter().enumerate() {
        let mut found = None;
        for (j, other) in dt.components.iter().enumerate() {
            if used[j] {
                continue;
            }
            if let Isomorphism::Witness(w) = local_isomorphism(&leaf.system, &other.system, seed)? {
                found = Some((j, w));
                break;
            }
        }
        match found {
            Some((j, w)) => {
                used[j] = true;
                assignment[i] = (j, w);
            }
            None => {
                return Ok(Isomorphism::NotIsomorphic(format!(
                    "summand {} of the first system has no isomorphic partner",
                    i + 1
                )))
            }
        }
    }
    if used.iter().any(|u| !u) {
        return Ok(Isomorphism::NotIsomorphic("summand multisets differ".into()));
    }
    // Φ maps ⊕X (in s-order) to ⊕Y (in t-order).
    let offsets = |tree: &DecompositionTree| {
        let mut o = vec![0];
        for l in &tree.components {
            o.push(o.last().unwrap() + l.system.ambient_dim());
        }
        o
    };
    let (os, ot) = (offsets(ds), offsets(dt));
    let d = s.ambient_dim();
    let mut phi = QMatrix::zeros(d, d);
    for (i, (j, w)) in assignment.iter().enumerate() {
        for r in 0..w.rows() {
            for c in 0..w.cols() {
                phi[(ot[*j] + r, os[i] + c)] = w[(r, c)].clone();
            }
        }
    }
    let global = dt.witness.inverse()?.mul(&phi).mul(&ds.witness);
    if !s.is_isomorphism(t, &global) {
        return Err(Error::Invariant("assembled isomorphism witness does not verify".into()));
    }
    Ok(Isomorphism::Witness(global))
}

/// `End(S) = ℂ·I`.
pub fn is_transitive(s: &QSystem) -> bool {
    end_space(s).dim() == 1
}

/// No nontrivial idempotent commutes with `t` (over ℂ).
pub fn strongly_irreducible(t: &QMatrix, seed: u64) -> Result<bool> {
    if !t.is_square() {
        return Err(Error::DimensionMismatch("strong irreducibility needs a square matrix".into()));
    }
    match find_nontrivial_idempotent(&EndAlgebra::commutant(t), seed)? {
        IdempotentSearch::Local => Ok(t.rows() > 0),
        IdempotentSearch::Found(_) | IdempotentSearch::SplitsOnlyOverC(_) => Ok(false),
        IdempotentSearch::Uncertified(m) => Err(Error::Uncertified(m)),
    }
}

/// Jordan structure `λ ↦ block sizes (descending)` from rank sequences of `(t − λ)^k`.
pub fn jordan_oracle(t: &QMatrix) -> Result<Vec<(GaussRat, Vec<usize>)>> {
    let n = t.rows();
    let mu = minimal_polynomial(t)?;
    let f = factor_over_gaussian_rationals(&mu)?;
    if !f.splits() {
        return Err(Error::Uncertified(format!("eigenvalues of {mu} are not all in ℚ(i)")));
    }
    let mut out = Vec::new();
    for (lin, _) in &f.factors {
        let lambda = -lin.coeffs()[0].clone();
        let shifted = t.sub(&QMatrix::identity(n).scale(&lambda));
        let mut ranks = vec![n];
        let mut pw = QMatrix::identity(n);
        loop {
            pw = pw.mul(&shifted);
            let r = pw.rank();
            let prev = *ranks.last().unwrap();
            ranks.push(r);
            if r == prev {
                break;
            }
        }
        // #blocks of size ≥ k = r_{k−1} − r_k.
        let at_least: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).collect();
        let mut sizes = Vec::new();
        for k in 0..at_least.len() {
            let next = at_least.get(k + 1).copied().unwrap_or(0);
            for _ in 0..at_least[k] - next {
                sizes.push(k + 1);
            }
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        out.push((lambda, sizes));
    }
    out.sort_by_key(|(l, _)| l.to_string());
    Ok(out)
}

/// Single-operator system `S_T` indecomposable over ℂ.
pub fn single_operator_indecomposable(t: &QMatrix, seed: u64) -> Result<bool> {
    is_indecomposable(&single_operator_system(t)?, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::single_operator_system;

    fn line(v: &[i64]) -> Vec<Vec<GaussRat>> {
        vec![v.iter().map(|&x| GaussRat::int(x)).collect()]
    }

    #[test]
    fn three_independent_lines_decompose() {
        let s = QSystem::from_vectors(3, &[line(&[1, 0, 0]), line(&[0, 1, 0]), line(&[0, 0, 1])]).unwrap();
        let e = find_nontrivial_idempotent(&EndAlgebra::of_system(&s), 0).unwrap();
        assert!(matches!(e, IdempotentSearch::Found(_)));
        let tree = decompose(&s, 0).unwrap();
        assert_eq!(tree.components.len(), 3);
        assert!(tree.all_certified());
    }

    #[test]
    fn s9_is_transitive() {
        let s = QSystem::from_vectors(2, &[line(&[1, 0]), line(&[0, 1]), line(&[1, 1])]).unwrap();
        assert!(matches!(find_nontrivial_idempotent(&EndAlgebra::of_system(&s), 0).unwrap(), IdempotentSearch::Local));
        assert!(is_transitive(&s));
    }

    #[test]
    fn jordan_block_system_is_indecomposable_not_transitive() {
        let j2 = QMatrix::from_i64_rows(&[&[0, 1], &[0, 0]]);
        let s = single_operator_system(&j2).unwrap();
        assert!(is_indecomposable(&s, 1).unwrap());
        assert!(!is_transitive(&s));
    }

    #[test]
    fn strong_irreducibility_examples() {
        let j3 = QMatrix::from_i64_rows(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        assert!(strongly_irreducible(&j3, 0).unwrap());
        let d = QMatrix::from_i64_rows(&[&[0, 0], &[0, 1]]);
        assert!(!strongly_irreducible(&d, 0).unwrap());
        let j25 = QMatrix::from_i64_rows(&[&[5, 1], &[0, 5]]);
        assert!(strongly_irreducible(&j25, 0).unwrap());
    }

    #[test]
    fn jordan_oracle_examples() {
        let j3 = QMatrix::from_i64_rows(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        assert_eq!(jordan_oracle(&j3).unwrap(), vec![(GaussRat::int(0), vec![3])]);
        assert_eq!(jordan_oracle(&QMatrix::identity(2)).unwrap(), vec![(GaussRat::int(1), vec![1, 1])]);
        // companion of (z−1)²(z−2) = z³ − 4z² + 5z − 2
        let c = QMatrix::from_i64_rows(&[&[0, 0, 2], &[1, 0, -5], &[0, 1, 4]]);
        assert_eq!(
            jordan_oracle(&c).unwrap(),
            vec![(GaussRat::int(1), vec![2]), (GaussRat::int(2), vec![1])]
        );
    }

    #[test]
    fn irrational_spectrum_splits_only_over_c() {
        // T with eigenvalues ±√2: S_T is indecomposable over ℚ(i) only.
        let t = QMatrix::from_i64_rows(&[&[0, 2], &[1, 0]]);
        let s = single_operator_system(&t).unwrap();
        let tree = decompose(&s, 0).unwrap();
        assert_eq!(tree.components.len(), 1);
        let LeafStatus::SplitsOnlyOverC(w) = &tree.components[0].status else { panic!("{:?}", tree.components[0].status) };
        assert!(w.idempotent_residual < 1e-8);
        assert!(w.commutator_residual < 1e-8);
        assert!(!strongly_irreducible(&t, 0).unwrap());
    }

    #[test]
    fn isomorphism_of_two_line_pairs() {
        // (ℂ²; ℂ(1,0), ℂ(3,4)) ≅ (ℂ²; ℂ(1,0), ℂ(0,1))
        let a = QSystem::from_vectors(2, &[line(&[1, 0]), line(&[3, 4])]).unwrap();
        let b = QSystem::from_vectors(2, &[line(&[1, 0]), line(&[0, 1])]).unwrap();
        let iso = are_isomorphic(&a, &b, 7).unwrap();
        let w = iso.witness().expect("isomorphic");
        assert!(a.is_isomorphism(&b, w));
    }
}
