//! The functors Φ⊥, Φ⁺, Φ⁻, Φ⁰ on systems of subspaces, with duality checks.

use crate::decompose::{are_isomorphic, is_indecomposable, Isomorphism};
use crate::error::Result;
use crate::matrix::{Matrix, QMatrix};
use crate::scalar::Field;
use crate::subspace::Subspace;
use crate::system::{QSystem, SubspaceSystem};

/// Image of a Coxeter functor together with the data used to build it.
#[derive(Clone, Debug)]
pub struct CoxeterResult<F: Field> {
    pub system: SubspaceSystem<F>,
    /// Basis `N` of `H⁺ = Ker τ` inside `R = ⊕ Eᵢ`, in block coordinates of the `Eᵢ` bases.
    pub kernel_basis: Matrix<F>,
    /// Row offsets of each block of `R` inside `kernel_basis`.
    pub block_offsets: Vec<usize>,
    /// Gram matrix of the coordinates of `H⁺` (inner product inherited from `R`).
    pub gram: Matrix<F>,
}

/// `Φ⊥`: orthocomplement every subspace.
pub fn phi_perp<F: Field>(s: &SubspaceSystem<F>) -> SubspaceSystem<F> {
    s.orthocomplement()
}

fn offsets<F: Field>(s: &SubspaceSystem<F>) -> Vec<usize> {
    let mut out = vec![0];
    for d in s.dims() {
        out.push(out.last().unwrap() + d);
    }
    out
}

/// `τ = [B₁ … B_n] : R → H`.
pub fn tau<F: Field>(s: &SubspaceSystem<F>) -> Matrix<F> {
    s.subspaces()
        .iter()
        .fold(Matrix::zeros(s.ambient_dim(), 0), |acc, e| acc.hstack(e.basis()))
}

/// `Gram(R) = blockdiag(BᵢᴴBᵢ)`.
fn r_gram<F: Field>(s: &SubspaceSystem<F>) -> Matrix<F> {
    s.subspaces()
        .iter()
        .fold(Matrix::zeros(0, 0), |acc, e| acc.block_diag(&e.basis().adjoint().mul(e.basis())))
}

fn kernel_data<F: Field>(s: &SubspaceSystem<F>) -> (Matrix<F>, Vec<usize>, Matrix<F>) {
    let off = offsets(s);
    let n = tau(s).nullspace();
    let g = n.adjoint().mul(&r_gram(s)).mul(&n);
    (n, off, g)
}

/// `Φ⁺`: `H⁺ = Ker τ` in kernel-basis coordinates, `E_k⁺ = {c : block k of N·c = 0}`.
pub fn phi_plus<F: Field>(s: &SubspaceSystem<F>) -> Result<CoxeterResult<F>> {
    let (n, off, gram) = kernel_data(s);
    let h = n.cols();
    let subspaces = (0..s.n())
        .map(|k| {
            if h == 0 {
                return Subspace::zero(0);
            }
            let block = n.submatrix(off[k]..off[k + 1], 0..h);
            if block.rows() == 0 {
                Subspace::full(h)
            } else {
                Subspace::span(&block.nullspace())
            }
        })
        .collect();
    Ok(CoxeterResult { system: SubspaceSystem::new(h, subspaces)?, kernel_basis: n, block_offsets: off, gram })
}

/// `Φ⁻ = Φ⊥Φ⁺Φ⊥`.
pub fn phi_minus<F: Field>(s: &SubspaceSystem<F>) -> Result<CoxeterResult<F>> {
    let mut r = phi_plus(&phi_perp(s))?;
    r.system = phi_perp(&r.system);
    Ok(r)
}

/// `Φ⁰`: `E_k⁰` is the orthogonal projection of `0⊕E_k⊕0` onto `H⁰ = Ker τ`.
///
/// The result is expressed in the coordinates of `kernel_basis`, whose inner
/// product is `gram`; [`perp_with_gram`] is the matching orthocomplement.
pub fn phi_zero<F: Field>(s: &SubspaceSystem<F>) -> Result<CoxeterResult<F>> {
    let (n, off, gram) = kernel_data(s);
    let h = n.cols();
    let subspaces = if h == 0 {
        vec![Subspace::zero(0); s.n()]
    } else {
        // Projection of v ∈ R onto span N has coordinates G⁻¹NᴴG_R v.
        let ginv = gram.inverse()?;
        let proj = ginv.mul(&n.adjoint()).mul(&r_gram(s));
        (0..s.n())
            .map(|k| {
                let cols = proj.submatrix(0..h, off[k]..off[k + 1]);
                Subspace::span(&cols)
            })
            .collect()
    };
    Ok(CoxeterResult { system: SubspaceSystem::new(h, subspaces)?, kernel_basis: n, block_offsets: off, gram })
}

/// Orthocomplements taken with respect to the inner product `⟨x,y⟩ = xᴴ·gram·y`.
pub fn perp_with_gram<F: Field>(s: &SubspaceSystem<F>, gram: &Matrix<F>) -> Result<SubspaceSystem<F>> {
    let subs = s
        .subspaces()
        .iter()
        .map(|e| Subspace::span(&gram.mul(e.basis())).orthocomplement())
        .collect();
    SubspaceSystem::new(s.ambient_dim(), subs)
}

/// Cross-checks [`phi_zero`] against `p₀(a) = (a_k − e_k f⁻¹ τ(a))_k` with
/// `f = Σ eᵢ`. Returns `None` when `f` is singular.
pub fn p0_formula_agrees(s: &QSystem) -> Result<Option<bool>> {
    let projections: Vec<QMatrix> = s.subspaces().iter().map(|e| e.projection()).collect();
    let d = s.ambient_dim();
    let f = projections.iter().fold(QMatrix::zeros(d, d), |acc, p| acc.add(p));
    let Ok(finv) = f.inverse() else { return Ok(None) };
    let zero = phi_zero(s)?;
    let n = &zero.kernel_basis;
    for k in 0..s.n() {
        let bk = s.subspace(k).basis();
        for c in 0..bk.cols() {
            let a = bk.select_cols(&[c]);
            let y = finv.mul(&a);
            // Block i of p₀(a): δ_{ik}a − eᵢ f⁻¹ a, as a vector of ℂ^d.
            let blocks: Vec<QMatrix> = (0..s.n())
                .map(|i| {
                    let corr = projections[i].mul(&y);
                    if i == k { a.sub(&corr) } else { corr.neg() }
                })
                .collect();
            // Same vector from the Φ⁰ coordinates.
            let target = &zero.system.subspace(k);
            let mut matched = false;
            if target.is_zero() {
                matched = blocks.iter().all(|b| b.is_zero());
            } else if let Some(coeff) = solve_blocks(s, n, &zero.block_offsets, &blocks) {
                matched = target.contains_vector(&coeff);
            }
            if !matched {
                return Ok(Some(false));
            }
        }
    }
    Ok(Some(true))
}

/// Finds `c` with `Bᵢ·(block i of N c) = vᵢ` for all `i`.
fn solve_blocks(
    s: &QSystem,
    n: &QMatrix,
    off: &[usize],
    blocks: &[QMatrix],
) -> Option<Vec<crate::scalar::GaussRat>> {
    let h = n.cols();
    let mut lhs = QMatrix::zeros(0, h);
    let mut rhs = QMatrix::zeros(0, 1);
    for (i, v) in blocks.iter().enumerate() {
        let bi = s.subspace(i).basis();
        lhs = lhs.vstack(&bi.mul(&n.submatrix(off[i]..off[i + 1], 0..h)));
        rhs = rhs.vstack(v);
    }
    lhs.solve(&rhs).map(|x| x.column(0))
}

/// Outcome of one clause of a duality check.
#[derive(Clone, Debug, PartialEq)]
pub enum Clause {
    Skipped,
    Passed,
    Failed(String),
}

impl Clause {
    pub fn is_ok(&self) -> bool {
        !matches!(self, Clause::Failed(_))
    }

    fn from_bool(ok: bool, why: &str) -> Self {
        if ok { Clause::Passed } else { Clause::Failed(why.to_string()) }
    }
}

#[derive(Clone, Debug)]
pub struct DualityReport {
    pub reduced_above: bool,
    pub reduced_below: bool,
    /// `Φ⁻Φ⁺(S) ≅ S`, required when reduced from above.
    pub minus_plus: Clause,
    /// `Φ⁺Φ⁻(S) ≅ S`, required when reduced from below.
    pub plus_minus: Clause,
    /// `ρ(Φ⁺S) = ρ(S)` for four subspaces reduced from above.
    pub defect_plus: Clause,
    /// `ρ(Φ⁻S) = ρ(S)` for four subspaces reduced from below.
    pub defect_minus: Clause,
    /// `Φ⁺S` indecomposable when `S` is, `S` is reduced from above and `Φ⁺S` from below.
    pub plus_indecomposable: Clause,
    /// The mirror statement for `Φ⁻`.
    pub minus_indecomposable: Clause,
    /// The isomorphism `Φ⁻Φ⁺(S) → S`, when found.
    pub witness: Option<QMatrix>,
}

impl DualityReport {
    pub fn passed(&self) -> bool {
        [
            &self.minus_plus,
            &self.plus_minus,
            &self.defect_plus,
            &self.defect_minus,
            &self.plus_indecomposable,
            &self.minus_indecomposable,
        ]
        .iter()
        .all(|c| c.is_ok())
    }
}

fn iso_clause(a: &QSystem, b: &QSystem, seed: u64) -> Result<(Clause, Option<QMatrix>)> {
    Ok(match are_isomorphic(a, b, seed)? {
        Isomorphism::Witness(w) => {
            if a.is_isomorphism(b, &w) {
                (Clause::Passed, Some(w))
            } else {
                (Clause::Failed("witness does not verify".into()), None)
            }
        }
        Isomorphism::NotIsomorphic(why) => (Clause::Failed(format!("not isomorphic: {why}")), None),
        Isomorphism::Undecided(why) => (Clause::Failed(format!("undecided: {why}")), None),
    })
}

pub fn check_duality(s: &QSystem, seed: u64) -> Result<DualityReport> {
    let above = s.reduced_above();
    let below = s.reduced_below();
    let plus = phi_plus(s)?.system;
    let minus = phi_minus(s)?.system;
    let four = s.n() == 4;

    let (minus_plus, witness) = if above {
        iso_clause(&phi_minus(&plus)?.system, s, seed)?
    } else {
        (Clause::Skipped, None)
    };
    let plus_minus = if below { iso_clause(&phi_plus(&minus)?.system, s, seed)?.0 } else { Clause::Skipped };
    let defect_plus = if four && above {
        Clause::from_bool(plus.defect()?.defect == s.defect()?.defect, "ρ(Φ⁺S) ≠ ρ(S)")
    } else {
        Clause::Skipped
    };
    let defect_minus = if four && below {
        Clause::from_bool(minus.defect()?.defect == s.defect()?.defect, "ρ(Φ⁻S) ≠ ρ(S)")
    } else {
        Clause::Skipped
    };
    let indecomposable = !s.is_zero() && is_indecomposable(s, seed)?;
    let plus_indecomposable = if indecomposable && above && plus.reduced_below() {
        Clause::from_bool(is_indecomposable(&plus, seed)?, "Φ⁺S decomposes")
    } else {
        Clause::Skipped
    };
    let minus_indecomposable = if indecomposable && below && minus.reduced_above() {
        Clause::from_bool(is_indecomposable(&minus, seed)?, "Φ⁻S decomposes")
    } else {
        Clause::Skipped
    };
    Ok(DualityReport {
        reduced_above: above,
        reduced_below: below,
        minus_plus,
        plus_minus,
        defect_plus,
        defect_minus,
        plus_indecomposable,
        minus_indecomposable,
        witness,
    })
}
