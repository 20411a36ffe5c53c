//! Sweeps over the catalogs and seeded random systems: identification of
//! indecomposable summands with catalog entries, defect and duality checks,
//! and the strong-irreducibility oracle comparison.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::catalog::{self, CatalogKey, Gp4Family};
use crate::coxeter::{check_duality, phi_plus, DualityReport};
use crate::decompose::{
    are_isomorphic, decompose, jordan_oracle, single_operator_indecomposable, strongly_irreducible, Isomorphism,
    Leaf, LeafStatus,
};
use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::scalar::{Field, GaussRat};
use crate::subspace::Subspace;
use crate::system::QSystem;

/// The λ values used by the GP sweeps.
pub fn sweep_lambdas() -> Vec<GaussRat> {
    vec![GaussRat::int(2), GaussRat::int(-1), GaussRat::gaussian(3, 1), GaussRat::ratio(1, 2)]
}

// ---------------------------------------------------------------------------
// Random inputs

/// Entries of random vectors: mostly small integers, with `i` and `1/2` mixed in.
fn random_entry(rng: &mut ChaCha8Rng) -> GaussRat {
    match rng.gen_range(0..10) {
        0..=3 => GaussRat::zero(),
        4 | 5 => GaussRat::one(),
        6 => GaussRat::int(-1),
        7 => GaussRat::int(2),
        8 => GaussRat::i(),
        _ => GaussRat::ratio(1, 2),
    }
}

/// A random system of `n` subspaces in `ℂ^d`, `1 ≤ d ≤ max_dim`; each subspace is
/// spanned by a random number (up to `d`) of random sparse vectors.
pub fn random_system(rng: &mut ChaCha8Rng, n: usize, max_dim: usize) -> QSystem {
    let d = rng.gen_range(1..=max_dim.max(1));
    let subspaces = (0..n)
        .map(|_| {
            let k = rng.gen_range(0..=d);
            let vs: Vec<Vec<GaussRat>> = (0..k).map(|_| (0..d).map(|_| random_entry(rng)).collect()).collect();
            Subspace::span_vectors(d, &vs)
        })
        .collect();
    QSystem::new(d, subspaces).expect("subspaces live in ℂ^d")
}

/// Random invertible matrix with small Gaussian-integer entries.
pub fn random_invertible(rng: &mut ChaCha8Rng, d: usize) -> QMatrix {
    loop {
        let p = QMatrix::from_fn(d, d, |_, _| GaussRat::gaussian(rng.gen_range(-2..=2), rng.gen_range(-1..=1)));
        if p.is_invertible() {
            return p;
        }
    }
}

/// `L·U` with unit-triangular factors and small Gaussian-integer entries, so
/// that both it and its inverse have Gaussian-integer entries.
pub fn random_unimodular(rng: &mut ChaCha8Rng, d: usize) -> QMatrix {
    let mut entry = |i: usize, j: usize, lower: bool| match (i == j, (i > j) == lower) {
        (true, _) => GaussRat::one(),
        (false, true) => GaussRat::gaussian(rng.gen_range(-1..=1), rng.gen_range(-1..=1)),
        (false, false) => GaussRat::zero(),
    };
    let l = QMatrix::from_fn(d, d, |i, j| entry(i, j, true));
    let u = QMatrix::from_fn(d, d, |i, j| entry(i, j, false));
    l.mul(&u)
}

// ---------------------------------------------------------------------------
// Identification of summands

#[derive(Clone, Debug)]
pub enum LeafMatch {
    /// `witness` maps the summand onto `key.build()`.
    Catalog { key: CatalogKey, witness: QMatrix },
    /// Indecomposable over ℚ(i) only; the eigenvalues of the splitting element
    /// explain the further splitting over ℂ.
    OverC { eigenvalues: Vec<Complex64>, residual: f64, note: String },
    Unmatched(String),
}

impl LeafMatch {
    pub fn is_match(&self) -> bool {
        matches!(self, LeafMatch::Catalog { .. })
    }
}

fn index_variants(family: Gp4Family) -> Vec<Vec<usize>> {
    match family.arity() {
        1 => (1..=4).map(|i| vec![i]).collect(),
        2 => (1..=4).flat_map(|i| (i + 1..=4).map(move |j| vec![i, j])).collect(),
        _ => vec![vec![]],
    }
}

/// Catalog entries with the same arity, ambient dimension and defect as `s`.
pub fn candidates(s: &QSystem) -> Result<Vec<CatalogKey>> {
    let d = s.ambient_dim();
    if s.n() != 4 {
        return Ok(catalog::small_catalog(s.n()));
    }
    let rho = s.defect()?.defect;
    if !rho.is_integer() {
        return Ok(vec![]);
    }
    let (even, k) = (d.is_multiple_of(2), d / 2);
    let mut out = Vec::new();
    for family in Gp4Family::ALL {
        if family.is_even() != even || k < family.min_k() || family.defect() != *rho.numer() {
            continue;
        }
        if family == Gp4Family::EvenLambda {
            // S(2k,0;λ) = S_{T,I} with T ~ J_k(λ); any S_{T,S} isomorphic to it has TS ~ J_k(λ).
            if let Some(op) = s.as_bounded_operator_system()? {
                if op.t.rows() == k && op.t.cols() == k {
                    if let Ok(jordan) = jordan_oracle(&op.t.mul(&op.s)) {
                        out.extend(
                            jordan
                                .into_iter()
                                .filter(|(l, _)| !l.is_zero() && !l.is_one())
                                .map(|(l, _)| CatalogKey::gp4_lambda(k, l)),
                        );
                    }
                }
            }
            continue;
        }
        out.extend(index_variants(family).into_iter().map(|idx| CatalogKey::gp4_indexed(family, k, idx)));
    }
    Ok(out)
}

/// Finds the catalog entry isomorphic to an indecomposable `s`.
pub fn identify(s: &QSystem, seed: u64) -> Result<LeafMatch> {
    let mut undecided = Vec::new();
    for key in candidates(s)? {
        let target = key.build()?;
        if target.dims() != s.dims() || target.ambient_dim() != s.ambient_dim() {
            continue;
        }
        match are_isomorphic(s, &target, seed)? {
            Isomorphism::Witness(w) if s.is_isomorphism(&target, &w) => {
                return Ok(LeafMatch::Catalog { key, witness: w });
            }
            Isomorphism::Witness(_) => undecided.push(format!("{key}: witness failed to verify")),
            Isomorphism::Undecided(why) => undecided.push(format!("{key}: {why}")),
            Isomorphism::NotIsomorphic(_) => {}
        }
    }
    let why = if undecided.is_empty() { "no catalog entry matches".to_string() } else { undecided.join("; ") };
    Ok(LeafMatch::Unmatched(format!("dims {:?} in ℂ^{}: {why}", s.dims(), s.ambient_dim())))
}

pub fn identify_leaf(leaf: &Leaf, seed: u64) -> Result<LeafMatch> {
    match &leaf.status {
        LeafStatus::Indecomposable => identify(&leaf.system, seed),
        LeafStatus::SplitsOnlyOverC(w) => Ok(LeafMatch::OverC {
            eigenvalues: w.eigenvalues.clone(),
            residual: w.idempotent_residual.max(w.commutator_residual),
            note: format!("End has an element with irreducible minimal polynomial {} over ℚ(i)", w.polynomial),
        }),
        LeafStatus::Uncertified(why) => Ok(LeafMatch::Unmatched(format!("uncertified leaf: {why}"))),
    }
}

#[derive(Clone, Debug)]
pub struct SystemClassification {
    pub seed: u64,
    pub system: QSystem,
    pub leaves: Vec<(QSystem, LeafMatch)>,
}

#[derive(Clone, Debug)]
pub struct ClassificationSweep {
    pub n: usize,
    pub max_dim: usize,
    pub seed: u64,
    pub systems: Vec<SystemClassification>,
}

impl ClassificationSweep {
    fn leaf_matches(&self) -> impl Iterator<Item = &LeafMatch> {
        self.systems.iter().flat_map(|s| s.leaves.iter().map(|(_, m)| m))
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_matches().count()
    }

    pub fn matched(&self) -> usize {
        self.leaf_matches().filter(|m| m.is_match()).count()
    }

    pub fn over_c(&self) -> usize {
        self.leaf_matches().filter(|m| matches!(m, LeafMatch::OverC { .. })).count()
    }

    pub fn unmatched(&self) -> Vec<String> {
        self.leaf_matches()
            .filter_map(|m| match m {
                LeafMatch::Unmatched(why) => Some(why.clone()),
                _ => None,
            })
            .collect()
    }

    /// Summand counts per catalog type (GP4 entries by family name).
    pub fn histogram(&self) -> BTreeMap<String, usize> {
        let mut h = BTreeMap::new();
        for m in self.leaf_matches() {
            let name = match m {
                LeafMatch::Catalog { key: CatalogKey::Gp4 { family, .. }, .. } => family.name().to_string(),
                LeafMatch::Catalog { key, .. } => key.to_string(),
                LeafMatch::OverC { .. } => "over-C".to_string(),
                LeafMatch::Unmatched(_) => "unmatched".to_string(),
            };
            *h.entry(name).or_insert(0) += 1;
        }
        h
    }
}

/// Decomposes one system and identifies every summand; the decomposition
/// witness is checked inside [`decompose`].
pub fn classify_system(s: &QSystem, seed: u64) -> Result<Vec<(QSystem, LeafMatch)>> {
    decompose(s, seed)?
        .components
        .iter()
        .map(|leaf| Ok((leaf.system.clone(), identify_leaf(leaf, seed)?)))
        .collect()
}

/// `count` random `n`-subspace systems (system `i` drawn with seed `seed + i`).
pub fn classification_sweep(n: usize, count: usize, max_dim: usize, seed: u64) -> Result<ClassificationSweep> {
    let systems = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let s_seed = seed.wrapping_add(i);
            let system = random_system(&mut ChaCha8Rng::seed_from_u64(s_seed), n, max_dim);
            let leaves = classify_system(&system, s_seed)?;
            Ok(SystemClassification { seed: s_seed, system, leaves })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassificationSweep { n, max_dim, seed, systems })
}

// ---------------------------------------------------------------------------
// Catalog sweeps

#[derive(Clone, Debug)]
pub struct DefectItem {
    pub key: CatalogKey,
    pub ambient_dim: usize,
    pub expected: i64,
    pub computed: Rational64,
}

impl DefectItem {
    pub fn ok(&self) -> bool {
        self.computed == Rational64::from_integer(self.expected)
    }
}

/// Defect of every GP4 entry against its family label.
pub fn gp_range(k_even: usize, k_odd: usize, lambdas: &[GaussRat]) -> Result<Vec<DefectItem>> {
    catalog::gp4_keys(k_even, k_odd, lambdas)
        .into_par_iter()
        .map(|key| {
            let CatalogKey::Gp4 { family, .. } = &key else { unreachable!("gp4_keys yields GP4 keys") };
            let s = key.build()?;
            Ok(DefectItem { expected: family.defect(), ambient_dim: s.ambient_dim(), computed: s.defect()?.defect, key })
        })
        .collect()
}

/// The GP4 (`k ≤ k_max`), three-, two- and one-subspace catalogs.
pub fn full_catalog(k_max: usize) -> Vec<CatalogKey> {
    let mut keys = catalog::gp4_keys(k_max, k_max, &sweep_lambdas());
    for n in [3, 2, 1] {
        keys.extend(catalog::small_catalog(n));
    }
    keys
}

#[derive(Clone, Debug)]
pub struct IndecomposableItem {
    pub key: CatalogKey,
    pub leaves: usize,
    pub certified: bool,
}

impl IndecomposableItem {
    pub fn ok(&self) -> bool {
        self.leaves == 1 && self.certified
    }
}

pub fn catalog_indecomposable(keys: &[CatalogKey], seed: u64) -> Result<Vec<IndecomposableItem>> {
    keys.par_iter()
        .map(|key| {
            let tree = decompose(&key.build()?, seed)?;
            Ok(IndecomposableItem { key: key.clone(), leaves: tree.components.len(), certified: tree.all_certified() })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Coxeter functors

#[derive(Clone, Debug)]
pub struct CoxeterItem {
    pub label: String,
    pub report: DualityReport,
    /// `dim(E₁⁺∩E₂⁺) = dim(E₃∩E₄)`, four subspaces only.
    pub intersection_dims: Option<(usize, usize)>,
}

impl CoxeterItem {
    pub fn ok(&self) -> bool {
        self.report.passed()
            && (!self.report.reduced_above || self.report.witness.is_some())
            && self.intersection_dims.is_none_or(|(a, b)| a == b)
    }
}

fn coxeter_item(label: String, s: &QSystem, seed: u64) -> Result<CoxeterItem> {
    let report = check_duality(s, seed)?;
    let intersection_dims = if s.n() == 4 {
        let plus = phi_plus(s)?.system;
        Some((plus.subspace(0).intersect(plus.subspace(1))?.dim(), s.subspace(2).intersect(s.subspace(3))?.dim()))
    } else {
        None
    };
    Ok(CoxeterItem { label, report, intersection_dims })
}

pub fn coxeter_catalog(keys: &[CatalogKey], seed: u64) -> Result<Vec<CoxeterItem>> {
    keys.par_iter().map(|key| coxeter_item(key.to_string(), &key.build()?, seed)).collect()
}

/// The first `count` random four-subspace systems that are reduced from above.
pub fn coxeter_random(count: usize, max_dim: usize, seed: u64) -> Result<Vec<CoxeterItem>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut systems = Vec::with_capacity(count);
    let mut draws = 0usize;
    while systems.len() < count {
        draws += 1;
        if draws > 10_000 * count.max(1) {
            return Err(Error::Uncertified("too few random systems are reduced from above".into()));
        }
        let s = random_system(&mut rng, 4, max_dim);
        if s.reduced_above() {
            systems.push(s);
        }
    }
    systems
        .par_iter()
        .enumerate()
        .map(|(i, s)| coxeter_item(format!("random #{i}"), s, seed.wrapping_add(i as u64)))
        .collect()
}

// ---------------------------------------------------------------------------
// Strong irreducibility

#[derive(Clone, Debug)]
pub struct JordanCase {
    /// Planted Jordan data: `(λ, block size)` pairs.
    pub blocks: Vec<(GaussRat, usize)>,
    pub matrix: QMatrix,
    pub strongly_irreducible: bool,
    /// A single Jordan block according to the rank-sequence oracle.
    pub single_block: bool,
    pub system_indecomposable: bool,
}

impl JordanCase {
    pub fn agrees(&self) -> bool {
        self.strongly_irreducible == self.single_block
            && self.single_block == self.system_indecomposable
            && self.single_block == (self.blocks.len() == 1)
    }
}

/// Random `P·J·P⁻¹` (`P` unimodular) of size ≤ `max_dim`; about half the cases are a single block.
pub fn random_jordan(rng: &mut ChaCha8Rng, max_dim: usize) -> (Vec<(GaussRat, usize)>, QMatrix) {
    let eig = [
        GaussRat::zero(),
        GaussRat::one(),
        GaussRat::int(-2),
        GaussRat::i(),
        GaussRat::gaussian(1, 1),
        GaussRat::ratio(1, 2),
    ];
    let d = rng.gen_range(1..=max_dim);
    let mut blocks = Vec::new();
    if rng.gen_bool(0.5) {
        blocks.push((eig.choose(rng).expect("nonempty").clone(), d));
    } else {
        let mut left = d;
        while left > 0 {
            let size = rng.gen_range(1..=left);
            blocks.push((eig.choose(rng).expect("nonempty").clone(), size));
            left -= size;
        }
    }
    let j = blocks
        .iter()
        .map(|(l, n)| catalog::jordan_block(*n, l))
        .reduce(|a, b| a.block_diag(&b))
        .expect("d ≥ 1");
    let p = random_unimodular(rng, d);
    let t = p.mul(&j).mul(&p.inverse().expect("invertible"));
    (blocks, t)
}

pub fn strong_irreducibility_sweep(count: usize, max_dim: usize, seed: u64) -> Result<Vec<JordanCase>> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i);
            let (blocks, matrix) = random_jordan(&mut ChaCha8Rng::seed_from_u64(s), max_dim);
            let jordan = jordan_oracle(&matrix)?;
            Ok(JordanCase {
                single_block: jordan.len() == 1 && jordan[0].1.len() == 1,
                strongly_irreducible: strongly_irreducible(&matrix, s)?,
                system_indecomposable: single_operator_indecomposable(&matrix, s)?,
                blocks,
                matrix,
            })
        })
        .collect()
}
