//! Banded (block-)Toeplitz operators on ℓ²(ℕ): Fredholm index from the symbol,
//! kernel dimensions, the quasi-Fredholm defect of single-operator systems,
//! and the truncation lab for the exotic systems `S_γ`.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};

use crate::catalog::parse_matrix;
use crate::error::{Error, ParseError, Result};
use crate::matrix::QMatrix;
use crate::numeric::{singular_values, to_dmatrix};
use crate::poly::{square_free_decomposition, Polynomial};
use crate::scalar::{Field, GaussRat};
use crate::subspace::{Subspace, ANGLE_THRESHOLD};
use crate::system::{IntersectionDiagram, QSystem};

/// Smallest grid accepted by [`fredholm_index`].
pub const MIN_GRID: usize = 256;
/// Default truncation size for the kernel oracle.
pub const ORACLE_N: usize = 200;
const MAX_GRID: usize = 1 << 20;
const MAX_ORACLE_N: usize = 1200;
const CIRCLE_TOL: f64 = 1e-9;

/// `a(z) = Σ_k a_k z^k` with `n × n` coefficients; the Toeplitz operator acts by
/// `(Tx)_i = Σ_k a_k x_{i−k}`, so `z` is the unilateral shift `S` and `z⁻¹` is `S*`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSymbol {
    block: usize,
    coeffs: BTreeMap<i64, QMatrix>,
}

impl LaurentSymbol {
    pub fn new(block: usize, coeffs: BTreeMap<i64, QMatrix>) -> Result<Self> {
        if block == 0 {
            return Err(Error::InvalidParameter("block size must be positive".into()));
        }
        if coeffs.values().any(|m| m.rows() != block || m.cols() != block) {
            return Err(Error::DimensionMismatch(format!("symbol coefficients must be {block}×{block}")));
        }
        let coeffs: BTreeMap<i64, QMatrix> = coeffs.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        if coeffs.is_empty() {
            return Err(Error::DegenerateSymbol);
        }
        Ok(LaurentSymbol { block, coeffs })
    }

    /// Scalar symbol from `(offset, coefficient)` pairs.
    pub fn scalar(terms: &[(i64, GaussRat)]) -> Result<Self> {
        let mut map: BTreeMap<i64, QMatrix> = BTreeMap::new();
        for (k, c) in terms {
            let e = map.entry(*k).or_insert_with(|| QMatrix::zeros(1, 1));
            *e = e.add(&QMatrix::from_rows(1, &[vec![c.clone()]]));
        }
        Self::new(1, map)
    }

    /// `S + αI`, symbol `z + α`.
    pub fn shift_plus(alpha: &GaussRat) -> Self {
        Self::scalar(&[(1, GaussRat::one()), (0, alpha.clone())]).expect("nonzero")
    }

    /// The block operator `V` with `S` on the diagonal and `I` on the subdiagonal:
    /// symbol `z·I_n + N_n`.
    pub fn block_v(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("V needs n ≥ 1".into()));
        }
        let sub = QMatrix::from_fn(n, n, |i, j| if i == j + 1 { GaussRat::one() } else { GaussRat::zero() });
        Self::new(n, BTreeMap::from([(1, QMatrix::identity(n)), (0, sub)]))
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, QMatrix> {
        &self.coeffs
    }

    pub fn is_scalar(&self) -> bool {
        self.block == 1
    }

    pub fn min_offset(&self) -> i64 {
        *self.coeffs.keys().next().unwrap()
    }

    pub fn max_offset(&self) -> i64 {
        *self.coeffs.keys().next_back().unwrap()
    }

    fn coeff(&self, k: i64) -> QMatrix {
        self.coeffs.get(&k).cloned().unwrap_or_else(|| QMatrix::zeros(self.block, self.block))
    }

    /// Symbol of `T + c·I`.
    pub fn plus_identity(&self, c: &GaussRat) -> Result<Self> {
        let mut m = self.coeffs.clone();
        let shifted = self.coeff(0).add(&QMatrix::identity(self.block).scale(c));
        m.insert(0, shifted);
        Self::new(self.block, m)
    }

    /// Symbol of `T*`: `ã_k = a_{−k}*`.
    pub fn adjoint(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(k, m)| (-k, m.adjoint())).collect();
        LaurentSymbol { block: self.block, coeffs }
    }

    pub fn eval(&self, z: Complex64) -> DMatrix<Complex64> {
        let mut acc = DMatrix::<Complex64>::zeros(self.block, self.block);
        for (k, m) in &self.coeffs {
            acc += to_dmatrix(m) * z.powi(*k as i32);
        }
        acc
    }

    pub fn det_at(&self, z: Complex64) -> Complex64 {
        self.eval(z).determinant()
    }

    /// The `N × N` block truncation `(a_{i−j})_{i,j<N}`.
    pub fn truncation(&self, n: usize) -> DMatrix<Complex64> {
        let b = self.block;
        let mut m = DMatrix::<Complex64>::zeros(n * b, n * b);
        for (k, c) in &self.coeffs {
            let c = to_dmatrix(c);
            for j in 0..n as i64 {
                let i = j + k;
                if i < 0 || i >= n as i64 {
                    continue;
                }
                let (i, j) = (i as usize, j as usize);
                m.view_mut((i * b, j * b), (b, b)).copy_from(&c);
            }
        }
        m
    }

    fn scale(&self) -> f64 {
        self.coeffs.values().map(|m| m.norm_f64()).sum::<f64>().max(1.0)
    }

    /// Diagonal scalar symbols when the symbol is block lower- or upper-triangular.
    fn triangular_diagonal(&self) -> Option<Vec<LaurentSymbol>> {
        let b = self.block;
        let lower = self.coeffs.values().all(|m| (0..b).all(|i| (i + 1..b).all(|j| m[(i, j)].is_zero())));
        let upper = self.coeffs.values().all(|m| (0..b).all(|i| (0..i).all(|j| m[(i, j)].is_zero())));
        if !(lower || upper) {
            return None;
        }
        (0..b)
            .map(|i| {
                let terms: Vec<(i64, GaussRat)> =
                    self.coeffs.iter().map(|(k, m)| (*k, m[(i, i)].clone())).collect();
                Self::scalar(&terms).ok()
            })
            .collect()
    }
}

impl fmt::Display for LaurentSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "block={}", self.block)?;
        for (k, m) in &self.coeffs {
            let rows: Vec<String> = (0..m.rows())
                .map(|i| format!("[{}]", m.row(i).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
                .collect();
            write!(f, "; k:{k}=[{}]", rows.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for LaurentSymbol {
    type Err = ParseError;

    fn from_str(text: &str) -> std::result::Result<Self, ParseError> {
        let bad = |why: &str| ParseError::Symbol(format!("{why} in `{text}`"));
        let mut parts = text.split(';').map(str::trim).filter(|p| !p.is_empty());
        let head = parts.next().ok_or_else(|| bad("empty symbol"))?;
        let block: usize = head
            .strip_prefix("block=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| bad("expected block=<n>"))?;
        let mut coeffs = BTreeMap::new();
        for p in parts {
            let (k, m) = p
                .strip_prefix("k:")
                .and_then(|r| r.split_once('='))
                .ok_or_else(|| bad("expected k:<offset>=<matrix>"))?;
            let k: i64 = k.trim().parse().map_err(|_| bad("bad offset"))?;
            let m = parse_matrix(m)?;
            let prev = coeffs.insert(k, m);
            if prev.is_some() {
                return Err(bad("repeated offset"));
            }
        }
        LaurentSymbol::new(block, coeffs).map_err(|e| bad(&e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certification {
    /// Winding number of `det a` on a uniform grid.
    Winding { grid: usize, min_modulus: f64 },
    /// Kernel counts from characteristic roots, validated against an `N × N` truncation.
    Truncation { n: usize },
    /// Block-triangular symbol whose diagonal kernels all vanish.
    Triangular,
    NumericOnly(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndexReport {
    /// `det a` has no zeros on the unit circle.
    pub fredholm: bool,
    pub winding: Option<i64>,
    /// `dim Ker − dim Ker*`.
    pub index: Option<i64>,
    pub ker_dim: Option<usize>,
    pub coker_dim: Option<usize>,
    pub certification: Certification,
}

fn winding_on_grid(sym: &LaurentSymbol, grid: usize) -> (f64, f64, f64) {
    let vals: Vec<Complex64> = (0..grid)
        .map(|j| sym.det_at(Complex64::from_polar(1.0, 2.0 * PI * j as f64 / grid as f64)))
        .collect();
    let min = vals.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
    let max = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let total: f64 = (0..grid).map(|j| (vals[(j + 1) % grid] / vals[j]).arg()).sum();
    (total / (2.0 * PI), min, max)
}

/// Fredholm index `−wind(det a)` by accumulated argument, doubling the grid
/// until the rounded winding number is stable twice.
pub fn fredholm_index(sym: &LaurentSymbol, grid: usize) -> Result<IndexReport> {
    if grid < MIN_GRID {
        return Err(Error::InvalidParameter(format!("grid {grid} < {MIN_GRID}")));
    }
    let (mut raw, min, max) = winding_on_grid(sym, grid);
    if max == 0.0 {
        return Err(Error::DegenerateSymbol);
    }
    let bound = 1e-8 * max.max(1.0);
    if min <= bound {
        let kd = if sym.is_scalar() { kernel_dims(sym, ORACLE_N).ok() } else { None };
        let certification = match &kd {
            Some(k) if k.certified => Certification::Truncation { n: k.oracle_n },
            _ => Certification::NumericOnly("determinant vanishes on the unit circle".into()),
        };
        let kd = kd.filter(|k| k.certified);
        return Ok(IndexReport {
            fredholm: false,
            winding: None,
            index: kd.as_ref().map(|k| k.ker as i64 - k.coker as i64),
            ker_dim: kd.as_ref().map(|k| k.ker),
            coker_dim: kd.as_ref().map(|k| k.coker),
            certification,
        });
    }
    let mut g = grid;
    let mut stable = 0;
    let mut last = raw.round();
    while stable < 2 {
        g *= 2;
        if g > MAX_GRID {
            return Err(Error::Uncertified(format!("winding number unstable up to grid {MAX_GRID}")));
        }
        let (r, _, _) = winding_on_grid(sym, g);
        raw = r;
        if r.round() == last && (r - r.round()).abs() < 0.1 {
            stable += 1;
        } else {
            stable = 0;
            last = r.round();
        }
    }
    let w = last as i64;
    debug_assert!((raw - raw.round()).abs() < 0.1);
    Ok(IndexReport {
        fredholm: true,
        winding: Some(w),
        index: Some(-w),
        ker_dim: None,
        coker_dim: None,
        certification: Certification::Winding { grid: g, min_modulus: min },
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelDims {
    pub ker: usize,
    pub coker: usize,
    /// The truncation oracle agrees with `ker + coker`.
    pub certified: bool,
    /// Size of the truncation used by the oracle.
    pub oracle_n: usize,
    /// Number of singular values of the truncation below the oracle threshold.
    pub oracle_small: usize,
    /// Characteristic roots on the unit circle (quasi-Fredholm case).
    pub circle_roots: usize,
}

struct ScalarKernel {
    ker: usize,
    /// `min(|ζ|, 1/|ζ|)` over roots off the circle (decay rate of the oracle).
    rate: f64,
    circle_roots: usize,
}

fn scalar_coeff(sym: &LaurentSymbol, k: i64) -> GaussRat {
    sym.coeffs.get(&k).map(|m| m[(0, 0)].clone()).unwrap_or_else(GaussRat::zero)
}

/// `dim Ker T_a` for a scalar banded symbol from the decaying solutions of the
/// recurrence `Σ a_k x_{i−k} = 0`, filtered by the boundary rows.
fn scalar_kernel(sym: &LaurentSymbol) -> Result<ScalarKernel> {
    let (lo, hi) = (sym.min_offset(), sym.max_offset());
    // q(ζ) = Σ a_k ζ^{hi−k}; its roots give the solutions ζ^j.
    let q = Polynomial::new((0..=hi - lo).map(|d| scalar_coeff(sym, hi - d)).collect());
    let mut basis: Vec<(Complex64, usize)> = Vec::new();
    let mut rate: f64 = 0.0;
    let mut circle_roots = 0;
    for (piece, mult) in square_free_decomposition(&q) {
        for z in piece.numeric_roots() {
            let r = z.norm();
            if !r.is_finite() {
                return Err(Error::RootFinding(format!("non-finite root of {q}")));
            }
            if (r - 1.0).abs() < CIRCLE_TOL {
                circle_roots += mult;
                continue;
            }
            rate = rate.max(r.min(1.0 / r));
            if r < 1.0 {
                basis.extend((0..mult).map(|p| (z, p)));
            }
        }
    }
    // Rows i < hi see only part of the band; rows i ≥ hi are the recurrence.
    let boundary_rows = hi.max(0) as usize;
    // With hi < 0 the first −hi coordinates meet no equation at all.
    let free = (-hi).max(0) as usize;
    let seq = |(z, p): (Complex64, usize), j: i64| -> Complex64 {
        if j < 0 { Complex64::zero() } else { z.powi(j as i32) * (j as f64).powi(p as i32) }
    };
    let mut b = DMatrix::<Complex64>::zeros(boundary_rows, basis.len());
    for (c, &v) in basis.iter().enumerate() {
        for i in 0..boundary_rows as i64 {
            let mut acc = Complex64::zero();
            for k in lo..=hi.min(i) {
                acc += scalar_coeff(sym, k).to_c64() * seq(v, i - k);
            }
            b[(i as usize, c)] = acc;
        }
    }
    let sv = singular_values(&b);
    let top = sv.first().copied().unwrap_or(0.0).max(1.0);
    let rank = sv.iter().filter(|&&s| s > 1e-9 * top).count();
    Ok(ScalarKernel { ker: free + basis.len() - rank, rate, circle_roots })
}

/// Kernel and cokernel dimensions of a scalar banded Toeplitz operator, checked
/// against the number of exponentially small singular values of a truncation.
pub fn kernel_dims(sym: &LaurentSymbol, oracle_n: usize) -> Result<KernelDims> {
    if !sym.is_scalar() {
        return Err(Error::Uncertified("block kernel dimensions are numeric only".into()));
    }
    let k = scalar_kernel(sym)?;
    let c = scalar_kernel(&sym.adjoint())?;
    let rate = k.rate.max(c.rate);
    let band = (sym.max_offset() - sym.min_offset()).unsigned_abs() as usize;
    // Enough rows that decaying solutions fall below 1e-12 of their start.
    let needed = if rate > 0.0 { (-12.0 * std::f64::consts::LN_10 / rate.ln()).ceil() as usize } else { 0 };
    let n = oracle_n.max(needed + 2 * band + 8);
    if n > MAX_ORACLE_N {
        return Ok(KernelDims {
            ker: k.ker,
            coker: c.ker,
            certified: false,
            oracle_n: n,
            oracle_small: 0,
            circle_roots: k.circle_roots,
        });
    }
    let sv = singular_values(&sym.truncation(n));
    let small = sv.iter().filter(|&&s| s < 1e-8 * sym.scale()).count();
    let certified = small == k.ker + c.ker;
    Ok(KernelDims { ker: k.ker, coker: c.ker, certified, oracle_n: n, oracle_small: small, circle_roots: k.circle_roots })
}

/// `dim Ker T − dim Ker T*`: from the winding number when Fredholm, otherwise
/// from certified kernel counts (scalar) or the triangular rule (block).
pub fn operator_index(sym: &LaurentSymbol) -> Result<(i64, Certification)> {
    let rep = fredholm_index(sym, MIN_GRID)?;
    if let Some(i) = rep.index {
        return Ok((i, rep.certification));
    }
    if sym.is_scalar() {
        let kd = kernel_dims(sym, ORACLE_N)?;
        if !kd.certified {
            return Err(Error::Uncertified(format!(
                "kernel counts {}/{} disagree with truncation oracle ({} small singular values at N={})",
                kd.ker, kd.coker, kd.oracle_small, kd.oracle_n
            )));
        }
        return Ok((kd.ker as i64 - kd.coker as i64, Certification::Truncation { n: kd.oracle_n }));
    }
    // Block-triangular: if every diagonal entry is injective so is T (forward or
    // backward substitution), and likewise for T*.
    if let Some(diag) = sym.triangular_diagonal() {
        let mut all_zero = true;
        for d in &diag {
            let kd = kernel_dims(d, ORACLE_N)?;
            all_zero &= kd.certified && kd.ker == 0 && kd.coker == 0;
        }
        if all_zero {
            return Ok((0, Certification::Triangular));
        }
    }
    Err(Error::Uncertified("block symbol vanishing on the circle: numeric only".into()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingleOperatorDefect {
    pub defect: Rational64,
    pub index_t: i64,
    pub index_t_minus_i: i64,
    pub certification: (Certification, Certification),
}

/// `ρ(S_T) = ⅓(Index T + Index(T − I))`.
pub fn single_operator_defect(sym: &LaurentSymbol) -> Result<SingleOperatorDefect> {
    let (a, ca) = operator_index(sym)?;
    let (b, cb) = operator_index(&sym.plus_identity(&GaussRat::int(-1))?)?;
    Ok(SingleOperatorDefect {
        defect: Rational64::new(a + b, 3),
        index_t: a,
        index_t_minus_i: b,
        certification: (ca, cb),
    })
}

/// `ρ(S_{S+αI})` through [`single_operator_defect`], cross-checked against the
/// region table (−2/3 when |α|<1 and |α−1|<1, −1/3 when exactly one holds, 0 otherwise).
pub fn region_classify(alpha: &GaussRat) -> Result<Rational64> {
    let one = GaussRat::one();
    let inside = |z: &GaussRat| z.norm_sqr() < num_rational::BigRational::one();
    let on = |z: &GaussRat| z.norm_sqr() == num_rational::BigRational::one();
    let shifted = alpha - &one;
    if on(alpha) || on(&shifted) {
        return Err(Error::InvalidParameter(format!("α = {alpha} lies on a region boundary")));
    }
    let computed = single_operator_defect(&LaurentSymbol::shift_plus(alpha))?.defect;
    let table = Rational64::new(-(i64::from(inside(alpha)) + i64::from(inside(&shifted))), 3);
    if computed != table {
        return Err(Error::Invariant(format!("α = {alpha}: symbol gives {computed}, table {table}")));
    }
    Ok(computed)
}

// ---------------------------------------------------------------------------
// Toeplitz idempotents

/// Upper-triangular Toeplitz: `m[i][j]` depends only on `j − i` and vanishes below the diagonal.
pub fn is_upper_triangular_toeplitz(m: &QMatrix) -> bool {
    let n = m.rows();
    m.is_square()
        && (0..n).all(|i| {
            (0..n).all(|j| {
                if j < i { m[(i, j)].is_zero() } else { m[(i, j)] == m[(0, j - i)] }
            })
        })
}

/// The law "an idempotent upper-triangular Toeplitz matrix (constant diagonal)
/// is 0 or I", evaluated on `m`: true unless `m` is a counterexample.
pub fn toeplitz_idempotent_law(m: &QMatrix) -> bool {
    if !is_upper_triangular_toeplitz(m) || m.mul(m) != *m {
        return true;
    }
    m.is_zero() || m.is_identity()
}

// ---------------------------------------------------------------------------
// Exotic systems

fn shift(n: usize) -> QMatrix {
    QMatrix::from_fn(n, n, |i, j| if i == j + 1 { GaussRat::one() } else { GaussRat::zero() })
}

/// `T_γ = [[γS*, I], [0, S]]` on `ℂ^N ⊕ ℂ^N`.
pub fn exotic_operator(gamma: &GaussRat, n: usize) -> QMatrix {
    let s = shift(n);
    let top = s.transpose().scale(gamma).hstack(&QMatrix::identity(n));
    let bottom = QMatrix::zeros(n, n).hstack(&s);
    top.vstack(&bottom)
}

/// Truncation of `S_γ` to `L = ℂ^N`: `H = K ⊕ K` with `K = L ⊕ L`,
/// `E₁ = K⊕0`, `E₂ = 0⊕K`, `E₃ = graph T_γ + ℂ(0,0,0,e₁)`, `E₄` the diagonal.
pub fn truncate_exotic(gamma: &GaussRat, n: usize) -> Result<QSystem> {
    if n < 4 {
        return Err(Error::InvalidParameter(format!("truncation size {n} < 4")));
    }
    let k = 2 * n;
    let t = exotic_operator(gamma, n);
    let id = QMatrix::identity(k);
    let graph = id.vstack(&t);
    let mut extra = QMatrix::zeros(2 * k, 1);
    extra = QMatrix::from_fn(2 * k, 1, |i, _| if i == k + n { GaussRat::one() } else { extra[(i, 0)].clone() });
    let e1 = id.vstack(&QMatrix::zeros(k, k));
    let e2 = QMatrix::zeros(k, k).vstack(&id);
    let e3 = graph.hstack(&extra);
    let e4 = id.vstack(&id);
    QSystem::new(2 * k, [e1, e2, e3, e4].iter().map(Subspace::span).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairData {
    pub i: usize,
    pub j: usize,
    pub exact_intersection: usize,
    /// `dim H − dim(Eᵢ + Eⱼ)`, exact.
    pub codim_sum: usize,
    pub min_angle: f64,
    /// Principal angles below the tolerance.
    pub near_intersection: usize,
}

#[derive(Clone, Debug)]
pub struct ExoticReport {
    pub gamma: GaussRat,
    pub n: usize,
    pub tol: f64,
    pub pairs: Vec<PairData>,
    pub diagram: IntersectionDiagram,
    /// Vertex 3 is isolated in the diagram, so no closed operator system is isomorphic.
    pub not_operator_system: bool,
    /// `⅓(m₁₃ + m₂₃ + near-m₃₄)`.
    pub defect_estimate: Rational64,
    /// Pairs (1,2), (1,4), (2,4) meet trivially with full sum, and (1,3), (2,3) have full sum.
    pub other_terms_ok: bool,
}

impl ExoticReport {
    pub fn pair(&self, i: usize, j: usize) -> &PairData {
        self.pairs.iter().find(|p| p.i == i && p.j == j).expect("pair exists")
    }
}

pub fn exotic_report(gamma: &GaussRat, n: usize, tol: f64) -> Result<ExoticReport> {
    if gamma.norm_sqr() <= num_rational::BigRational::one() {
        return Err(Error::InvalidParameter(format!("|γ| must exceed 1, got γ = {gamma}")));
    }
    let s = truncate_exotic(gamma, n)?;
    let d = s.ambient_dim();
    let mut pairs = Vec::new();
    let mut edges = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            let (a, b) = (s.subspace(i), s.subspace(j));
            let exact = a.intersect(b)?.dim();
            let codim = d - (a.dim() + b.dim() - exact);
            let angles = a.principal_angles(b);
            let min_angle = angles.first().copied().unwrap_or(f64::INFINITY);
            let near = angles.iter().filter(|&&t| t < tol).count();
            if near == 0 {
                edges.push((i, j));
            }
            pairs.push(PairData { i: i + 1, j: j + 1, exact_intersection: exact, codim_sum: codim, min_angle, near_intersection: near });
        }
    }
    let diagram = IntersectionDiagram::new(4, edges, Some(tol));
    let get = |i: usize, j: usize| pairs.iter().find(|p| p.i == i && p.j == j).unwrap();
    let other_terms_ok = [(1, 2), (1, 4), (2, 4)]
        .iter()
        .all(|&(i, j)| get(i, j).exact_intersection == 0 && get(i, j).codim_sum == 0)
        && [(1, 3), (2, 3), (3, 4)].iter().all(|&(i, j)| get(i, j).codim_sum == 0);
    let defect_estimate = Rational64::new(
        (get(1, 3).exact_intersection + get(2, 3).exact_intersection + get(3, 4).near_intersection) as i64,
        3,
    );
    Ok(ExoticReport {
        gamma: gamma.clone(),
        n,
        tol,
        not_operator_system: diagram.degree(2) == 0,
        pairs,
        diagram,
        defect_estimate,
        other_terms_ok,
    })
}

/// Default near-intersection tolerance for the exotic lab.
pub const EXOTIC_TOL: f64 = ANGLE_THRESHOLD;

// ---------------------------------------------------------------------------
// Hom spaces between truncated exotic systems, by sparse elimination mod p

/// Primes `p ≡ 1 (mod 4)`, so that `i` exists in `F_p`.
pub const HOM_PRIMES: [u64; 2] = [998_244_353, 1_000_000_009];

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % p as u128) as u64;
        }
        b = (b as u128 * b as u128 % p as u128) as u64;
        e >>= 1;
    }
    r
}

fn sqrt_minus_one(p: u64) -> u64 {
    (2..).map(|a| pow_mod(a, (p - 1) / 4, p)).find(|&r| (r as u128 * r as u128 % p as u128) as u64 == p - 1).unwrap()
}

fn rat_mod(x: &num_rational::BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let num = x.numer().mod_floor(&pb).to_u64()?;
    let den = x.denom().mod_floor(&pb).to_u64()?;
    if den == 0 {
        return None;
    }
    Some((num as u128 * pow_mod(den, p - 2, p) as u128 % p as u128) as u64)
}

fn gauss_mod(z: &GaussRat, p: u64, i: u64) -> Result<u64> {
    let re = rat_mod(&z.re, p);
    let im = rat_mod(&z.im, p);
    match (re, im) {
        (Some(a), Some(b)) => Ok(((a as u128 + b as u128 * i as u128) % p as u128) as u64),
        _ => Err(Error::InvalidParameter(format!("{z} has a denominator divisible by {p}"))),
    }
}

/// Incremental row reduction over `F_p` with sparse rows.
struct SparseEliminator {
    p: u64,
    pivots: HashMap<usize, Vec<(usize, u64)>>,
}

impl SparseEliminator {
    fn new(p: u64) -> Self {
        SparseEliminator { p, pivots: HashMap::new() }
    }

    fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// The kernel vector with `x_free = 1` when exactly one of `cols` columns is free.
    fn single_null_vector(&self, cols: usize) -> Option<Vec<u64>> {
        let p = self.p;
        let mut free = (0..cols).filter(|c| !self.pivots.contains_key(c));
        let f = free.next()?;
        if free.next().is_some() {
            return None;
        }
        let mut x = vec![0u64; cols];
        x[f] = 1;
        // Pivot rows only reach to the right of their pivot, so sweep right to left.
        for c in (0..cols).rev() {
            if let Some(row) = self.pivots.get(&c) {
                let s = row[1..].iter().fold(0u128, |acc, &(k, v)| (acc + v as u128 * x[k] as u128) % p as u128);
                x[c] = ((p as u128 - s) % p as u128) as u64;
            }
        }
        Some(x)
    }

    /// Adds a row given as sorted `(column, value)` pairs with nonzero values.
    fn insert(&mut self, mut row: Vec<(usize, u64)>) {
        let p = self.p;
        while let Some(&(c, v)) = row.first() {
            let Some(piv) = self.pivots.get(&c) else {
                let inv = pow_mod(v, p - 2, p);
                let normalized = row.into_iter().map(|(k, x)| (k, (x as u128 * inv as u128 % p as u128) as u64)).collect();
                self.pivots.insert(c, normalized);
                return;
            };
            // row ← row − v·piv (piv has leading 1 at column c)
            let mut out = Vec::with_capacity(row.len() + piv.len());
            let (mut a, mut b) = (0, 0);
            while a < row.len() || b < piv.len() {
                let ca = row.get(a).map(|e| e.0).unwrap_or(usize::MAX);
                let cb = piv.get(b).map(|e| e.0).unwrap_or(usize::MAX);
                if ca < cb {
                    out.push(row[a]);
                    a += 1;
                } else {
                    let sub = (v as u128 * piv[b].1 as u128 % p as u128) as u64;
                    let x = if ca == cb {
                        let x = (row[a].1 + p - sub) % p;
                        a += 1;
                        x
                    } else {
                        (p - sub) % p
                    };
                    b += 1;
                    if x != 0 {
                        out.push((cb, x));
                    }
                }
            }
            row = out;
        }
    }
}

fn dense_rank_mod(mut m: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(r) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, r);
        let inv = pow_mod(m[rank][c], p - 2, p);
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[c] != 0 {
                let f = (row[c] as u128 * inv as u128 % p as u128) as u64;
                for (x, &y) in row[c..cols].iter_mut().zip(&pivot_row[c..cols]) {
                    let sub = (f as u128 * y as u128 % p as u128) as u64;
                    *x = (*x + p - sub) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn sparse_entries(m: &QMatrix, p: u64, i: u64) -> Result<Vec<(usize, usize, u64)>> {
    let mut out = Vec::new();
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if !m[(r, c)].is_zero() {
                out.push((r, c, gauss_mod(&m[(r, c)], p, i)?));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomDimension {
    pub n: usize,
    pub unknowns: usize,
    /// Largest rank found over [`HOM_PRIMES`] (a lower bound for the rank over ℚ(i)).
    pub rank: usize,
    /// `unknowns − rank`, an upper bound for `dim Hom(S_γ, S_β)` at this truncation.
    pub dim: usize,
    /// When the space is one-dimensional: rank mod p of the spanning `U`
    /// (`2N` means the spanning intertwiner is invertible).
    pub generator_rank: Option<usize>,
}

/// `dim Hom(S_γ, S_β)` for the truncations at size `N`.
///
/// An intertwiner is `diag(U, U)` with `U` on `K = ℂ^{2N}`; the graph condition
/// says `U T_γ − T_β U` vanishes outside row `N`, and the extra line forces
/// column `N` of `U` into `ℂ e_N`.
pub fn exotic_hom_dimension(gamma: &GaussRat, beta: &GaussRat, n: usize) -> Result<HomDimension> {
    let k = 2 * n;
    let unknowns = k * k;
    let tg = exotic_operator(gamma, n);
    let tb = exotic_operator(beta, n);
    let var = |a: usize, b: usize| a * k + b;
    let mut best = 0;
    let mut generator_rank = None;
    for p in HOM_PRIMES {
        let i = sqrt_minus_one(p);
        let g = sparse_entries(&tg, p, i)?;
        let b = sparse_entries(&tb, p, i)?;
        // columns of T_γ and rows of T_β
        let mut g_by_col: Vec<Vec<(usize, u64)>> = vec![Vec::new(); k];
        for &(r, c, v) in &g {
            g_by_col[c].push((r, v));
        }
        let mut b_by_row: Vec<Vec<(usize, u64)>> = vec![Vec::new(); k];
        for &(r, c, v) in &b {
            b_by_row[r].push((c, v));
        }
        let mut elim = SparseEliminator::new(p);
        for r in (0..k).filter(|&r| r != n) {
            for (c, col) in g_by_col.iter().enumerate().take(k) {
                // (U T_γ)_{rc} − (T_β U)_{rc}
                let mut acc: BTreeMap<usize, u64> = BTreeMap::new();
                for &(m, v) in col {
                    let e = acc.entry(var(r, m)).or_insert(0);
                    *e = (*e + v) % p;
                }
                for &(m, v) in &b_by_row[r] {
                    let e = acc.entry(var(m, c)).or_insert(0);
                    *e = (*e + p - v) % p;
                }
                let row: Vec<(usize, u64)> = acc.into_iter().filter(|e| e.1 != 0).collect();
                elim.insert(row);
            }
        }
        for a in (0..k).filter(|&a| a != n) {
            elim.insert(vec![(var(a, n), 1)]);
        }
        if elim.rank() >= best {
            best = elim.rank();
            generator_rank = elim.single_null_vector(unknowns).map(|x| {
                let u: Vec<Vec<u64>> = (0..k).map(|a| (0..k).map(|b| x[var(a, b)]).collect()).collect();
                dense_rank_mod(u, p)
            });
        }
    }
    Ok(HomDimension { n, unknowns, rank: best, dim: unknowns - best, generator_rank })
}

#[derive(Clone, Debug)]
pub struct HomDecay {
    pub gamma: GaussRat,
    pub beta: GaussRat,
    pub dims: Vec<HomDimension>,
    /// `dim` is non-increasing along the truncation sizes.
    pub monotone: bool,
}

pub fn exotic_hom_decay(gamma: &GaussRat, beta: &GaussRat, sizes: &[usize]) -> Result<HomDecay> {
    let dims = sizes.iter().map(|&n| exotic_hom_dimension(gamma, beta, n)).collect::<Result<Vec<_>>>()?;
    let monotone = dims.windows(2).all(|w| w[1].dim <= w[0].dim);
    Ok(HomDecay { gamma: gamma.clone(), beta: beta.clone(), dims, monotone })
}
