//! Generators for the concrete systems: Gelfand–Ponomarev canonical forms of
//! four subspaces, the indecomposable systems of one, two and three subspaces,
//! the numbered examples, operator systems and Jordan systems.

use std::fmt;
use std::str::FromStr;

use crate::decompose::{are_isomorphic, Isomorphism};
use crate::error::{Error, ParseError, Result};
use crate::matrix::QMatrix;
use crate::scalar::{Field, GaussRat};
use crate::system::{operator_system, single_operator_system, QSystem};

/// The nine Gelfand–Ponomarev families of indecomposable four-subspace systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gp4Family {
    /// `S_i(2k,−1)`
    EvenMinus1,
    /// `S_i(2k,1)`
    EvenPlus1,
    /// `S_{i,j}(2k,0)`
    EvenZero,
    /// `S(2k,0;λ)`
    EvenLambda,
    /// `S_i(2k+1,−1)`
    OddMinus1,
    /// `S_i(2k+1,1)`
    OddPlus1,
    /// `S_{i,j}(2k+1,0)`
    OddZero,
    /// `S(2k+1,−2)`
    OddMinus2,
    /// `S(2k+1,2)`
    OddPlus2,
}

impl Gp4Family {
    pub const ALL: [Gp4Family; 9] = [
        Gp4Family::EvenMinus1,
        Gp4Family::EvenPlus1,
        Gp4Family::EvenZero,
        Gp4Family::EvenLambda,
        Gp4Family::OddMinus1,
        Gp4Family::OddPlus1,
        Gp4Family::OddZero,
        Gp4Family::OddMinus2,
        Gp4Family::OddPlus2,
    ];

    pub fn defect(self) -> i64 {
        use Gp4Family::*;
        match self {
            EvenMinus1 | OddMinus1 => -1,
            EvenPlus1 | OddPlus1 => 1,
            EvenZero | EvenLambda | OddZero => 0,
            OddMinus2 => -2,
            OddPlus2 => 2,
        }
    }

    pub fn is_even(self) -> bool {
        matches!(self, Gp4Family::EvenMinus1 | Gp4Family::EvenPlus1 | Gp4Family::EvenZero | Gp4Family::EvenLambda)
    }

    /// Ambient dimension for size parameter `k`.
    pub fn ambient_dim(self, k: usize) -> usize {
        if self.is_even() { 2 * k } else { 2 * k + 1 }
    }

    pub fn min_k(self) -> usize {
        if self.is_even() { 1 } else { 0 }
    }

    /// Number of subscript indices (`S_i` or `S_{i,j}`).
    pub fn arity(self) -> usize {
        use Gp4Family::*;
        match self {
            EvenMinus1 | EvenPlus1 | OddMinus1 | OddPlus1 => 1,
            EvenZero | OddZero => 2,
            _ => 0,
        }
    }

    /// Subscript of the base form listed with explicit bases.
    pub fn base_index(self) -> Vec<usize> {
        use Gp4Family::*;
        match self {
            EvenMinus1 | EvenPlus1 => vec![3],
            OddMinus1 => vec![1],
            OddPlus1 => vec![2],
            EvenZero | OddZero => vec![1, 3],
            _ => vec![],
        }
    }

    pub fn name(self) -> &'static str {
        use Gp4Family::*;
        match self {
            EvenMinus1 => "S(2k,-1)",
            EvenPlus1 => "S(2k,1)",
            EvenZero => "S(2k,0)",
            EvenLambda => "S(2k,0;l)",
            OddMinus1 => "S(2k+1,-1)",
            OddPlus1 => "S(2k+1,1)",
            OddZero => "S(2k+1,0)",
            OddMinus2 => "S(2k+1,-2)",
            OddPlus2 => "S(2k+1,2)",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Gp4Family::ALL.into_iter().find(|f| f.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CatalogKey {
    Gp4 {
        family: Gp4Family,
        k: usize,
        /// 1-based subscripts: `[i]` or `[i, j]`; empty for families without one.
        index: Vec<usize>,
        lambda: Option<GaussRat>,
        /// Extra permutation applied last, 1-based one-line notation: `(σS)ₘ = E_{σ(m)}`.
        perm: Option<[usize; 4]>,
    },
    Gp3(usize),
    Two(usize),
    One(usize),
    /// Numbered example; Examples 1 and 2 take the parameter `t = tan(θ/2)`.
    Example { id: usize, param: Option<GaussRat> },
    /// `S_{J_n(λ)}`.
    Jordan { n: usize, lambda: GaussRat },
    /// `S_{T,S}`.
    OpSys { t: QMatrix, s: QMatrix },
}

impl CatalogKey {
    pub fn gp4(family: Gp4Family, k: usize) -> Self {
        CatalogKey::Gp4 { family, k, index: family.base_index(), lambda: None, perm: None }
    }

    pub fn gp4_lambda(k: usize, lambda: GaussRat) -> Self {
        CatalogKey::Gp4 { family: Gp4Family::EvenLambda, k, index: vec![], lambda: Some(lambda), perm: None }
    }

    pub fn gp4_indexed(family: Gp4Family, k: usize, index: Vec<usize>) -> Self {
        CatalogKey::Gp4 { family, k, index, lambda: None, perm: None }
    }

    pub fn build(&self) -> Result<QSystem> {
        build(self)
    }
}

/// Basis coordinates for `e₁..e_k(,e_{k+1}), f₁..f_k` in that order.
struct Coords {
    k: usize,
    d: usize,
    odd: bool,
}

impl Coords {
    fn new(k: usize, odd: bool) -> Self {
        Coords { k, d: if odd { 2 * k + 1 } else { 2 * k }, odd }
    }
    /// `e_j`, 1-based (`j ≤ k+1` when odd).
    fn e(&self, j: usize) -> usize {
        assert!(j >= 1 && j <= self.k + usize::from(self.odd));
        j - 1
    }
    /// `f_j`, 1-based.
    fn f(&self, j: usize) -> usize {
        assert!(j >= 1 && j <= self.k);
        self.k + usize::from(self.odd) + j - 1
    }
    fn vec(&self, terms: &[(usize, GaussRat)]) -> Vec<GaussRat> {
        let mut v = vec![GaussRat::zero(); self.d];
        for (i, c) in terms {
            v[*i] = &v[*i] + c;
        }
        v
    }
    fn unit(&self, i: usize) -> Vec<GaussRat> {
        self.vec(&[(i, GaussRat::one())])
    }
    fn sum(&self, a: usize, b: usize) -> Vec<GaussRat> {
        self.vec(&[(a, GaussRat::one()), (b, GaussRat::one())])
    }
}

/// The transposition `σ_{a,b}` as a 0-based permutation of four indices (identity when `a = b`).
pub fn transposition(a: usize, b: usize) -> [usize; 4] {
    let mut p = [0, 1, 2, 3];
    p.swap(a - 1, b - 1);
    p
}

fn base_gp4(family: Gp4Family, k: usize, lambda: Option<&GaussRat>) -> Result<QSystem> {
    use Gp4Family::*;
    if k < family.min_k() {
        return Err(Error::InvalidParameter(format!("{} needs k ≥ {}", family.name(), family.min_k())));
    }
    let c = Coords::new(k, !family.is_even());
    let d = c.d;
    let es = |n: usize| (1..=n).map(|j| c.unit(c.e(j))).collect::<Vec<_>>();
    let fs = || (1..=k).map(|j| c.unit(c.f(j))).collect::<Vec<_>>();
    // e_{j+1} + f_j for j = 1..upto
    let shifted = |upto: usize| (1..=upto).map(|j| c.sum(c.e(j + 1), c.f(j))).collect::<Vec<_>>();
    let diag = || (1..=k).map(|j| c.sum(c.e(j), c.f(j))).collect::<Vec<_>>();
    let spans: Vec<Vec<Vec<GaussRat>>> = match family {
        EvenMinus1 => vec![es(k), fs(), shifted(k - 1), diag()],
        EvenPlus1 => {
            let mut e3 = vec![c.unit(c.e(1))];
            e3.extend(shifted(k - 1));
            e3.push(c.unit(c.f(k)));
            vec![es(k), fs(), e3, diag()]
        }
        EvenZero => {
            let mut e3 = vec![c.unit(c.e(1))];
            e3.extend(shifted(k - 1));
            vec![es(k), fs(), e3, diag()]
        }
        EvenLambda => {
            let l = lambda.ok_or_else(|| Error::InvalidParameter("S(2k,0;λ) needs λ".into()))?;
            if l.is_zero() || l.is_one() {
                return Err(Error::InvalidParameter(format!("λ = {l} is excluded (λ ≠ 0, 1)")));
            }
            let e3 = (1..=k)
                .map(|j| {
                    let mut t = vec![(c.e(j), GaussRat::one()), (c.f(j), l.clone())];
                    if j > 1 {
                        t.push((c.f(j - 1), GaussRat::one()));
                    }
                    c.vec(&t)
                })
                .collect();
            vec![es(k), fs(), e3, diag()]
        }
        OddMinus1 => vec![es(k + 1), fs(), shifted(k), diag()],
        OddPlus1 => {
            let mut e3 = vec![c.unit(c.e(1))];
            e3.extend(shifted(k));
            let mut e4 = diag();
            e4.push(c.unit(c.e(k + 1)));
            vec![es(k + 1), fs(), e3, e4]
        }
        OddZero => {
            let mut e3 = vec![c.unit(c.e(1))];
            e3.extend(shifted(k));
            vec![es(k + 1), fs(), e3, diag()]
        }
        OddMinus2 if k == 0 => vec![vec![], vec![], vec![], vec![]],
        OddMinus2 => {
            let mut e4: Vec<_> = (1..k).map(|j| c.sum(c.e(j), c.f(j + 1))).collect();
            e4.push(c.sum(c.e(k), c.e(k + 1)));
            vec![es(k), fs(), shifted(k), e4]
        }
        OddPlus2 if k == 0 => vec![es(1), es(1), es(1), es(1)],
        OddPlus2 => {
            let mut e2 = fs();
            e2.push(c.unit(c.e(k + 1)));
            let mut e3 = vec![c.unit(c.e(1))];
            e3.extend(shifted(k));
            let mut e4 = vec![c.unit(c.f(1))];
            e4.extend((1..k).map(|j| c.sum(c.e(j), c.f(j + 1))));
            e4.push(c.sum(c.e(k), c.e(k + 1)));
            vec![es(k + 1), e2, e3, e4]
        }
    };
    QSystem::from_vectors(d, &spans)
}

fn build_gp4(
    family: Gp4Family,
    k: usize,
    index: &[usize],
    lambda: Option<&GaussRat>,
    perm: Option<&[usize; 4]>,
) -> Result<QSystem> {
    use Gp4Family::*;
    if index.len() != family.arity() || index.iter().any(|&i| !(1..=4).contains(&i)) {
        return Err(Error::InvalidParameter(format!(
            "{} takes {} subscript(s) in 1..4, got {index:?}",
            family.name(),
            family.arity()
        )));
    }
    if lambda.is_some() && family != EvenLambda {
        return Err(Error::InvalidParameter(format!("{} takes no λ", family.name())));
    }
    let base = base_gp4(family, k, lambda)?;
    let mut s = match family {
        EvenMinus1 | EvenPlus1 => base.permute(&transposition(3, index[0]))?,
        OddMinus1 => base.permute(&transposition(1, index[0]))?,
        OddPlus1 => base.permute(&transposition(2, index[0]))?,
        EvenZero | OddZero => {
            let (i, j) = (index[0], index[1]);
            if i >= j {
                return Err(Error::InvalidParameter(format!("S_(i,j) needs i < j, got ({i},{j})")));
            }
            // σ_{1,i}σ_{3,j}S_{1,3}: σ_{3,j} acts first.
            base.permute(&transposition(3, j))?.permute(&transposition(1, i))?
        }
        _ => base,
    };
    if let Some(p) = perm {
        let zero_based: Vec<usize> = p.iter().map(|&x| x.wrapping_sub(1)).collect();
        s = s.permute(&zero_based)?;
    }
    Ok(s)
}

fn one_dim(flags: &[bool]) -> Result<QSystem> {
    let spans: Vec<Vec<Vec<GaussRat>>> =
        flags.iter().map(|&f| if f { vec![vec![GaussRat::one()]] } else { vec![] }).collect();
    QSystem::from_vectors(1, &spans)
}

fn ints(v: &[i64]) -> Vec<GaussRat> {
    v.iter().map(|&x| GaussRat::int(x)).collect()
}

/// `Sᵢ` of the three-subspace theorem, `i ∈ 1..=9`.
pub fn gp3(i: usize) -> Result<QSystem> {
    let flags: [[bool; 3]; 8] = [
        [false, false, false],
        [true, false, false],
        [false, true, false],
        [false, false, true],
        [true, true, false],
        [true, false, true],
        [false, true, true],
        [true, true, true],
    ];
    match i {
        1..=8 => one_dim(&flags[i - 1]),
        9 => QSystem::from_vectors(2, &[vec![ints(&[1, 0])], vec![ints(&[0, 1])], vec![ints(&[1, 1])]]),
        _ => Err(Error::InvalidParameter(format!("three-subspace type {i} not in 1..9"))),
    }
}

/// `(ℂ;ℂ,0)`, `(ℂ;0,ℂ)`, `(ℂ;ℂ,ℂ)`, `(ℂ;0,0)`.
pub fn two(i: usize) -> Result<QSystem> {
    let flags = [[true, false], [false, true], [true, true], [false, false]];
    match i {
        1..=4 => one_dim(&flags[i - 1]),
        _ => Err(Error::InvalidParameter(format!("two-subspace type {i} not in 1..4"))),
    }
}

/// `(ℂ;0)` and `(ℂ;ℂ)`.
pub fn one(i: usize) -> Result<QSystem> {
    match i {
        1 => one_dim(&[false]),
        2 => one_dim(&[true]),
        _ => Err(Error::InvalidParameter(format!("one-subspace type {i} not in 1..2"))),
    }
}

/// The numbered examples. Examples 1 and 2 use `E₂ = ℂ(cos θ, sin θ)` with
/// `t = tan(θ/2)` rational, so that `cos θ = (1−t²)/(1+t²)` and
/// `sin θ = 2t/(1+t²)` are exact; `t` must lie in `(0, 1)` for `0 < θ < π/2`.
pub fn build_example(id: usize, param: Option<&GaussRat>) -> Result<QSystem> {
    let q = |v: &[&[i64]]| v.iter().map(|x| ints(x)).collect::<Vec<_>>();
    match id {
        1 | 2 => {
            let t = param.cloned().unwrap_or_else(|| GaussRat::ratio(1, 2));
            let tv = t.to_f64_pair();
            if !t.is_real() || tv.0 <= 0.0 || tv.0 >= 1.0 {
                return Err(Error::InvalidParameter(format!("t = tan(θ/2) = {t} must lie in (0,1)")));
            }
            let one = GaussRat::one();
            let t2 = &t * &t;
            let den = (&one + &t2).inv();
            let cos = &(&one - &t2) * &den;
            let sin = &(&t * &GaussRat::int(2)) * &den;
            QSystem::from_vectors(2, &[q(&[&[1, 0]]), vec![vec![cos, sin]]])
        }
        3 => gp3(9),
        4 => QSystem::from_vectors(3, &[q(&[&[1, 0, 0]]), q(&[&[0, 1, 0]]), q(&[&[0, 0, 1]])]),
        5 => example5(&[ints(&[1, 0, 0]), ints(&[0, 1, 0]), ints(&[0, 0, 1]), ints(&[1, 1, 1])]),
        6 => QSystem::from_vectors(3, &[q(&[&[1, 0, 0], &[0, 1, 0]]), q(&[&[1, 1, 1]]), q(&[&[1, 2, 3]])]),
        7 => QSystem::from_vectors(
            3,
            &[q(&[&[1, 0, 0], &[0, 1, 0]]), q(&[&[0, 0, 1]]), q(&[&[0, 1, 1]]), q(&[&[1, 0, 1]])],
        ),
        8 => QSystem::from_vectors(
            3,
            &[q(&[&[1, 0, 0], &[0, 1, 0]]), q(&[&[0, 0, 1]]), q(&[&[1, 0, 0], &[0, 1, 1]]), q(&[&[1, 0, 1]])],
        ),
        9 => QSystem::from_vectors(
            3,
            &[
                q(&[&[1, 0, 0], &[0, 1, 0]]),
                q(&[&[0, 0, 1]]),
                q(&[&[1, 0, 0], &[0, 1, 1]]),
                q(&[&[1, 0, 1], &[0, 1, 0]]),
            ],
        ),
        10 => QSystem::from_vectors(
            3,
            &[
                q(&[&[1, 0, 0], &[0, 1, 0]]),
                q(&[&[0, 1, 0], &[0, 0, 1]]),
                q(&[&[1, 0, 0], &[0, 1, 1]]),
                q(&[&[0, 0, 1], &[1, 1, 0]]),
            ],
        ),
        _ => Err(Error::InvalidParameter(format!("no example {id}"))),
    }
}

/// Four lines `ℂbᵢ` in ℂ³.
pub fn example5(b: &[Vec<GaussRat>; 4]) -> Result<QSystem> {
    if b.iter().any(|v| v.len() != 3) {
        return Err(Error::DimensionMismatch("Example 5 takes vectors in ℂ³".into()));
    }
    QSystem::from_vectors(3, &b.iter().map(|v| vec![v.clone()]).collect::<Vec<_>>())
}

/// Jordan block `J_n(λ)` (ones on the superdiagonal).
pub fn jordan_block(n: usize, lambda: &GaussRat) -> QMatrix {
    QMatrix::from_fn(n, n, |i, j| {
        if i == j {
            lambda.clone()
        } else if j == i + 1 {
            GaussRat::one()
        } else {
            GaussRat::zero()
        }
    })
}

pub fn build(key: &CatalogKey) -> Result<QSystem> {
    match key {
        CatalogKey::Gp4 { family, k, index, lambda, perm } => {
            build_gp4(*family, *k, index, lambda.as_ref(), perm.as_ref())
        }
        CatalogKey::Gp3(i) => gp3(*i),
        CatalogKey::Two(i) => two(*i),
        CatalogKey::One(i) => one(*i),
        CatalogKey::Example { id, param } => build_example(*id, param.as_ref()),
        CatalogKey::Jordan { n, lambda } => {
            if *n == 0 {
                return Err(Error::InvalidParameter("Jordan block of size 0".into()));
            }
            single_operator_system(&jordan_block(*n, lambda))
        }
        CatalogKey::OpSys { t, s } => operator_system(t, s),
    }
}

/// All GP4 keys with every subscript variant, for even sizes `1..=k_even`,
/// odd sizes `0..=k_odd` and the given λ values.
pub fn gp4_keys(k_even: usize, k_odd: usize, lambdas: &[GaussRat]) -> Vec<CatalogKey> {
    let mut out = Vec::new();
    for family in Gp4Family::ALL {
        let ks: Vec<usize> = if family.is_even() { (1..=k_even).collect() } else { (0..=k_odd).collect() };
        for k in ks {
            match family.arity() {
                1 => out.extend((1..=4).map(|i| CatalogKey::gp4_indexed(family, k, vec![i]))),
                2 => {
                    for i in 1..=4 {
                        for j in i + 1..=4 {
                            out.push(CatalogKey::gp4_indexed(family, k, vec![i, j]));
                        }
                    }
                }
                _ if family == Gp4Family::EvenLambda => {
                    out.extend(lambdas.iter().map(|l| CatalogKey::gp4_lambda(k, l.clone())))
                }
                _ => out.push(CatalogKey::gp4(family, k)),
            }
        }
    }
    out
}

/// The indecomposable catalogs for `n = 1, 2, 3`.
pub fn small_catalog(n: usize) -> Vec<CatalogKey> {
    match n {
        1 => (1..=2).map(CatalogKey::One).collect(),
        2 => (1..=4).map(CatalogKey::Two).collect(),
        3 => (1..=9).map(CatalogKey::Gp3).collect(),
        _ => vec![],
    }
}

/// Checks `S_{T,S}⊥ ≅ σ_{1,2}σ_{3,4} S_{−S*,−T*}` and returns the witness.
pub fn orthocomplement_identity_check(t: &QMatrix, s: &QMatrix, seed: u64) -> Result<Isomorphism> {
    let lhs = operator_system(t, s)?.orthocomplement();
    let rhs = operator_system(&s.adjoint().neg(), &t.adjoint().neg())?.permute(&[1, 0, 3, 2])?;
    are_isomorphic(&lhs, &rhs, seed)
}

fn matrix_text(m: &QMatrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| format!("[{}]", m.row(i).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    format!("[{}]", rows.join(","))
}

/// Parses `[[a,b],[c,d]]` with scalar entries.
pub fn parse_matrix(text: &str) -> std::result::Result<QMatrix, ParseError> {
    let bad = || ParseError::Symbol(format!("malformed matrix `{text}`"));
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
    if inner.is_empty() {
        return Ok(QMatrix::zeros(0, 0));
    }
    let body = inner.strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
    let mut rows = Vec::new();
    for r in body.split("],[") {
        let row: Vec<GaussRat> = if r.is_empty() {
            vec![]
        } else {
            r.split(',').map(|x| x.parse()).collect::<std::result::Result<_, _>>()?
        };
        rows.push(row);
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(bad());
    }
    Ok(QMatrix::from_rows(cols, &rows))
}

impl fmt::Display for CatalogKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogKey::Gp4 { family, k, index, lambda, perm } => {
                write!(f, "gp4:{}.k={k}", family.name())?;
                if let Some(l) = lambda {
                    write!(f, ".l={l}")?;
                }
                match index.as_slice() {
                    [i] => write!(f, ".i={i}")?,
                    [i, j] => write!(f, ".i={i}.j={j}")?,
                    _ => {}
                }
                if let Some(p) = perm {
                    write!(f, ".perm={}{}{}{}", p[0], p[1], p[2], p[3])?;
                }
                Ok(())
            }
            CatalogKey::Gp3(i) => write!(f, "gp3:{i}"),
            CatalogKey::Two(i) => write!(f, "two:{i}"),
            CatalogKey::One(i) => write!(f, "one:{i}"),
            CatalogKey::Example { id, param: None } => write!(f, "example:{id}"),
            CatalogKey::Example { id, param: Some(t) } => write!(f, "example:{id}.t={t}"),
            CatalogKey::Jordan { n, lambda } => write!(f, "jordan:n={n}.l={lambda}"),
            CatalogKey::OpSys { t, s } => write!(f, "opsys:t={}.s={}", matrix_text(t), matrix_text(s)),
        }
    }
}

impl FromStr for CatalogKey {
    type Err = ParseError;

    fn from_str(text: &str) -> std::result::Result<Self, ParseError> {
        let bad = |why: &str| ParseError::CatalogKey(format!("{text}: {why}"));
        let (kind, rest) = text.trim().split_once(':').ok_or_else(|| bad("missing `kind:`"))?;
        let index_of = |s: &str| s.parse::<usize>().map_err(|_| bad("expected an integer"));
        match kind {
            "gp3" => Ok(CatalogKey::Gp3(index_of(rest)?)),
            "two" => Ok(CatalogKey::Two(index_of(rest)?)),
            "one" => Ok(CatalogKey::One(index_of(rest)?)),
            "example" => {
                let mut parts = rest.split('.');
                let id = index_of(parts.next().unwrap_or(""))?;
                let param = match parts.next() {
                    Some(p) => Some(p.strip_prefix("t=").ok_or_else(|| bad("expected t=<scalar>"))?.parse()?),
                    None => None,
                };
                Ok(CatalogKey::Example { id, param })
            }
            "jordan" => {
                let (mut n, mut lambda) = (None, None);
                for part in rest.split('.') {
                    match part.split_once('=') {
                        Some(("n", v)) => n = Some(index_of(v)?),
                        Some(("l", v)) => lambda = Some(v.parse()?),
                        _ => return Err(bad("expected n=<size> and l=<scalar>")),
                    }
                }
                Ok(CatalogKey::Jordan {
                    n: n.ok_or_else(|| bad("missing n"))?,
                    lambda: lambda.ok_or_else(|| bad("missing l"))?,
                })
            }
            "opsys" => {
                let (t, s) = rest.split_once(".s=").ok_or_else(|| bad("expected t=<matrix>.s=<matrix>"))?;
                let t = t.strip_prefix("t=").ok_or_else(|| bad("expected t=<matrix>"))?;
                Ok(CatalogKey::OpSys { t: parse_matrix(t)?, s: parse_matrix(s)? })
            }
            "gp4" => {
                // The family name contains a period-free parenthesised part.
                let close = rest.find(')').ok_or_else(|| bad("missing family"))?;
                let family =
                    Gp4Family::from_name(&rest[..=close]).ok_or_else(|| bad("unknown family"))?;
                let (mut k, mut lambda, mut i, mut j, mut perm) = (None, None, None, None, None);
                for part in rest[close + 1..].split('.').filter(|p| !p.is_empty()) {
                    let (name, v) = part.split_once('=').ok_or_else(|| bad("expected name=value"))?;
                    match name {
                        "k" => k = Some(index_of(v)?),
                        "l" => lambda = Some(v.parse::<GaussRat>()?),
                        "i" => i = Some(index_of(v)?),
                        "j" => j = Some(index_of(v)?),
                        "perm" => {
                            let digits: Vec<usize> =
                                v.chars().filter_map(|c| c.to_digit(10).map(|d| d as usize)).collect();
                            let arr: [usize; 4] =
                                digits.try_into().map_err(|_| bad("perm needs four digits"))?;
                            perm = Some(arr);
                        }
                        _ => return Err(bad("unknown field")),
                    }
                }
                let base = family.base_index();
                let index = match family.arity() {
                    1 => vec![i.unwrap_or(base[0])],
                    2 => vec![i.unwrap_or(base[0]), j.unwrap_or(base[1])],
                    _ => vec![],
                };
                Ok(CatalogKey::Gp4 { family, k: k.ok_or_else(|| bad("missing k"))?, index, lambda, perm })
            }
            _ => Err(bad("unknown kind")),
        }
    }
}
