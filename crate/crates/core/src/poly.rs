//! Univariate polynomials over ℚ(i): arithmetic, minimal polynomials of
//! matrices and small-degree factoring.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::numeric;
use crate::scalar::{Field, GaussRat};

/// Default degree bound for [`factor_over_gaussian_rationals`].
pub const FACTOR_DEGREE_BOUND: usize = 24;

/// Coefficients in ascending degree; no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<GaussRat>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<GaussRat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: GaussRat) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(GaussRat::int(1))
    }

    /// The monomial `z`.
    pub fn z() -> Self {
        Self::new(vec![GaussRat::int(0), GaussRat::int(1)])
    }

    /// `z − r`.
    pub fn linear(r: &GaussRat) -> Self {
        Self::new(vec![-r.clone(), GaussRat::int(1)])
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| GaussRat::int(x)).collect())
    }

    pub fn coeffs(&self) -> &[GaussRat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lead(&self) -> GaussRat {
        self.coeffs.last().cloned().unwrap_or_else(GaussRat::zero)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lead().inv();
        Self::new(self.coeffs.iter().map(|c| c * &inv).collect())
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_one()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = GaussRat::zero();
        Self::new(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&z) + o.coeffs.get(k).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&GaussRat::int(-1)))
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![GaussRat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let mut r = self.coeffs.clone();
        let dn = d.degree();
        if self.coeffs.len() < d.coeffs.len() {
            return (Self::zero(), self.clone());
        }
        let inv = d.lead().inv();
        let mut q = vec![GaussRat::zero(); self.coeffs.len() - dn];
        for k in (0..q.len()).rev() {
            let c = &r[k + dn] * &inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k + j] -= &(&c * dc);
            }
            q[k] = c;
        }
        r.truncate(dn);
        (Self::new(q), Self::new(r))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &GaussRat::int(k as i64))
                .collect(),
        )
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s·self + t·o = g = gcd(self, o)`, `g` monic.
    pub fn ext_gcd(&self, o: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lead().inv();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn eval(&self, x: &GaussRat) -> GaussRat {
        self.coeffs.iter().rev().fold(GaussRat::zero(), |acc, c| &(&acc * x) + c)
    }

    /// `p(m)` by Horner's rule.
    pub fn eval_matrix(&self, m: &QMatrix) -> QMatrix {
        let n = m.rows();
        let mut acc = QMatrix::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(m);
            for k in 0..n {
                acc[(k, k)] += c;
            }
        }
        acc
    }

    pub fn to_c64(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| c.to_c64()).collect()
    }

    /// Numeric roots (companion eigenvalues with Newton polishing).
    pub fn numeric_roots(&self) -> Vec<Complex64> {
        numeric::poly_roots(&self.to_c64())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono = match k {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{k}"),
            };
            if k == 0 {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{mono}")?;
            } else if c.is_real() || c.re.is_zero() {
                write!(f, "{c}{mono}")?;
            } else {
                write!(f, "({c}){mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Monic polynomial of least degree annihilating `m`, found as the first
/// linear dependence among `I, m, m², …` (flattened).
pub fn minimal_polynomial(m: &QMatrix) -> Result<Polynomial> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("minimal polynomial of a non-square matrix".into()));
    }
    let n = m.rows();
    // Stored reduced rows: (pivot index, row normalised at pivot, combination of powers).
    let mut reduced: Vec<(usize, Vec<GaussRat>, Vec<GaussRat>)> = Vec::new();
    let mut power = QMatrix::identity(n);
    for k in 0..=n {
        let mut v: Vec<GaussRat> = power.entries().to_vec();
        let mut comb = vec![GaussRat::zero(); k + 1];
        comb[k] = GaussRat::one();
        for (p, row, c) in &reduced {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &(&f * r);
                }
            }
            for (x, r) in comb.iter_mut().zip(c) {
                if !r.is_zero() {
                    *x -= &(&f * r);
                }
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            None => return Ok(Polynomial::new(comb)),
            Some(p) => {
                let inv = v[p].inv();
                let row = v.iter().map(|x| x * &inv).collect();
                let c = comb.iter().map(|x| x * &inv).collect();
                reduced.push((p, row, c));
            }
        }
        power = power.mul(m);
    }
    Err(Error::Invariant("no polynomial dependence up to degree n".into()))
}

/// Output of [`factor_over_gaussian_rationals`]: `p = unit · Π fᵢ^mᵢ · Π rⱼ^nⱼ`.
///
/// `factors` are exactly verified linear factors. `remainder` collects monic
/// pieces that resisted exact splitting (no root in ℚ(i) was found); they may
/// still split over ℂ. All listed pieces are pairwise coprime.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub unit: GaussRat,
    pub factors: Vec<(Polynomial, usize)>,
    pub remainder: Vec<(Polynomial, usize)>,
}

impl Factorization {
    pub fn product(&self) -> Polynomial {
        self.factors
            .iter()
            .chain(&self.remainder)
            .fold(Polynomial::constant(self.unit.clone()), |acc, (f, m)| acc.mul(&f.pow(*m)))
    }

    /// True when every piece is linear.
    pub fn splits(&self) -> bool {
        self.remainder.is_empty()
    }

    /// Pairwise-coprime prime-power pieces `fᵢ^mᵢ` (including remainder pieces).
    pub fn coprime_pieces(&self) -> Vec<Polynomial> {
        self.factors.iter().chain(&self.remainder).map(|(f, m)| f.pow(*m)).collect()
    }
}

/// Yun's square-free decomposition of a monic polynomial: pairs `(aᵢ, i)` with
/// `p = Π aᵢ^i`, each `aᵢ` square-free and the `aᵢ` pairwise coprime.
pub fn square_free_decomposition(p: &Polynomial) -> Vec<(Polynomial, usize)> {
    let p = p.monic();
    let mut out = Vec::new();
    if p.degree() == 0 {
        return out;
    }
    let dp = p.derivative();
    let a0 = p.gcd(&dp);
    let mut b = p.div_rem(&a0).0;
    let c = dp.div_rem(&a0).0;
    let mut d = c.sub(&b.derivative());
    let mut i = 1;
    while b.degree() > 0 {
        let a = b.gcd(&d);
        let nb = b.div_rem(&a).0;
        let c = d.div_rem(&a).0;
        d = c.sub(&nb.derivative());
        if a.degree() > 0 {
            out.push((a, i));
        }
        b = nb;
        i += 1;
    }
    out
}

fn common_denominator(p: &Polynomial) -> BigInt {
    p.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(&c.denom_lcm()))
}

/// Splits a monic square-free polynomial into linear factors with roots in
/// ℚ(i) and a residual. Roots of `p` in ℚ(i) are `g/D` with `g ∈ ℤ[i]`, where
/// `D` is the common coefficient denominator, so candidates are obtained by
/// rounding `D·z` for every numeric root `z` and then verified exactly.
fn extract_linear(p: &Polynomial) -> (Vec<Polynomial>, Polynomial) {
    let den = common_denominator(p);
    let mut rest = p.clone();
    let mut linear = Vec::new();
    for z in p.numeric_roots() {
        if rest.degree() == 0 {
            break;
        }
        let Some(r) = GaussRat::round_with_denominator(z, &den).or_else(|| refine_root(&rest, z, &den)) else {
            continue;
        };
        if linear.iter().any(|l: &Polynomial| l.eval(&r).is_zero()) {
            continue;
        }
        if rest.eval(&r).is_zero() {
            let l = Polynomial::linear(&r);
            rest = rest.div_rem(&l).0;
            linear.push(l);
        }
    }
    (linear, rest)
}

fn round_dyadic(x: &BigRational, bits: u64) -> BigRational {
    let scale = BigRational::from_integer(BigInt::one() << bits);
    (x * &scale).round() / scale
}

fn dyadic(z: Complex64, bits: u64) -> Option<GaussRat> {
    let re = BigRational::from_float(z.re)?;
    let im = BigRational::from_float(z.im)?;
    Some(GaussRat::new(round_dyadic(&re, bits), round_dyadic(&im, bits)))
}

/// The root `g/den` of `p` near `z`, when `den·z` is too large to round in
/// floating point: Newton steps in exact arithmetic, truncated to dyadic
/// rationals whose precision doubles each step, then exact rounding and an
/// exact check.
fn refine_root(p: &Polynomial, z: Complex64, den: &BigInt) -> Option<GaussRat> {
    let dp = p.derivative();
    let magnitude = z.norm().max(1.0).log2().ceil() as u64;
    let target = den.bits() + magnitude + 16;
    let mut bits = 48;
    let mut x = dyadic(z, bits)?;
    let d = BigRational::from_integer(den.clone());
    let round_to_den = |v: &BigRational| (v * &d).round() / &d;
    for _ in 0..64 {
        let slope = dp.eval(&x);
        if slope.is_zero() {
            return None;
        }
        x = &x - &(&p.eval(&x) * &slope.inv());
        bits = (2 * bits).min(2 * target);
        x = GaussRat::new(round_dyadic(&x.re, bits), round_dyadic(&x.im, bits));
        if bits >= target {
            let r = GaussRat::new(round_to_den(&x.re), round_to_den(&x.im));
            if p.eval(&r).is_zero() {
                return Some(r);
            }
            if bits == 2 * target {
                return None;
            }
        }
    }
    None
}

/// Splits a monic square-free polynomial without roots in ℚ(i) into monic
/// quadratic pieces over ℚ(i) where numeric root pairs allow it. Each piece
/// is verified by exact division.
fn extract_quadratic(p: &Polynomial) -> Vec<Polynomial> {
    if p.degree() <= 2 {
        return vec![p.clone()];
    }
    let den = common_denominator(p);
    let d2 = &den * &den;
    let roots = p.numeric_roots();
    let mut rest = p.clone();
    let mut pieces = Vec::new();
    let mut used = vec![false; roots.len()];
    for i in 0..roots.len() {
        if rest.degree() <= 2 {
            break;
        }
        for j in i + 1..roots.len() {
            if used[i] || used[j] {
                continue;
            }
            let s = -(roots[i] + roots[j]);
            let t = roots[i] * roots[j];
            let (Some(b), Some(c)) = (
                GaussRat::round_with_denominator(s, &den),
                GaussRat::round_with_denominator(t, &d2),
            ) else {
                continue;
            };
            let q = Polynomial::new(vec![c, b, GaussRat::one()]);
            let (quo, r) = rest.div_rem(&q);
            if r.is_zero() {
                rest = quo;
                pieces.push(q);
                used[i] = true;
                used[j] = true;
            }
        }
    }
    if rest.degree() > 0 {
        pieces.push(rest);
    }
    pieces
}

/// Factors `p` over ℚ(i) as far as exact certification allows.
pub fn factor_over_gaussian_rationals(p: &Polynomial) -> Result<Factorization> {
    factor_with_bound(p, FACTOR_DEGREE_BOUND)
}

pub fn factor_with_bound(p: &Polynomial, bound: usize) -> Result<Factorization> {
    if p.degree() > bound {
        return Err(Error::DegreeBound(p.degree(), bound));
    }
    if p.is_zero() {
        return Err(Error::InvalidParameter("cannot factor the zero polynomial".into()));
    }
    let unit = p.lead();
    let mut factors = Vec::new();
    let mut remainder = Vec::new();
    for (a, m) in square_free_decomposition(p) {
        let (lin, rest) = extract_linear(&a);
        factors.extend(lin.into_iter().map(|l| (l, m)));
        if rest.degree() > 0 {
            remainder.extend(extract_quadratic(&rest).into_iter().map(|q| (q, m)));
        }
    }
    let out = Factorization { unit, factors, remainder };
    if out.product() != *p {
        return Err(Error::Invariant(format!("factorisation of {p} does not multiply back")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GaussRat {
        s.parse().unwrap()
    }

    #[test]
    fn minimal_polynomials() {
        assert_eq!(minimal_polynomial(&QMatrix::zeros(3, 3)).unwrap(), Polynomial::z());
        let j2 = QMatrix::from_i64_rows(&[&[0, 1], &[0, 0]]);
        assert_eq!(minimal_polynomial(&j2).unwrap(), Polynomial::z().pow(2));
        let d = QMatrix::from_i64_rows(&[&[1, 0], &[0, 2]]);
        let p = minimal_polynomial(&d).unwrap();
        assert_eq!(p, Polynomial::from_i64(&[2, -3, 1]));
        assert!(p.eval_matrix(&d).is_zero());
    }

    #[test]
    fn factor_simple_cases() {
        let f = factor_over_gaussian_rationals(&Polynomial::from_i64(&[-1, 0, 1])).unwrap();
        assert_eq!(f.factors.len(), 2);
        assert!(f.splits());
        let f = factor_over_gaussian_rationals(&Polynomial::from_i64(&[1, 0, 1])).unwrap();
        let mut roots: Vec<String> =
            f.factors.iter().map(|(l, _)| (-l.coeffs()[0].clone()).to_string()).collect();
        roots.sort();
        assert_eq!(roots, vec!["-i", "i"]);
        let f = factor_over_gaussian_rationals(&Polynomial::from_i64(&[-2, 0, 1])).unwrap();
        assert!(f.factors.is_empty());
        assert_eq!(f.remainder, vec![(Polynomial::from_i64(&[-2, 0, 1]), 1)]);
    }

    #[test]
    fn factor_with_multiplicities_and_fractions() {
        // (z - 1/2)^2 (z - (1+i)/3) (z^2 - 3)
        let p = Polynomial::linear(&g("1/2"))
            .pow(2)
            .mul(&Polynomial::linear(&g("1/3+1/3i")))
            .mul(&Polynomial::from_i64(&[-3, 0, 1]));
        let f = factor_over_gaussian_rationals(&p).unwrap();
        assert_eq!(f.product(), p);
        assert_eq!(f.factors.len(), 2);
        assert!(f.factors.contains(&(Polynomial::linear(&g("1/2")), 2)));
        assert_eq!(f.remainder, vec![(Polynomial::from_i64(&[-3, 0, 1]), 1)]);
    }

    #[test]
    fn roots_with_large_denominators() {
        let r = g("538363/99937+407769/199874i");
        let s = &g("-3622500/454049+973444/454049i") * &g("1/1000000007");
        let p = Polynomial::linear(&r).mul(&Polynomial::linear(&s)).mul(&Polynomial::from_i64(&[-2, 0, 1]));
        let f = factor_over_gaussian_rationals(&p).unwrap();
        assert_eq!(f.factors.len(), 2);
        assert!(f.factors.contains(&(Polynomial::linear(&s), 1)));
        assert_eq!(f.remainder, vec![(Polynomial::from_i64(&[-2, 0, 1]), 1)]);
    }

    #[test]
    fn quadratic_pieces_are_separated() {
        let p = Polynomial::from_i64(&[-2, 0, 1]).mul(&Polynomial::from_i64(&[-3, 0, 1]));
        let f = factor_over_gaussian_rationals(&p).unwrap();
        assert_eq!(f.remainder.len(), 2);
        assert_eq!(f.product(), p);
    }

    #[test]
    fn degree_bound_enforced() {
        let p = Polynomial::z().pow(25);
        assert_eq!(factor_over_gaussian_rationals(&p), Err(Error::DegreeBound(25, 24)));
    }

    #[test]
    fn ext_gcd_identity() {
        let a = Polynomial::from_i64(&[-1, 1]).pow(2);
        let b = Polynomial::from_i64(&[2, 1]);
        let (g, s, t) = a.ext_gcd(&b);
        assert_eq!(g, Polynomial::one());
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }
}
