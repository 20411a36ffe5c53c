//! Scalars: exact Gaussian rationals and tolerance-tagged complex doubles.
//!
//! Both implement [`Field`], the interface the dense-matrix kernel is written
//! against. Exact values never mix with floating values inside one matrix; the
//! type parameter enforces that.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;
use crate::matrix::Matrix;

/// Default rank tolerance for the floating backend.
pub const DEFAULT_TOL: f64 = 1e-9;

/// The scalar interface shared by the exact and the floating backend.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Arithmetic is error-free.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_gauss(x: &GaussRat) -> Self;
    /// Literal zero test. For floats this is `== 0.0`; use [`Field::negligible`]
    /// for rank decisions.
    fn is_zero(&self) -> bool;
    fn conj(&self) -> Self;
    fn modulus(&self) -> f64;
    fn to_c64(&self) -> Complex64;

    fn negligible(&self, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.modulus() <= tol
        }
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// Reduced row-echelon form with pivot columns (backend-specific elimination).
    fn echelon(m: &Matrix<Self>, tol: f64) -> (Matrix<Self>, Vec<usize>);

    /// Canonical basis of the column span: column-reduced echelon form on the
    /// exact backend, an orthonormal basis on the floating backend.
    fn canonical_span(m: &Matrix<Self>, tol: f64) -> Matrix<Self>;
}

/// An element of ℚ(i): `re + im·i` with arbitrary-precision rational parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussRat { re, im: BigRational::zero() }
    }

    pub fn int(n: i64) -> Self {
        GaussRat::real(BigRational::from_integer(n.into()))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        GaussRat::real(BigRational::new(n.into(), d.into()))
    }

    /// `a + b i` with integer parts.
    pub fn gaussian(a: i64, b: i64) -> Self {
        GaussRat::new(
            BigRational::from_integer(a.into()),
            BigRational::from_integer(b.into()),
        )
    }

    pub fn i() -> Self {
        GaussRat::gaussian(0, 1)
    }

    /// |z|² as an exact rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn inv(&self) -> GaussRat {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "division by zero in ℚ(i)");
        GaussRat::new(&self.re / &n, -(&self.im) / &n)
    }

    /// Least common multiple of the denominators of both parts.
    pub fn denom_lcm(&self) -> BigInt {
        self.re.denom().lcm(self.im.denom())
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Nearest Gaussian rational with the given denominator, by rounding
    /// `z·den` to the nearest Gaussian integer.
    pub fn round_with_denominator(z: Complex64, den: &BigInt) -> Option<GaussRat> {
        let d = den.to_f64()?;
        let (a, b) = ((z.re * d).round(), (z.im * d).round());
        if !a.is_finite() || !b.is_finite() || a.abs() > 9.0e15 || b.abs() > 9.0e15 {
            return None;
        }
        Some(GaussRat::new(
            BigRational::new(BigInt::from(a as i64), den.clone()),
            BigRational::new(BigInt::from(b as i64), den.clone()),
        ))
    }
}

impl Default for GaussRat {
    fn default() -> Self {
        GaussRat::int(0)
    }
}

macro_rules! gauss_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a GaussRat> for &'a GaussRat {
            type Output = GaussRat;
            fn $m(self, o: &'a GaussRat) -> GaussRat {
                let f: fn(&GaussRat, &GaussRat) -> GaussRat = $body;
                f(self, o)
            }
        }
        impl $tr for GaussRat {
            type Output = GaussRat;
            fn $m(self, o: GaussRat) -> GaussRat {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a GaussRat> for GaussRat {
            type Output = GaussRat;
            fn $m(self, o: &'a GaussRat) -> GaussRat {
                (&self).$m(o)
            }
        }
    };
}

gauss_binop!(Add, add, |a, b| GaussRat::new(&a.re + &b.re, &a.im + &b.im));
gauss_binop!(Sub, sub, |a, b| GaussRat::new(&a.re - &b.re, &a.im - &b.im));
gauss_binop!(Mul, mul, |a, b| {
    if a.im.is_zero() && b.im.is_zero() {
        return GaussRat::real(&a.re * &b.re);
    }
    GaussRat::new(
        &a.re * &b.re - &a.im * &b.im,
        &a.re * &b.im + &a.im * &b.re,
    )
});
gauss_binop!(Div, div, |a, b| {
    if b.im.is_zero() {
        assert!(!b.re.is_zero(), "division by zero in ℚ(i)");
        return GaussRat::new(&a.re / &b.re, &a.im / &b.re);
    }
    a * &b.inv()
});

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re, -self.im)
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-&self.re, -&self.im)
    }
}

impl AddAssign<&GaussRat> for GaussRat {
    fn add_assign(&mut self, o: &GaussRat) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&GaussRat> for GaussRat {
    fn sub_assign(&mut self, o: &GaussRat) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&GaussRat> for GaussRat {
    fn mul_assign(&mut self, o: &GaussRat) {
        *self = &*self * o;
    }
}

impl Field for GaussRat {
    const EXACT: bool = true;

    fn zero() -> Self {
        GaussRat::int(0)
    }
    fn one() -> Self {
        GaussRat::int(1)
    }
    fn from_i64(n: i64) -> Self {
        GaussRat::int(n)
    }
    fn from_gauss(x: &GaussRat) -> Self {
        x.clone()
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -&self.im)
    }
    fn modulus(&self) -> f64 {
        let (a, b) = self.to_f64_pair();
        a.hypot(b)
    }
    fn to_c64(&self) -> Complex64 {
        let (a, b) = self.to_f64_pair();
        Complex64::new(a, b)
    }
    fn is_one(&self) -> bool {
        self.im.is_zero() && self.re.is_one()
    }
    fn echelon(m: &Matrix<Self>, _tol: f64) -> (Matrix<Self>, Vec<usize>) {
        crate::matrix::rref_bareiss(m)
    }
    fn canonical_span(m: &Matrix<Self>, _tol: f64) -> Matrix<Self> {
        let (r, piv) = m.transpose().rref();
        r.submatrix(0..piv.len(), 0..m.rows()).transpose()
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Text form `a/b+c/di` with omitted zero parts: `3`, `-1/2i`, `2+1/3i`, `i`, `-i`.
impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im = if self.im.is_one() {
            "i".to_string()
        } else if (-&self.im).is_one() {
            "-i".to_string()
        } else {
            format!("{}i", fmt_rat(&self.im))
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rat(&self.re)),
            (true, false) => write!(f, "{im}"),
            (false, false) => {
                if self.im.is_positive() {
                    write!(f, "{}+{}", fmt_rat(&self.re), im)
                } else {
                    write!(f, "{}{}", fmt_rat(&self.re), im)
                }
            }
        }
    }
}

impl fmt::Debug for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_rat(s: &str) -> Result<BigRational, ParseError> {
    let bad = || ParseError::Scalar(s.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

impl FromStr for GaussRat {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, ParseError> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || ParseError::Scalar(text.to_string());
        if s.is_empty() {
            return Err(bad());
        }
        let Some(body) = s.strip_suffix('i') else {
            return Ok(GaussRat::real(parse_rat(&s)?));
        };
        // Split at the last sign that is not in leading position.
        let split = body
            .char_indices()
            .filter(|&(k, c)| k > 0 && (c == '+' || c == '-'))
            .map(|(k, _)| k)
            .next_back();
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("", body),
        };
        let im = match im {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            t => parse_rat(t.strip_prefix('+').unwrap_or(t)).map_err(|_| bad())?,
        };
        let re = if re.is_empty() {
            BigRational::zero()
        } else {
            parse_rat(re).map_err(|_| bad())?
        };
        Ok(GaussRat::new(re, im))
    }
}

/// A Gaussian integer, used by fraction-free elimination.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GaussInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussInt {
    pub fn zero() -> Self {
        GaussInt { re: BigInt::zero(), im: BigInt::zero() }
    }

    pub fn one() -> Self {
        GaussInt { re: BigInt::one(), im: BigInt::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn mul(&self, o: &GaussInt) -> GaussInt {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussInt { re: &self.re * &o.re, im: BigInt::zero() };
        }
        GaussInt {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn sub(&self, o: &GaussInt) -> GaussInt {
        GaussInt { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    /// Exact division; panics if `o` does not divide `self` in ℤ[i].
    pub fn div_exact(&self, o: &GaussInt) -> GaussInt {
        if o.im.is_zero() {
            let (qr, rr) = self.re.div_rem(&o.re);
            let (qi, ri) = self.im.div_rem(&o.re);
            assert!(rr.is_zero() && ri.is_zero(), "inexact Gaussian division");
            return GaussInt { re: qr, im: qi };
        }
        let n = &o.re * &o.re + &o.im * &o.im;
        let num = self.mul(&GaussInt { re: o.re.clone(), im: -&o.im });
        let (qr, rr) = num.re.div_rem(&n);
        let (qi, ri) = num.im.div_rem(&n);
        assert!(rr.is_zero() && ri.is_zero(), "inexact Gaussian division");
        GaussInt { re: qr, im: qi }
    }

    pub fn to_rat(&self) -> GaussRat {
        GaussRat::new(
            BigRational::from_integer(self.re.clone()),
            BigRational::from_integer(self.im.clone()),
        )
    }

    /// Scales a Gaussian rational by an integer multiple of its denominators.
    pub fn from_scaled(x: &GaussRat, scale: &BigInt) -> GaussInt {
        let re = &x.re * BigRational::from_integer(scale.clone());
        let im = &x.im * BigRational::from_integer(scale.clone());
        debug_assert!(re.is_integer() && im.is_integer());
        GaussInt { re: re.to_integer(), im: im.to_integer() }
    }
}

/// A complex double. Rank decisions on matrices of `C64` use an explicit tolerance.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct C64(pub Complex64);

impl C64 {
    pub fn new(re: f64, im: f64) -> Self {
        C64(Complex64::new(re, im))
    }
}

macro_rules! c64_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for C64 {
            type Output = C64;
            fn $m(self, o: C64) -> C64 {
                C64(self.0.$m(o.0))
            }
        }
    };
}

c64_binop!(Add, add);
c64_binop!(Sub, sub);
c64_binop!(Mul, mul);
c64_binop!(Div, div);

impl Neg for C64 {
    type Output = C64;
    fn neg(self) -> C64 {
        C64(-self.0)
    }
}

impl fmt::Display for C64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Complex64 { re, im } = self.0;
        if im == 0.0 {
            write!(f, "{re:e}")
        } else if re == 0.0 {
            write!(f, "{im:e}i")
        } else if im.is_sign_negative() {
            write!(f, "{re:e}{im:e}i")
        } else {
            write!(f, "{re:e}+{im:e}i")
        }
    }
}

impl fmt::Debug for C64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for C64 {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, ParseError> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || ParseError::Scalar(text.to_string());
        let Some(body) = s.strip_suffix('i') else {
            return s.parse::<f64>().map(|x| C64::new(x, 0.0)).map_err(|_| bad());
        };
        // A sign splits real and imaginary parts unless it follows an exponent marker.
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("", body),
        };
        let im = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            t => t.parse::<f64>().map_err(|_| bad())?,
        };
        let re = if re.is_empty() { 0.0 } else { re.parse::<f64>().map_err(|_| bad())? };
        Ok(C64::new(re, im))
    }
}

impl Field for C64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn from_i64(n: i64) -> Self {
        C64::new(n as f64, 0.0)
    }
    fn from_gauss(x: &GaussRat) -> Self {
        C64(x.to_c64())
    }
    fn is_zero(&self) -> bool {
        self.0.re == 0.0 && self.0.im == 0.0
    }
    fn conj(&self) -> Self {
        C64(self.0.conj())
    }
    fn modulus(&self) -> f64 {
        self.0.norm()
    }
    fn to_c64(&self) -> Complex64 {
        self.0
    }
    fn echelon(m: &Matrix<Self>, tol: f64) -> (Matrix<Self>, Vec<usize>) {
        crate::matrix::rref_float(m, tol)
    }
    fn canonical_span(m: &Matrix<Self>, tol: f64) -> Matrix<Self> {
        crate::numeric::orthonormal_basis(m, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GaussRat {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_print_canonical_forms() {
        for s in ["3", "-1/2i", "2+1/3i", "i", "-i", "0", "1/2-i", "-7/3+2i"] {
            assert_eq!(g(s).to_string(), s);
        }
        assert_eq!(g("2/4"), GaussRat::ratio(1, 2));
        assert_eq!(g("+i"), GaussRat::i());
        assert_eq!(g("0+0i").to_string(), "0");
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "1/0", "abc", "1+", "i/2"] {
            assert!(s.parse::<GaussRat>().is_err(), "{s}");
        }
    }

    #[test]
    fn field_arithmetic() {
        let a = g("1+2i");
        let b = g("3-i");
        assert_eq!(&a * &b, g("5+5i"));
        assert_eq!(&(&a / &b) * &b, a);
        assert_eq!(g("i") * g("i"), g("-1"));
        assert_eq!(a.conj(), g("1-2i"));
        assert_eq!(a.norm_sqr(), BigRational::from_integer(5.into()));
    }

    #[test]
    fn gaussian_integer_division() {
        let a = GaussInt::from_scaled(&g("3+i"), &BigInt::one());
        let b = GaussInt::from_scaled(&g("1+i"), &BigInt::one());
        let p = a.mul(&b);
        assert_eq!(p.div_exact(&b), a);
    }

    #[test]
    fn c64_text() {
        let z: C64 = "1.5e-3-2i".parse().unwrap();
        assert_eq!(z, C64::new(1.5e-3, -2.0));
        let w: C64 = "-2.5".parse().unwrap();
        assert_eq!(w, C64::new(-2.5, 0.0));
        let v: C64 = "1e-3i".parse().unwrap();
        assert_eq!(v, C64::new(0.0, 1e-3));
    }
}
