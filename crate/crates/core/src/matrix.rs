//! Dense row-major matrices over a [`Field`], with echelon forms, kernels and solves.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::scalar::{Field, GaussInt, GaussRat, C64, DEFAULT_TOL};

#[derive(Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

pub type QMatrix = Matrix<GaussRat>;
pub type CMatrix = Matrix<C64>;

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = F::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<F>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows×cols");
        Matrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds from row vectors. An empty list gives a `0 × cols` matrix.
    pub fn from_rows(cols: usize, rows: &[Vec<F>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend(r.iter().cloned());
        }
        Matrix { rows: rows.len(), cols, data }
    }

    /// Builds from column vectors of length `rows`.
    pub fn from_cols(rows: usize, cols: &[Vec<F>]) -> Self {
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_fn(rows.len(), cols, |i, j| F::from_i64(rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<F>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = &self[(i, j)];
                    if i == j { x.is_one() } else { x.is_zero() }
                })
            })
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let cur = std::mem::replace(&mut out[(i, j)], F::zero());
                    out[(i, j)] = cur + a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.clone() + b.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.clone() - b.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: &F) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x.clone())
    }

    pub fn trace(&self) -> F {
        (0..self.rows.min(self.cols)).fold(F::zero(), |acc, k| acc + self[(k, k)].clone())
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut out = Self::identity(self.rows);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// `[self | o]`.
    pub fn hstack(&self, o: &Self) -> Self {
        assert_eq!(self.rows, o.rows, "hstack row mismatch");
        Self::from_fn(self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols { self[(i, j)].clone() } else { o[(i, j - self.cols)].clone() }
        })
    }

    /// `[self ; o]`.
    pub fn vstack(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        Matrix { rows: self.rows + o.rows, cols: self.cols, data }
    }

    pub fn block_diag(&self, o: &Self) -> Self {
        Self::from_fn(self.rows + o.rows, self.cols + o.cols, |i, j| {
            match (i < self.rows, j < self.cols) {
                (true, true) => self[(i, j)].clone(),
                (false, false) => o[(i - self.rows, j - self.cols)].clone(),
                _ => F::zero(),
            }
        })
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let (r0, c0) = (rows.start, cols.start);
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), self.cols, |i, j| self[(idx[i], j)].clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])].clone())
    }

    /// Reduced row-echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        F::echelon(self, DEFAULT_TOL)
    }

    pub fn rref_tol(&self, tol: f64) -> (Self, Vec<usize>) {
        F::echelon(self, tol)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn rank_tol(&self, tol: f64) -> usize {
        self.rref_tol(tol).1.len()
    }

    /// Columns form a basis of `{x : self·x = 0}`; on the exact backend the
    /// basis is the canonical one read off the reduced echelon form.
    pub fn nullspace(&self) -> Self {
        self.nullspace_tol(DEFAULT_TOL)
    }

    pub fn nullspace_tol(&self, tol: f64) -> Self {
        let (r, piv) = self.rref_tol(tol);
        nullspace_from_rref(&r, &piv, self.cols)
    }

    /// Solves `self·X = b` for one particular solution, if consistent.
    pub fn solve(&self, b: &Self) -> Option<Self> {
        assert_eq!(self.rows, b.rows);
        let aug = self.hstack(b);
        let (r, piv) = aug.rref();
        if piv.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Self::zeros(self.cols, b.cols);
        for (k, &p) in piv.iter().enumerate() {
            for j in 0..b.cols {
                x[(p, j)] = r[(k, self.cols + j)].clone();
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "inverse of a {}×{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let (r, piv) = self.hstack(&Self::identity(n)).rref();
        if piv.len() < n || piv[n - 1] >= n {
            return Err(Error::Singular);
        }
        Ok(r.submatrix(0..n, n..2 * n))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Column-major flattening, `vec(A)`.
    pub fn vec_col_major(&self) -> Vec<F> {
        let mut v = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self[(i, j)].clone());
            }
        }
        v
    }

    pub fn from_col_major(rows: usize, cols: usize, v: &[F]) -> Self {
        assert_eq!(v.len(), rows * cols);
        Self::from_fn(rows, cols, |i, j| v[j * rows + i].clone())
    }

    /// Kronecker product `self ⊗ o`.
    pub fn kron(&self, o: &Self) -> Self {
        Self::from_fn(self.rows * o.rows, self.cols * o.cols, |i, j| {
            let a = &self[(i / o.rows, j / o.cols)];
            if a.is_zero() {
                return F::zero();
            }
            a.clone() * o[(i % o.rows, j % o.cols)].clone()
        })
    }

    /// Frobenius norm in double precision.
    pub fn norm_f64(&self) -> f64 {
        self.data.iter().map(|x| x.modulus().powi(2)).sum::<f64>().sqrt()
    }

    pub fn to_c64(&self) -> CMatrix {
        self.map(|x| C64(x.to_c64()))
    }
}

impl QMatrix {
    /// Clears denominators of each row and returns Gaussian-integer rows.
    fn integer_rows(&self) -> Vec<Vec<GaussInt>> {
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let scale = row.iter().fold(BigInt::one(), |acc, x| {
                    num_integer::Integer::lcm(&acc, &x.denom_lcm())
                });
                row.iter().map(|x| GaussInt::from_scaled(x, &scale)).collect()
            })
            .collect()
    }

    pub fn parse_rows(rows: &[&[&str]]) -> std::result::Result<Self, crate::error::ParseError> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::new();
        for r in rows {
            for s in r.iter() {
                data.push(s.parse::<GaussRat>()?);
            }
        }
        Ok(Matrix::from_vec(rows.len(), cols, data))
    }
}

/// Fraction-free (Bareiss) elimination to row-echelon form over ℤ[i], then
/// normalisation to the reduced form over ℚ(i).
pub(crate) fn rref_bareiss(m: &QMatrix) -> (QMatrix, Vec<usize>) {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.integer_rows();
    let mut prev = GaussInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (head, tail) = a.split_at_mut(r + 1);
        let piv_row = &head[r];
        let pv = &piv_row[c];
        for row in tail.iter_mut() {
            let lead = row[c].clone();
            for j in c + 1..cols {
                let mut x = pv.mul(&row[j]);
                if !lead.is_zero() && !piv_row[j].is_zero() {
                    x = x.sub(&lead.mul(&piv_row[j]));
                }
                row[j] = if x.is_zero() { x } else { x.div_exact(&prev) };
            }
            row[c] = GaussInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    // Back substitution on the echelon rows.
    let mut out: Vec<Vec<GaussRat>> = a
        .iter()
        .map(|row| row.iter().map(GaussInt::to_rat).collect())
        .collect();
    for (k, &pc) in pivots.iter().enumerate().rev() {
        let inv = out[k][pc].inv();
        for x in out[k][pc..].iter_mut().filter(|x| !x.is_zero()) {
            *x = &*x * &inv;
        }
        for i in 0..k {
            if out[i][pc].is_zero() {
                continue;
            }
            let f = out[i][pc].clone();
            let (upper, lower) = out.split_at_mut(k);
            let src = &lower[0];
            for j in pc..cols {
                if !src[j].is_zero() {
                    let t = &f * &src[j];
                    upper[i][j] -= &t;
                }
            }
        }
    }
    let data = out.into_iter().flatten().collect();
    (Matrix { rows, cols, data }, pivots)
}

/// Column-pivoted elimination; entries below `tol·max(1, max|a_ij|)` count as zero.
pub(crate) fn rref_float(m: &CMatrix, tol: f64) -> (CMatrix, Vec<usize>) {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let scale = m.data.iter().map(|x| x.modulus()).fold(1.0f64, f64::max);
    let eps = tol * scale;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (p, best) = (r..rows)
            .map(|i| (i, a[(i, c)].modulus()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= eps {
            for i in r..rows {
                a[(i, c)] = C64::zero();
            }
            continue;
        }
        for j in 0..cols {
            a.data.swap(r * cols + j, p * cols + j);
        }
        let inv = C64::one() / a[(r, c)];
        for j in 0..cols {
            a[(r, j)] = a[(r, j)] * inv;
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = a[(i, c)];
            if f.is_zero() {
                continue;
            }
            for j in 0..cols {
                let t = a[(r, j)];
                a[(i, j)] = a[(i, j)] - f * t;
            }
            a[(i, c)] = C64::zero();
        }
        pivots.push(c);
        r += 1;
    }
    for i in r..rows {
        for j in 0..cols {
            a[(i, j)] = C64::zero();
        }
    }
    (a, pivots)
}

pub(crate) fn nullspace_from_rref<F: Field>(r: &Matrix<F>, piv: &[usize], cols: usize) -> Matrix<F> {
    let free: Vec<usize> = (0..cols).filter(|c| !piv.contains(c)).collect();
    let mut out = Matrix::zeros(cols, free.len());
    for (k, &f) in free.iter().enumerate() {
        out[(f, k)] = F::one();
        for (row, &p) in piv.iter().enumerate() {
            out[(p, k)] = -r[(row, f)].clone();
        }
    }
    out
}

impl<F> Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<F> IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
        }
        write!(f, "] ({}×{})", self.rows, self.cols)
    }
}
