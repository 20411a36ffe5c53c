//! Two-subspace theory in floating point: the Halmos five-part decomposition,
//! principal angles, and classification of two-subspace systems.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::numeric::{from_dmatrix, orthonormal_basis, to_dmatrix};
use crate::scalar::{Field, DEFAULT_TOL};
use crate::subspace::Subspace;
use crate::system::SubspaceSystem;

/// Angles within this distance of `0` or `π/2` count as corner directions.
pub const CORNER_THRESHOLD: f64 = 1e-8;

/// `H = (E∩F) ⊕ (K⊕K) ⊕ (E∩F⊥) ⊕ (E⊥∩F) ⊕ (E⊥∩F⊥)`, where on `K⊕K` the pair is
/// `E = K⊕0` and `F = {(cos θ·x, sin θ·x)}`.
#[derive(Clone, Debug)]
pub struct TwoSubspaceDecomposition {
    pub intersection: usize,
    /// `dim K`; the generic part has dimension `2·generic`.
    pub generic: usize,
    pub e_and_f_perp: usize,
    pub e_perp_and_f: usize,
    pub e_perp_and_f_perp: usize,
    /// Angles of the generic part, ascending, each in `(0, π/2)`.
    pub angles: Vec<f64>,
    /// Unitary whose columns are, in order: `E∩F`, the generic `E` directions,
    /// their partners in `E⊥`, `E∩F⊥`, `E⊥∩F`, `E⊥∩F⊥`.
    pub unitary: CMatrix,
    /// Largest deviation of `W*P_E W`, `W*P_F W`, `W*W` from the five-block model.
    pub residual: f64,
}

impl TwoSubspaceDecomposition {
    pub fn part_dims(&self) -> [usize; 5] {
        [self.intersection, self.generic, self.e_and_f_perp, self.e_perp_and_f, self.e_perp_and_f_perp]
    }
}

fn onb(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    to_dmatrix(&orthonormal_basis(&from_dmatrix(m), DEFAULT_TOL))
}

fn proj(q: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    q * q.adjoint()
}

fn angle_to(x: &DVector<Complex64>, p: &DMatrix<Complex64>, perp: &DMatrix<Complex64>) -> f64 {
    (perp * x).norm().atan2((p.adjoint() * x).norm())
}

/// Directions `x = Q·v` of `span Q` with their angle to `span P`, via the SVD
/// of the part of `Q` orthogonal to `P`. Directions away from `span P` are
/// then refined by diagonalising `XᴴP_P X`, which the SVD alone leaves
/// accurate only to about `1e-9` when sines cluster near 1.
fn principal_directions(q: &DMatrix<Complex64>, p: &DMatrix<Complex64>) -> Vec<(f64, DVector<Complex64>)> {
    let d = q.nrows();
    let k = q.ncols();
    if k == 0 {
        return vec![];
    }
    let perp = DMatrix::<Complex64>::identity(d, d) - proj(p);
    let residual = &perp * q;
    // Right singular vectors of a d×k matrix form a full basis of ℂ^k when d ≥ k.
    let svd = residual.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let (mut out, rest): (Vec<_>, Vec<_>) = (0..vt.nrows())
        .map(|j| {
            let x = q * vt.row(j).adjoint();
            (angle_to(&x, p, &perp), x)
        })
        .partition(|(theta, _)| *theta < CORNER_THRESHOLD);
    if !rest.is_empty() {
        let xs = hstack(&rest.into_iter().map(|(_, x)| x).collect::<Vec<_>>(), d);
        let px = p.adjoint() * &xs;
        let g = px.adjoint() * px;
        let v = g.symmetric_eigen().eigenvectors;
        let refined = xs * v;
        for j in 0..refined.ncols() {
            let x = refined.column(j).into_owned();
            out.push((angle_to(&x, p, &perp), x));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn hstack(cols: &[DVector<Complex64>], d: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::<Complex64>::zeros(d, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// The Halmos decomposition of the pair `(E, F)`.
pub fn halmos_decompose<F: Field>(e: &Subspace<F>, f: &Subspace<F>) -> Result<TwoSubspaceDecomposition> {
    if e.ambient_dim() != f.ambient_dim() {
        return Err(Error::DimensionMismatch("subspaces of different ambient spaces".into()));
    }
    let d = e.ambient_dim();
    let qe = onb(&to_dmatrix(e.basis()));
    let qf = onb(&to_dmatrix(f.basis()));
    let half_pi = std::f64::consts::FRAC_PI_2;

    let mut both = Vec::new();
    let mut e_only = Vec::new();
    let mut generic: Vec<(f64, DVector<Complex64>)> = Vec::new();
    for (theta, x) in principal_directions(&qe, &qf) {
        if theta < CORNER_THRESHOLD {
            both.push(x);
        } else if theta > half_pi - CORNER_THRESHOLD {
            e_only.push(x);
        } else {
            generic.push((theta, x));
        }
    }
    let f_only: Vec<_> = principal_directions(&qf, &qe)
        .into_iter()
        .filter(|(t, _)| *t > half_pi - CORNER_THRESHOLD)
        .map(|(_, y)| y)
        .collect();
    let pe_perp = DMatrix::<Complex64>::identity(d, d) - proj(&qe);
    let xs: Vec<_> = generic.iter().map(|(_, x)| x.clone()).collect();
    // Partner of x: the unit vector w ∈ E⊥ with P_F x ∥ cos θ·x + sin θ·w.
    let ws: Vec<_> = xs
        .iter()
        .map(|x| {
            let w = &pe_perp * (&qf * (qf.adjoint() * x));
            let n = w.norm();
            w / Complex64::new(n, 0.0)
        })
        .collect();

    let mut cols: Vec<DVector<Complex64>> = Vec::new();
    cols.extend(both.iter().cloned());
    cols.extend(xs.iter().cloned());
    cols.extend(ws.iter().cloned());
    cols.extend(e_only.iter().cloned());
    cols.extend(f_only.iter().cloned());
    let w0 = hstack(&cols, d);
    let rest = DMatrix::<Complex64>::identity(d, d) - proj(&w0);
    let eig = rest.symmetric_eigen();
    let mut tail = Vec::new();
    for j in 0..d {
        if eig.eigenvalues[j] > 0.5 {
            tail.push(eig.eigenvectors.column(j).into_owned());
        }
    }
    cols.extend(tail.iter().cloned());
    let w = hstack(&cols, d);

    // Model projections in the new basis.
    let (a, g, b, c) = (both.len(), generic.len(), e_only.len(), f_only.len());
    let mut me = DMatrix::<Complex64>::zeros(d, d);
    let mut mf = DMatrix::<Complex64>::zeros(d, d);
    let one = Complex64::new(1.0, 0.0);
    for i in 0..a {
        me[(i, i)] = one;
        mf[(i, i)] = one;
    }
    for (j, (theta, _)) in generic.iter().enumerate() {
        let (s, co) = theta.sin_cos();
        let (x, y) = (a + j, a + g + j);
        me[(x, x)] = one;
        mf[(x, x)] = Complex64::new(co * co, 0.0);
        mf[(x, y)] = Complex64::new(co * s, 0.0);
        mf[(y, x)] = Complex64::new(co * s, 0.0);
        mf[(y, y)] = Complex64::new(s * s, 0.0);
    }
    for i in 0..b {
        let k = a + 2 * g + i;
        me[(k, k)] = one;
    }
    for i in 0..c {
        let k = a + 2 * g + b + i;
        mf[(k, k)] = one;
    }
    let residual = if d == 0 {
        0.0
    } else {
        let wa = w.adjoint();
        let r1 = max_abs(&(&wa * proj(&qe) * &w - &me));
        let r2 = max_abs(&(&wa * proj(&qf) * &w - &mf));
        let r3 = max_abs(&(&wa * &w - DMatrix::<Complex64>::identity(d, d)));
        r1.max(r2).max(r3)
    };
    let angles = generic.iter().map(|(t, _)| *t).collect();
    Ok(TwoSubspaceDecomposition {
        intersection: a,
        generic: g,
        e_and_f_perp: b,
        e_perp_and_f: c,
        e_perp_and_f_perp: tail.len(),
        angles,
        unitary: from_dmatrix(&w),
        residual,
    })
}

/// Multiplicities of the four indecomposable two-subspace systems plus the
/// generic angle list.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoClassification {
    /// Counts of `(ℂ;ℂ,0)`, `(ℂ;0,ℂ)`, `(ℂ;ℂ,ℂ)`, `(ℂ;0,0)` among the corners.
    pub corners: [usize; 4],
    pub angles: Vec<f64>,
}

impl TwoClassification {
    /// Multiplicities after splitting each generic block as `(ℂ;ℂ,0) ⊕ (ℂ;0,ℂ)`.
    pub fn type_multiplicities(&self) -> [usize; 4] {
        let g = self.angles.len();
        let [a, b, c, d] = self.corners;
        [a + g, b + g, c, d]
    }
}

pub fn classify_two_system<F: Field>(s: &SubspaceSystem<F>) -> Result<TwoClassification> {
    if s.n() != 2 {
        return Err(Error::ArityMismatch(2, s.n()));
    }
    let h = halmos_decompose(s.subspace(0), s.subspace(1))?;
    Ok(TwoClassification {
        corners: [h.e_and_f_perp, h.e_perp_and_f, h.intersection, h.e_perp_and_f_perp],
        angles: h.angles,
    })
}
