//! Small dense linear algebra generic over [`Scalar`], plus `f64` kernels on nalgebra
//! matrices. Singular value decompositions go through faer.

use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Inertia of a real symmetric bilinear form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Signature {
    pub const fn new(positive: usize, negative: usize, zero: usize) -> Self {
        Self {
            positive,
            negative,
            zero,
        }
    }

    pub fn rank(&self) -> usize {
        self.positive + self.negative
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.zero == 0
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zero == 0 {
            write!(f, "({},{})", self.positive, self.negative)
        } else {
            write!(f, "({},{},{})", self.positive, self.negative, self.zero)
        }
    }
}

/// Row-major dense matrix over a [`Scalar`].
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<S>]) -> Self {
        let c = columns.len();
        let r = columns.first().map_or(0, Vec::len);
        Self::from_fn(r, c, |i, j| columns[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        let mut term = a.clone();
                        term *= b;
                        out[(i, j)] += &term;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for (j, b) in v.iter().enumerate() {
                    let a = &self[(i, j)];
                    if !a.is_zero() && !b.is_zero() {
                        let mut term = a.clone();
                        term *= b;
                        acc += &term;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.zip_map(rhs, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.zip_map(rhs, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|a| a.clone() * s.clone())
    }

    pub fn neg(&self) -> Self {
        self.map(|a| -a.clone())
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn zip_map(&self, rhs: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.data.iter().all(|a| a.is_negligible(tol))
    }

    /// Largest absolute entry, as `f64`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.as_f64().abs()).fold(0.0, f64::max)
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].as_f64())
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn rank(&self, tol: f64) -> usize {
        S::mat_rank(self, tol)
    }

    pub fn nullspace(&self, tol: f64) -> Vec<Vec<S>> {
        S::mat_nullspace(self, tol)
    }

    pub fn inertia(&self, tol: f64) -> Signature {
        S::mat_inertia(self, tol)
    }

    pub fn det(&self) -> S {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = S::one();
        for col in 0..n {
            let Some(p) = pivot_row(&a, col, col, 0.0) else {
                return S::zero();
            };
            if p != col {
                a.swap_rows(p, col);
                det = -det;
            }
            let pivot = a[(col, col)].clone();
            det = det * pivot.clone();
            for r in col + 1..n {
                let factor = a[(r, col)].clone() / pivot.clone();
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = a[(r, c)].clone() - factor.clone() * a[(col, c)].clone();
                    a[(r, c)] = v;
                }
            }
        }
        det
    }

    /// Gauss–Jordan inverse; `None` if a pivot is negligible at `tol`.
    pub fn inverse(&self, tol: f64) -> Option<Self> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let p = pivot_row(&a, col, col, tol)?;
            a.swap_rows(p, col);
            inv.swap_rows(p, col);
            let pivot = a[(col, col)].clone();
            for c in 0..n {
                a[(col, c)] = a[(col, c)].clone() / pivot.clone();
                inv[(col, c)] = inv[(col, c)].clone() / pivot.clone();
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[(r, col)].clone();
                if factor.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let v = a[(r, c)].clone() - factor.clone() * a[(col, c)].clone();
                    a[(r, c)] = v;
                    let w = inv[(r, c)].clone() - factor.clone() * inv[(col, c)].clone();
                    inv[(r, c)] = w;
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Mat<f64> {
    pub fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;

    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

/// Row at or below `start` with the largest entry in `col`, if that entry is not
/// negligible.
fn pivot_row<S: Scalar>(a: &Mat<S>, col: usize, start: usize, tol: f64) -> Option<usize> {
    let mut best: Option<(usize, S)> = None;
    for r in start..a.rows {
        let v = a[(r, col)].abs();
        if v.is_negligible(tol) {
            continue;
        }
        if S::MODE == crate::scalar::ScalarMode::Exact {
            return Some(r);
        }
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((r, v));
        }
    }
    best.map(|(r, _)| r)
}

/// Reduced row echelon form; returns the pivot columns.
fn rref<S: Scalar>(a: &mut Mat<S>, tol: f64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(p) = pivot_row(a, col, row, tol) else {
            continue;
        };
        a.swap_rows(p, row);
        let pivot = a[(row, col)].clone();
        for c in col..a.cols {
            a[(row, c)] = a[(row, c)].clone() / pivot.clone();
        }
        for r in 0..a.rows {
            if r == row {
                continue;
            }
            let factor = a[(r, col)].clone();
            if factor.is_zero() {
                continue;
            }
            for c in col..a.cols {
                let v = a[(r, c)].clone() - factor.clone() * a[(row, c)].clone();
                a[(r, c)] = v;
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub(crate) fn rref_rank<S: Scalar>(m: &Mat<S>, tol: f64) -> usize {
    rref(&mut m.clone(), tol).len()
}

pub(crate) fn rref_nullspace<S: Scalar>(m: &Mat<S>, tol: f64) -> Vec<Vec<S>> {
    let mut a = m.clone();
    let pivots = rref(&mut a, tol);
    let free: Vec<usize> = (0..a.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![S::zero(); a.cols];
            v[f] = S::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -a[(r, f)].clone();
            }
            v
        })
        .collect()
}

/// Inertia by symmetric congruence elimination (exact over the rationals).
pub(crate) fn congruence_inertia<S: Scalar>(m: &Mat<S>, tol: f64) -> Signature {
    assert_eq!(m.rows, m.cols, "inertia of a non-square matrix");
    let n = m.rows;
    let mut a = m.clone();
    let mut sig = Signature::new(0, 0, 0);
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let has_diag = active.iter().position(|&i| !a[(i, i)].is_negligible(tol));
        let pivot = match has_diag {
            Some(pos) => active[pos],
            None => {
                let off = active.iter().enumerate().find_map(|(pi, &i)| {
                    active[pi + 1..]
                        .iter()
                        .find(|&&j| !a[(i, j)].is_negligible(tol))
                        .map(|&j| (i, j))
                });
                let Some((i, j)) = off else {
                    sig.zero += active.len();
                    break;
                };
                // row_i += row_j, col_i += col_j makes the (i, i) entry 2 a_ij
                for c in 0..n {
                    let v = a[(i, c)].clone() + a[(j, c)].clone();
                    a[(i, c)] = v;
                }
                for r in 0..n {
                    let v = a[(r, i)].clone() + a[(r, j)].clone();
                    a[(r, i)] = v;
                }
                i
            }
        };
        let d = a[(pivot, pivot)].clone();
        if d.is_positive() {
            sig.positive += 1;
        } else {
            sig.negative += 1;
        }
        active.retain(|&i| i != pivot);
        for &r in &active {
            let factor = a[(r, pivot)].clone() / d.clone();
            if factor.is_zero() {
                continue;
            }
            for &c in &active {
                let v = a[(r, c)].clone() - factor.clone() * a[(pivot, c)].clone();
                a[(r, c)] = v;
            }
            a[(r, pivot)] = S::zero();
        }
        for &c in &active {
            a[(pivot, c)] = S::zero();
        }
    }
    sig
}

fn threshold(scale: f64, tol: f64) -> f64 {
    tol * scale.max(1.0)
}

/// Full decomposition `m = U diag(s) Vᵀ`, `s` non-increasing.
#[derive(Clone, Debug)]
pub struct FullSvd {
    pub u: DMatrix<f64>,
    pub s: Vec<f64>,
    pub v: DMatrix<f64>,
}

fn to_faer(m: &DMatrix<f64>) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn svd(m: &DMatrix<f64>) -> FullSvd {
    if m.is_empty() {
        return FullSvd {
            u: DMatrix::identity(m.nrows(), m.nrows()),
            s: Vec::new(),
            v: DMatrix::identity(m.ncols(), m.ncols()),
        };
    }
    let dec = to_faer(m).svd().expect("SVD failed to converge");
    let diag = dec.S().column_vector();
    FullSvd {
        u: from_faer(dec.U()),
        s: (0..diag.nrows()).map(|i| diag[i]).collect(),
        v: from_faer(dec.V()),
    }
}

/// Singular values, non-increasing.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    to_faer(m).singular_values().expect("SVD failed to converge")
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, &b| a.max(b))
}

/// Rank by singular values, relative to `max(1, σ_max)`.
pub fn float_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    let sv = singular_values(m);
    let cut = threshold(max_of(&sv), tol);
    sv.iter().filter(|&&s| s > cut).count()
}

/// Orthonormal basis of the right nullspace, as columns.
pub fn float_nullspace(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let c = m.ncols();
    if c == 0 {
        return DMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return DMatrix::identity(c, c);
    }
    let dec = svd(m);
    let cut = threshold(max_of(&dec.s), tol);
    let rank = dec.s.iter().filter(|&&s| s > cut).count();
    dec.v.columns(rank, c - rank).into_owned()
}

/// Orthonormal basis of the column space.
pub fn float_column_space(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    if m.is_empty() {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let dec = svd(m);
    let cut = threshold(max_of(&dec.s), tol);
    let rank = dec.s.iter().filter(|&&s| s > cut).count();
    dec.u.columns(0, rank).into_owned()
}

/// Least-squares solution of `a x = b` through the pseudo-inverse, cutting singular values
/// below `tol · max(1, σ_max)`.
pub fn pseudo_solve(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let dec = svd(a);
    let cut = threshold(max_of(&dec.s), tol);
    let utb = dec.u.transpose() * b;
    let mut y = DMatrix::zeros(a.ncols(), b.ncols());
    for (i, &s) in dec.s.iter().enumerate() {
        if s > cut {
            for j in 0..b.ncols() {
                y[(i, j)] = utb[(i, j)] / s;
            }
        }
    }
    &dec.v * y
}

/// Inertia of the symmetric part of `m`, relative to `max(1, |λ|_max)`.
pub fn float_inertia(m: &DMatrix<f64>, tol: f64) -> Signature {
    let n = m.nrows();
    if n == 0 {
        return Signature::new(0, 0, 0);
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let cut = threshold(scale, tol);
    let mut sig = Signature::new(0, 0, 0);
    for &v in eig.eigenvalues.iter() {
        if v > cut {
            sig.positive += 1;
        } else if v < -cut {
            sig.negative += 1;
        } else {
            sig.zero += 1;
        }
    }
    sig
}

/// Reciprocal 2-norm condition number; `0` for singular input.
pub fn reciprocal_condition(m: &DMatrix<f64>) -> f64 {
    let sv = singular_values(m);
    let max = max_of(&sv);
    if max == 0.0 || sv.len() < m.nrows().max(m.ncols()) {
        return 0.0;
    }
    sv.iter().fold(f64::INFINITY, |a, &b| a.min(b)) / max
}

/// Column-stacked vectorisation.
pub fn vec_col(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(m.len(), m.iter().copied())
}

pub fn unvec_col(v: &[f64], rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_column_slice(rows, cols, v)
}

/// Kronecker product.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    DMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Frobenius-norm distance.
pub fn frob_dist(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm()
}

/// Matrix exponential of `t·X` when `X² = -Id`: `cos t · Id + sin t · X`.
pub fn exp_complex_structure(x: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    let n = x.nrows();
    DMatrix::identity(n, n) * t.cos() + x * t.sin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    fn q(v: i64) -> Rational {
        Rational::from_ratio(v, 1)
    }

    fn qmat(rows: &[&[i64]]) -> Mat<Rational> {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect())
    }

    #[test]
    fn exact_inertia_of_hyperbolic_plane() {
        let m = qmat(&[&[0, 1], &[1, 0]]);
        assert_eq!(m.inertia(0.0), Signature::new(1, 1, 0));
    }

    #[test]
    fn exact_inertia_with_kernel() {
        let m = qmat(&[&[1, 1, 0], &[1, 1, 0], &[0, 0, -3]]);
        assert_eq!(m.inertia(0.0), Signature::new(1, 1, 1));
    }

    #[test]
    fn nullspace_and_rank() {
        let m = qmat(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(m.rank(0.0), 1);
        let ns = m.nullspace(0.0);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(m.mul_vec(&v).iter().all(|x| *x == q(0)));
        }
    }

    #[test]
    fn inverse_and_det() {
        let m = qmat(&[&[2, 1], &[7, 4]]);
        assert_eq!(m.det(), q(1));
        let inv = m.inverse(0.0).unwrap();
        assert_eq!(m.mul(&inv), Mat::identity(2));
        assert!(qmat(&[&[1, 2], &[2, 4]]).inverse(0.0).is_none());
    }

    #[test]
    fn float_nullspace_wide_matrix() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
        let ns = float_nullspace(&m, 1e-12);
        assert_eq!(ns.ncols(), 2);
        assert!((&m * &ns).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn exact_and_float_inertia_agree(entries in proptest::collection::vec(-4i64..=4, 10)) {
            // random symmetric 4x4 from 10 upper-triangular entries
            let mut idx = 0;
            let mut m = Mat::<Rational>::zeros(4, 4);
            for i in 0..4 {
                for j in i..4 {
                    m[(i, j)] = q(entries[idx]);
                    m[(j, i)] = q(entries[idx]);
                    idx += 1;
                }
            }
            let exact = m.inertia(0.0);
            let float = float_inertia(&m.to_dmatrix(), 1e-9);
            prop_assert_eq!(exact, float);
        }

        #[test]
        fn congruence_inertia_is_invariant(d in proptest::collection::vec(-3i64..=3, 3), p in proptest::collection::vec(-3i64..=3, 9)) {
            let diag = Mat::from_fn(3, 3, |i, j| if i == j { q(d[i]) } else { q(0) });
            let pm = Mat::from_fn(3, 3, |i, j| q(p[3 * i + j]));
            prop_assume!(pm.det() != q(0));
            let congruent = pm.transpose().mul(&diag).mul(&pm);
            prop_assert_eq!(congruent.inertia(0.0), diag.inertia(0.0));
        }
    }
}
