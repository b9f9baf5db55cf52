//! Dense vectors and matrices, the diagonal sampling mask, and the spectral
//! estimates (operator norm, smallest positive eigenvalue) used to set step
//! schedules and growth constants.

use std::ops::{Deref, Index};

use crate::error::{check_dim, contract, Error, Result};

/// A finite real vector.
///
/// Construction rejects NaN and infinities. Arithmetic helpers return new
/// vectors; the solvers check finiteness of their iterates separately and
/// report divergence instead of panicking.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.iter().all(|v| v.is_finite()) {
            Ok(Self(entries))
        } else {
            Err(Error::NonFinite)
        }
    }

    /// Panics if any entry is not finite.
    pub fn from_slice(entries: &[f64]) -> Self {
        Self::new(entries.to_vec()).expect("vector entries must be finite")
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn filled(n: usize, value: f64) -> Self {
        Self(vec![value; n])
    }

    pub fn unit(n: usize, index: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[index] = 1.0;
        v
    }

    /// Wraps entries without the finiteness check. Callers that can produce
    /// non-finite values must test [`Vector::is_finite`] afterwards.
    pub(crate) fn from_vec_unchecked(entries: Vec<f64>) -> Self {
        Self(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn norm_sq(&self) -> f64 {
        dot(&self.0, &self.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_l1(&self) -> f64 {
        self.0.iter().map(|v| v.abs()).sum()
    }

    pub fn dist_sq(&self, other: &Vector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn dist(&self, other: &Vector) -> f64 {
        self.dist_sq(other).sqrt()
    }

    pub fn scaled(&self, s: f64) -> Vector {
        Self(self.0.iter().map(|v| v * s).collect())
    }

    pub fn add(&self, other: &Vector) -> Vector {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        self.zip_map(other, |a, b| a - b)
    }

    /// `self + s * other`
    pub fn add_scaled(&self, s: f64, other: &Vector) -> Vector {
        self.zip_map(other, |a, b| a + s * b)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        Self(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Vector, f: impl Fn(f64, f64) -> f64) -> Vector {
        debug_assert_eq!(self.len(), other.len());
        Self(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Row-major dense matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(contract("matrix dimensions must be positive"));
        }
        check_dim(rows * cols, data.len())?;
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// Panics on ragged or non-finite input; intended for literals.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(rows.len(), cols, data).expect("valid matrix literal")
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    /// `A x`
    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.cols, x.len())?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &[f64]) -> Vector {
        Vector::from_vec_unchecked((0..self.rows).map(|r| dot(self.row(r), x)).collect())
    }

    /// `Aᵀ y`
    pub fn apply_transpose(&self, y: &Vector) -> Result<Vector> {
        check_dim(self.rows, y.len())?;
        Ok(self.apply_transpose_unchecked(y))
    }

    pub(crate) fn apply_transpose_unchecked(&self, y: &[f64]) -> Vector {
        let mut out = vec![0.0; self.cols];
        for (r, &yr) in y.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                *o += a * yr;
            }
        }
        Vector::from_vec_unchecked(out)
    }

    /// `AᵀA`
    pub fn gram(&self) -> Self {
        let n = self.cols;
        let mut g = Self::zeros(n, n);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..n {
                for j in i..n {
                    g.data[i * n + j] += row[i] * row[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                g.data[i * n + j] = g.data[j * n + i];
            }
        }
        g
    }

    fn is_square(&self) -> bool {
        self.rows == self.cols
    }
}

/// Diagonal 0/1 operator selecting observed coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalMask {
    keep: Vec<bool>,
}

impl DiagonalMask {
    pub fn new(keep: Vec<bool>) -> Self {
        Self { keep }
    }

    /// Every entry must be exactly 0 or 1.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        diag.iter()
            .map(|&d| {
                if d == 1.0 {
                    Ok(true)
                } else if d == 0.0 {
                    Ok(false)
                } else {
                    Err(contract(format!("mask entry {d} is not 0 or 1")))
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn len(&self) -> usize {
        self.keep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keep.is_empty()
    }

    pub fn is_kept(&self, i: usize) -> bool {
        self.keep[i]
    }

    pub fn kept_count(&self) -> usize {
        self.keep.iter().filter(|&&k| k).count()
    }

    pub fn flags(&self) -> &[bool] {
        &self.keep
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.len(), x.len())?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &[f64]) -> Vector {
        Vector::from_vec_unchecked(
            x.iter()
                .zip(&self.keep)
                .map(|(&v, &k)| if k { v } else { 0.0 })
                .collect(),
        )
    }
}

pub const DEFAULT_SPECTRAL_TOL: f64 = 1e-10;
pub const DEFAULT_SPECTRAL_MAX_ITER: usize = 10_000;
/// Eigenvalues at or below this multiple of the largest one count as zero.
pub const RANK_THRESHOLD: f64 = 1e-10;

/// Largest singular value of `a` by power iteration on `AᵀA`.
///
/// Starts from the normalized all-ones vector so that repeated calls on the
/// same matrix return bit-identical estimates. If that start lies in the
/// null space of `A`, the coordinate vectors are tried in order.
pub fn operator_norm(a: &DenseMatrix, tol: f64, max_iter: usize) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(contract("tolerance must be positive"));
    }
    if a.is_zero() {
        return Err(contract("operator_norm requires a nonzero matrix"));
    }
    let n = a.cols();
    let starts = std::iter::once(Vector::filled(n, 1.0)).chain((0..n).map(|j| Vector::unit(n, j)));
    for start in starts {
        let mut v = start.scaled(1.0 / start.norm());
        let mut sigma = a.apply_unchecked(&v).norm();
        if sigma == 0.0 {
            continue;
        }
        for _ in 0..max_iter {
            let w = a.apply_transpose_unchecked(&a.apply_unchecked(&v));
            let wn = w.norm();
            v = w.scaled(1.0 / wn);
            let next = a.apply_unchecked(&v).norm();
            if (next - sigma).abs() <= tol * next {
                return Ok(next);
            }
            sigma = next;
        }
        return Err(Error::Unconverged {
            estimate: sigma,
            iterations: max_iter,
            last_iterate: v,
        });
    }
    Err(contract("operator_norm requires a nonzero matrix"))
}

/// All eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi
/// rotations. Sweeps stop once the off-diagonal mass falls below
/// `tol` relative to the Frobenius norm.
pub fn symmetric_eigenvalues(g: &DenseMatrix, tol: f64) -> Result<Vec<f64>> {
    if !g.is_square() {
        return Err(Error::DimensionMismatch {
            expected: g.rows(),
            found: g.cols(),
        });
    }
    let n = g.rows();
    let mut m = g.data().to_vec();
    for i in 0..n {
        for j in 0..i {
            let (a, b) = (m[i * n + j], m[j * n + i]);
            if (a - b).abs() > 1e-9 * (1.0 + a.abs().max(b.abs())) {
                return Err(contract("matrix is not symmetric"));
            }
        }
    }
    let frob: f64 = m.iter().map(|v| v * v).sum::<f64>().sqrt();
    if frob == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let off = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[i * n + j] * m[i * n + j];
                }
            }
        }
        s.sqrt()
    };
    let tol = tol.min(1e-12);
    for _sweep in 0..100 {
        if off(&m) <= tol * frob {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Smallest eigenvalue of a symmetric positive semidefinite matrix above
/// `RANK_THRESHOLD` times the largest one.
pub fn smallest_positive_eigenvalue(g: &DenseMatrix, tol: f64) -> Result<f64> {
    let eig = symmetric_eigenvalues(g, tol)?;
    let largest = eig.last().copied().unwrap_or(0.0);
    if largest <= 0.0 {
        return Err(Error::NoPositiveEigenvalue);
    }
    let cut = RANK_THRESHOLD * largest;
    eig.into_iter()
        .find(|&l| l > cut)
        .ok_or(Error::NoPositiveEigenvalue)
}

/// Solves `G x = rhs` for symmetric positive definite `G` by Cholesky.
pub fn solve_spd(g: &DenseMatrix, rhs: &Vector) -> Result<Vector> {
    let n = g.rows();
    check_dim(n, g.cols())?;
    check_dim(n, rhs.len())?;
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = g.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(contract("matrix is not positive definite"));
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i * n + k] * y[k]).sum();
        y[i] = (rhs[i] - s) / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[k * n + i] * x[k]).sum();
        x[i] = (y[i] - s) / l[i * n + i];
    }
    Vector::new(x)
}
