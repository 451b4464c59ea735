//! Dense symmetric linear algebra: Jacobi eigenvalues, definiteness tests,
//! Kronecker lifts and Schur complements.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 100;

/// Symmetric matrix with full row-major storage. Entries (i,j) and (j,i) are
/// bitwise equal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> SymMatrix<T> {
    /// Builds a matrix from an entry function; the result is (F + Fᵀ)/2.
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> T) -> Self {
        assert!(dim >= 1, "SymMatrix needs dim >= 1");
        let mut data = vec![T::zero(); dim * dim];
        let half = T::of(0.5);
        for i in 0..dim {
            data[i * dim + i] = f(i, i);
            for j in (i + 1)..dim {
                let v = (f(i, j) + f(j, i)) * half;
                data[i * dim + j] = v;
                data[j * dim + i] = v;
            }
        }
        Self { dim, data }
    }

    pub fn from_row_major(dim: usize, data: &[T]) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {dim}x{dim} entries, got {}",
                data.len()
            )));
        }
        Ok(Self::from_fn(dim, |i, j| data[i * dim + j]))
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch("rows must form a square matrix".into()));
        }
        Ok(Self::from_fn(dim, |i, j| rows[i][j]))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| T::zero())
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![T::one(); dim])
    }

    pub fn diagonal(d: &[T]) -> Self {
        Self::from_fn(d.len(), |i, j| if i == j { d[i] } else { T::zero() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|x| x * c)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.dim, other.dim)));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { dim: self.dim, data })
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    pub fn trace(&self) -> T {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// All eigenvalues in ascending order, by cyclic Jacobi rotations.
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        if !self.is_finite() {
            return Err(Error::InvalidMatrix);
        }
        let n = self.dim;
        let mut a = self.data.clone();
        let thresh = T::of(1e-14).max(T::epsilon()) * self.frobenius_norm();
        let huge = T::max_value().sqrt();
        for _ in 0..MAX_SWEEPS {
            let off = off_diagonal_norm(&a, n);
            if off <= thresh || off == T::zero() {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq == T::zero() {
                        continue;
                    }
                    let theta = (a[q * n + q] - a[p * n + p]) / (T::two() * apq);
                    let t = if theta.abs() > huge {
                        T::of(0.5) / theta
                    } else {
                        let t = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
                        if theta < T::zero() {
                            -t
                        } else {
                            t
                        }
                    };
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                    a[p * n + q] = T::zero();
                    a[q * n + p] = T::zero();
                }
            }
        }
        let mut eig: Vec<T> = (0..n).map(|i| a[i * n + i]).collect();
        eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
        Ok(eig)
    }

    pub fn max_eigenvalue(&self) -> Result<T> {
        Ok(*self.eigenvalues()?.last().expect("dim >= 1"))
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        Ok(self.eigenvalues()?[0])
    }

    /// max eigenvalue ≤ tol·max(1, ‖M‖_F).
    pub fn is_nsd(&self, tol: T) -> Result<bool> {
        let scale = T::one().max(self.frobenius_norm());
        Ok(self.max_eigenvalue()? <= tol * scale)
    }

    /// min eigenvalue > tol·max(1, ‖M‖_F).
    pub fn is_pd(&self, tol: T) -> Result<bool> {
        let scale = T::one().max(self.frobenius_norm());
        Ok(self.min_eigenvalue()? > tol * scale)
    }

    /// M ⊗ I_p.
    pub fn kron_identity(&self, p: usize) -> Self {
        assert!(p >= 1, "kron_identity needs p >= 1");
        Self::from_fn(self.dim * p, |i, j| {
            if i % p == j % p {
                self.get(i / p, j / p)
            } else {
                T::zero()
            }
        })
    }

    pub fn principal_submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |i, j| self.get(idx[i], idx[j]))
    }

    /// Schur complement M/B of the negative definite pivot block B = M[block, block].
    /// Rows and columns not in `block` keep their relative order.
    pub fn schur_reduce(&self, block: &[usize], tol: T) -> Result<Self> {
        if block.is_empty() || block.iter().any(|&i| i >= self.dim) {
            return Err(Error::DimensionMismatch("pivot indices out of range".into()));
        }
        let rest: Vec<usize> = (0..self.dim).filter(|i| !block.contains(i)).collect();
        if rest.is_empty() {
            return Err(Error::DimensionMismatch("pivot block covers the whole matrix".into()));
        }
        let b = self.principal_submatrix(block);
        let bscale = T::one().max(b.frobenius_norm());
        if b.max_eigenvalue()? > -tol * bscale {
            return Err(Error::SingularBlock);
        }
        // Cholesky of −B, then solve (−B) X = M[block, rest].
        let k = block.len();
        let neg_b: Vec<T> = b.data.iter().map(|&x| -x).collect();
        let chol = cholesky(&neg_b, k).ok_or(Error::SingularBlock)?;
        let mut x = vec![T::zero(); k * rest.len()];
        for (c, &r) in rest.iter().enumerate() {
            let rhs: Vec<T> = block.iter().map(|&bi| self.get(bi, r)).collect();
            let sol = cholesky_solve(&chol, k, &rhs);
            for i in 0..k {
                x[i * rest.len() + c] = sol[i];
            }
        }
        // M_rr − M_rb B⁻¹ M_br = M_rr + M_rb (−B)⁻¹ M_br
        Ok(Self::from_fn(rest.len(), |i, j| {
            let corr: T = (0..k).map(|l| self.get(rest[i], block[l]) * x[l * rest.len() + j]).sum();
            self.get(rest[i], rest[j]) + corr
        }))
    }
}

fn off_diagonal_norm<T: Scalar>(a: &[T], n: usize) -> T {
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s = s + a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

fn cholesky<T: Scalar>(a: &[T], n: usize) -> Option<Vec<T>> {
    let mut l = vec![T::zero(); n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d = d - l[j * n + k] * l[j * n + k];
        }
        if d <= T::zero() {
            return None;
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s = s - l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    Some(l)
}

fn cholesky_solve<T: Scalar>(l: &[T], n: usize, b: &[T]) -> Vec<T> {
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] = y[i] - l[i * n + k] * y[k];
        }
        y[i] = y[i] / l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            y[i] = y[i] - l[k * n + i] * y[k];
        }
        y[i] = y[i] / l[i * n + i];
    }
    y
}

/// General dense matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] = out.data[i * other.cols + j] + a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len(), "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max)
    }

    /// Symmetric part, for matrices known to be symmetric.
    pub fn to_sym(&self) -> SymMatrix<T> {
        assert_eq!(self.rows, self.cols, "to_sym needs a square matrix");
        SymMatrix::from_fn(self.rows, |i, j| self.get(i, j))
    }
}

/// Sparse matrix as a triplet list. Used for the jump matrices, whose
/// deviation from the identity touches only a few rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMat<T> {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, T)>,
}

impl<T: Scalar> SparseMat<T> {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: Vec::new() }
    }

    pub fn push(&mut self, i: usize, j: usize, v: T) {
        if v != T::zero() {
            self.entries.push((i, j, v));
        }
    }

    pub fn to_dense(&self) -> Mat<T> {
        let mut m = Mat::zeros(self.rows, self.cols);
        for &(i, j, v) in &self.entries {
            m.set(i, j, m.get(i, j) + v);
        }
        m
    }

    /// out += (S ⊗ I_p) x, with x and out stacked in blocks of p.
    pub fn apply_kron_add(&self, x: &[T], p: usize, out: &mut [T]) {
        for &(i, j, v) in &self.entries {
            for k in 0..p {
                out[i * p + k] = out[i * p + k] + v * x[j * p + k];
            }
        }
    }
}

/// All-ones vector.
pub fn ones<T: Scalar>(n: usize) -> Vec<T> {
    vec![T::one(); n]
}

/// Canonical basis vector e_i with 0-based `i`.
pub fn basis<T: Scalar>(n: usize, i: usize) -> Vec<T> {
    let mut v = vec![T::zero(); n];
    v[i] = T::one();
    v
}
