//! Dense row-major matrices and exact Kronecker algebra.
//!
//! The vectorization convention throughout this crate is **row-stacking**:
//! `vectorize([[a, b], [c, d]]) = [a, b, c, d]`. Most linear-algebra texts
//! stack columns instead; the rank-one identity
//! `rearrange(kron(A, B)) = vectorize(A) · vectorize(B)ᵀ` only holds with the
//! row-major convention, so it is used consistently everywhere.

use crate::error::{KopaError, Result};

/// Row-major dense matrix of `f64`. The universal carrier for observations,
/// factors, noise and rearranged matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Build from row-major data; checks the length and that every entry is
    /// finite.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(KopaError::dim("matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(KopaError::dim(format!(
                "data length {} does not match {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(KopaError::domain(format!(
                "non-finite entry {} at flat index {}",
                data[pos], pos
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    /// Internal constructor for values produced by our own arithmetic.
    pub(crate) fn from_parts(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        DenseMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix::from_parts(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Build from nested rows (test and example convenience).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(KopaError::dim("no rows"));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(KopaError::dim("ragged rows"));
        }
        DenseMatrix::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn frob_norm_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn frob_norm(&self) -> f64 {
        self.frob_norm_sq().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0)
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut out = vec![0.0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        DenseMatrix::from_parts(self.cols, self.rows, out)
    }

    pub fn scale(&self, a: f64) -> DenseMatrix {
        DenseMatrix::from_parts(self.rows, self.cols, self.data.iter().map(|x| a * x).collect())
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &DenseMatrix, f: impl Fn(f64, f64) -> f64) -> Result<DenseMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(KopaError::dim(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(DenseMatrix::from_parts(self.rows, self.cols, data))
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(KopaError::dim(format!(
                "matmul shape mismatch: {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.data[i * self.cols + k];
                if aik == 0.0 {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                let orow = &mut out[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += aik * b;
                }
            }
        }
        Ok(DenseMatrix::from_parts(self.rows, other.cols, out))
    }

    /// y = M v
    pub(crate) fn matvec(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let mut acc = 0.0;
            for (&r, &x) in row.iter().zip(v) {
                acc += r * x;
            }
            *o = acc;
        }
    }

    /// self += s·u·vᵀ (rank-one update).
    pub fn add_scaled_outer(&mut self, s: f64, u: &[f64], v: &[f64]) {
        assert_eq!(u.len(), self.rows);
        assert_eq!(v.len(), self.cols);
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0.0 {
                continue;
            }
            let c = s * ui;
            let row = &mut self.data[i * self.cols..(i + 1) * self.cols];
            for (x, &vj) in row.iter_mut().zip(v) {
                *x += c * vj;
            }
        }
    }

    /// y = Mᵀ v, streamed row-major (axpy per row).
    pub(crate) fn matvec_t(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        out.fill(0.0);
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (o, &r) in out.iter_mut().zip(row) {
                *o += vi * r;
            }
        }
    }
}

/// Kronecker product: block (i, j) of the result is `a[i][j] * B`.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    let rows = a
        .rows
        .checked_mul(b.rows)
        .ok_or_else(|| KopaError::dim("kron row count overflows"))?;
    let cols = a
        .cols
        .checked_mul(b.cols)
        .ok_or_else(|| KopaError::dim("kron column count overflows"))?;
    rows.checked_mul(cols)
        .ok_or_else(|| KopaError::dim("kron result size overflows"))?;

    let mut out = vec![0.0; rows * cols];
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a.get(i, j);
            for k in 0..b.rows {
                let dst_row = i * b.rows + k;
                let dst = &mut out[dst_row * cols + j * b.cols..dst_row * cols + (j + 1) * b.cols];
                for (d, &bv) in dst.iter_mut().zip(b.row(k)) {
                    *d = aij * bv;
                }
            }
        }
    }
    Ok(DenseMatrix::from_parts(rows, cols, out))
}

/// Row-stacking vectorization (see module docs; this is *not* the usual
/// column-stacking `vec`).
pub fn vectorize(a: &DenseMatrix) -> Vec<f64> {
    a.data.clone()
}

/// Inverse of [`vectorize`]: restore a length p·q sequence into a p×q matrix.
pub fn unvectorize(v: &[f64], p: usize, q: usize) -> Result<DenseMatrix> {
    if v.len() != p * q {
        return Err(KopaError::dim(format!(
            "vector length {} does not match {}x{}",
            v.len(),
            p,
            q
        )));
    }
    DenseMatrix::new(p, q, v.to_vec())
}

/// Zero-pad at the right/bottom to the next powers of two. De-meaning before
/// padding is the caller's responsibility.
pub fn pad_to_dyadic(a: &DenseMatrix) -> DenseMatrix {
    let rows = a.rows.next_power_of_two();
    let cols = a.cols.next_power_of_two();
    if rows == a.rows && cols == a.cols {
        return a.clone();
    }
    let mut out = DenseMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        out.data_mut()[i * cols..i * cols + a.cols].copy_from_slice(a.row(i));
    }
    out
}
