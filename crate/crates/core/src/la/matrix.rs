use std::fmt;
use std::ops::{Index, IndexMut};

use super::kernels;
use crate::{Error, Result};

/// Column-major dense real matrix.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                write!(f, "{:>12.5e} ", self[(i, j)])?;
            }
            if self.cols > 8 {
                write!(f, "...")?;
            }
            writeln!(f)?;
        }
        if self.rows > 8 {
            writeln!(f, "  ...")?;
        }
        write!(f, "]")
    }
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::eye(n, n)
    }

    /// Rectangular identity: ones on the main diagonal.
    pub fn eye(rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows.min(cols) {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from column-major data, rejecting wrong lengths and
    /// non-finite entries.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "data length {} does not match {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos % rows.max(1),
                col: pos / rows.max(1),
            });
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    /// Builds a matrix from row slices (convenient for literals in tests).
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let mut data = vec![0.0; r * c];
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                data[j * r + i] = *v;
            }
        }
        Self::from_col_major(r, c, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn from_diag(rows: usize, cols: usize, diag: &[f64]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, d) in diag.iter().enumerate().take(rows.min(cols)) {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * columns.len());
        for c in columns {
            if c.len() != rows {
                return Err(Error::DimensionMismatch("column length".into()));
            }
            data.extend_from_slice(c);
        }
        Self::from_col_major(rows, columns.len(), data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.cols).map(|j| self[(i, j)]).collect()
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            let c = self.col(j);
            for (i, v) in c.iter().enumerate() {
                t.data[i * self.cols + j] = *v;
            }
        }
        t
    }

    /// Columns `start..end` as a new matrix.
    pub fn columns(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.cols, "column range out of bounds");
        DenseMatrix {
            rows: self.rows,
            cols: end - start,
            data: self.data[start * self.rows..end * self.rows].to_vec(),
        }
    }

    /// Rows `start..end` as a new matrix.
    pub fn row_range(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.rows, "row range out of bounds");
        let r = end - start;
        let mut out = Self::zeros(r, self.cols);
        for j in 0..self.cols {
            out.col_mut(j).copy_from_slice(&self.col(j)[start..end]);
        }
        out
    }

    /// Horizontal concatenation `[self other]`.
    pub fn hcat(&self, other: &DenseMatrix) -> Result<Self> {
        if self.cols == 0 {
            return Ok(other.clone());
        }
        if other.cols == 0 {
            return Ok(self.clone());
        }
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "hcat {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols + other.cols,
            data,
        })
    }

    /// Vertical concatenation `[self; other]`.
    pub fn vcat(&self, other: &DenseMatrix) -> Result<Self> {
        if self.rows == 0 {
            return Ok(other.clone());
        }
        if other.rows == 0 {
            return Ok(self.clone());
        }
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "vcat {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let rows = self.rows + other.rows;
        let mut out = Self::zeros(rows, self.cols);
        for j in 0..self.cols {
            let c = out.col_mut(j);
            c[..self.rows].copy_from_slice(self.col(j));
            c[self.rows..].copy_from_slice(other.col(j));
        }
        Ok(out)
    }

    /// Appends columns of `other` in place.
    pub fn append_columns(&mut self, other: &DenseMatrix) -> Result<()> {
        if other.cols == 0 {
            return Ok(());
        }
        if self.cols == 0 {
            *self = other.clone();
            return Ok(());
        }
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("append_columns".into()));
        }
        self.data.extend_from_slice(&other.data);
        self.cols += other.cols;
        Ok(())
    }

    /// `self * other`
    pub fn matmul(&self, other: &DenseMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "matmul {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut c = Self::zeros(self.rows, other.cols);
        kernels::gemm_nn_acc(
            self.rows,
            other.cols,
            self.cols,
            1.0,
            &self.data,
            self.rows.max(1),
            &other.data,
            other.rows.max(1),
            &mut c.data,
            self.rows.max(1),
        );
        Ok(c)
    }

    /// `self^T * other`
    pub fn t_matmul(&self, other: &DenseMatrix) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "t_matmul ({}x{})^T * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut c = Self::zeros(self.cols, other.cols);
        kernels::gemm_tn(
            self.cols,
            other.cols,
            self.rows,
            &self.data,
            self.rows.max(1),
            &other.data,
            other.rows.max(1),
            &mut c.data,
            self.cols.max(1),
        );
        Ok(c)
    }

    /// `self * other^T`
    pub fn matmul_t(&self, other: &DenseMatrix) -> Result<Self> {
        self.matmul(&other.transpose())
    }

    /// `self - Q (Q^T self)`: removes the components in range(Q).
    /// An empty `q` (zero columns) leaves `self` unchanged.
    pub fn project_out(&self, q: &DenseMatrix) -> Result<Self> {
        if q.cols == 0 {
            return Ok(self.clone());
        }
        let coeffs = q.t_matmul(self)?;
        let mut out = self.clone();
        kernels::gemm_nn_acc(
            q.rows,
            self.cols,
            q.cols,
            -1.0,
            &q.data,
            q.rows.max(1),
            &coeffs.data,
            coeffs.rows.max(1),
            &mut out.data,
            self.rows.max(1),
        );
        Ok(out)
    }

    /// `self -= a * b`
    pub fn sub_matmul(&mut self, a: &DenseMatrix, b: &DenseMatrix) -> Result<()> {
        if a.rows != self.rows || b.cols != self.cols || a.cols != b.rows {
            return Err(Error::DimensionMismatch("sub_matmul".into()));
        }
        kernels::gemm_nn_acc(
            a.rows,
            b.cols,
            a.cols,
            -1.0,
            &a.data,
            a.rows.max(1),
            &b.data,
            b.rows.max(1),
            &mut self.data,
            self.rows.max(1),
        );
        Ok(())
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn zip_with(&self, other: &DenseMatrix, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(format!(
                "elementwise {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    /// Multiplies column j by `d[j]`.
    pub fn scale_columns(&self, d: &[f64]) -> Self {
        let mut out = self.clone();
        for (j, s) in d.iter().enumerate().take(self.cols) {
            out.col_mut(j).iter_mut().for_each(|v| *v *= s);
        }
        out
    }

    /// Multiplies row i by `d[i]`.
    pub fn scale_rows(&self, d: &[f64]) -> Self {
        let mut out = self.clone();
        for j in 0..self.cols {
            for (v, s) in out.col_mut(j).iter_mut().zip(d) {
                *v *= s;
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        kernels::nrm2(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `Q^T Q - I`, used for orthonormality diagnostics.
    pub fn gram_defect(&self) -> Self {
        let mut g = self.t_matmul(self).expect("square gram");
        for i in 0..g.rows {
            g[(i, i)] -= 1.0;
        }
        g
    }

    /// `(M + M^T) / 2`
    pub fn symmetrize(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(DenseMatrix::from_fn(self.rows, self.cols, |i, j| {
            0.5 * (self[(i, j)] + self[(j, i)])
        }))
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|v| **v != 0.0).count()
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
        DenseMatrix::from_fn(a.rows(), b.cols(), |i, j| {
            (0..a.cols()).map(|p| a[(i, p)] * b[(p, j)]).sum()
        })
    }

    #[test]
    fn rejects_non_finite() {
        let err = DenseMatrix::from_col_major(2, 1, vec![1.0, f64::NAN]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { row: 1, col: 0 }));
        assert!(DenseMatrix::from_col_major(2, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn products_match_naive() {
        let a = DenseMatrix::from_fn(7, 9, |i, j| ((i * 3 + j * 5) % 11) as f64 - 5.0);
        let b = DenseMatrix::from_fn(9, 6, |i, j| ((i * 7 + j) % 5) as f64 * 0.5);
        let c = a.matmul(&b).unwrap();
        let r = naive(&a, &b);
        assert!(c.sub(&r).unwrap().max_abs() < 1e-12);
        let ct = a.transpose().t_matmul(&b).unwrap();
        assert!(ct.sub(&r).unwrap().max_abs() < 1e-12);
        assert!(a.matmul(&a).is_err());
    }

    #[test]
    fn concatenation_and_slicing() {
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let b = a.hcat(&a).unwrap();
        assert_eq!(b.shape(), (2, 4));
        assert_eq!(b.columns(2, 4), a);
        let v = a.vcat(&a).unwrap();
        assert_eq!(v.row_range(2, 4), a);
        assert_eq!(a.transpose()[(0, 1)], 3.0);
        let empty = DenseMatrix::zeros(2, 0);
        assert_eq!(empty.hcat(&a).unwrap(), a);
    }
}
