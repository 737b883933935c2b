use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Dense row-major matrix.
///
/// Products and sums are evaluated by plain loops in index order so results
/// are bit-identical across runs; the only delegated numeric routine is the
/// symmetric eigensolve behind [`Matrix::opnorm`] and
/// [`Matrix::symmetric_eigenvalues`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Matrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(CoreError::ShapeMismatch {
                    context: format!("row {i} has length {}, expected {ncols}", row.len()),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { data, rows: nrows, cols: ncols })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { data: vec![0.0; rows * cols], rows, cols }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(CoreError::ShapeMismatch {
                context: format!(
                    "cannot multiply {}x{} by {}x{}",
                    self.rows, self.cols, other.rows, other.cols
                ),
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0.0;
                for k in 0..self.cols {
                    acc += self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(CoreError::ShapeMismatch {
                context: format!(
                    "cannot subtract {}x{} from {}x{}",
                    other.rows, other.cols, self.rows, self.cols
                ),
            });
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(CoreError::ShapeMismatch {
                context: format!(
                    "cannot add {}x{} to {}x{}",
                    other.rows, other.cols, self.rows, self.cols
                ),
            });
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a += b;
        }
        Ok(out)
    }

    pub fn scale(&self, factor: f64) -> Matrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= factor;
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Row-vector times matrix, in index order.
    pub fn row_vec_mul(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.rows {
            return Err(CoreError::DimensionMismatch { expected: self.rows, got: v.len() });
        }
        let mut out = vec![0.0; self.cols];
        for (j, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (i, vi) in v.iter().enumerate() {
                acc += vi * self.get(i, j);
            }
            *slot = acc;
        }
        Ok(out)
    }

    /// Matrix times column vector, in index order.
    pub fn mat_vec_mul(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(CoreError::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        let mut out = vec![0.0; self.rows];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, vj) in v.iter().enumerate() {
                acc += self.get(i, j) * vj;
            }
            *slot = acc;
        }
        Ok(out)
    }

    /// Spectral norm, computed as the square root of the largest eigenvalue
    /// of the Gram matrix `AᵀA`.
    pub fn opnorm(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        let a = DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j));
        let gram = a.transpose() * &a;
        let sym = (&gram + gram.transpose()).scale(0.5);
        let eigs = sym.symmetric_eigenvalues();
        let max = eigs.iter().fold(0.0f64, |m, &v| m.max(v));
        max.max(0.0).sqrt()
    }

    /// Eigenvalues of a symmetric matrix, sorted in descending order.
    /// The caller is responsible for symmetry; the matrix is symmetrized
    /// as `(M + Mᵀ)/2` before the solve.
    pub fn symmetric_eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_square() {
            return Err(CoreError::ShapeMismatch {
                context: format!("eigenvalues of a {}x{} matrix", self.rows, self.cols),
            });
        }
        let a = DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j));
        let sym = (&a + a.transpose()).scale(0.5);
        let mut eigs: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
        eigs.sort_by(|x, y| y.partial_cmp(x).expect("eigenvalues are finite"));
        Ok(eigs)
    }

    /// Full symmetric eigen-decomposition: eigenvalue/eigenvector pairs in
    /// descending eigenvalue order, eigenvectors as rows.
    pub fn symmetric_eigen(&self) -> Result<Vec<(f64, Vec<f64>)>> {
        if !self.is_square() {
            return Err(CoreError::ShapeMismatch {
                context: format!("eigen-decomposition of a {}x{} matrix", self.rows, self.cols),
            });
        }
        let a = DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j));
        let sym = (&a + a.transpose()).scale(0.5);
        let decomp = sym.symmetric_eigen();
        let mut pairs: Vec<(f64, Vec<f64>)> = decomp
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(k, &val)| {
                let vec: Vec<f64> = decomp.eigenvectors.column(k).iter().copied().collect();
                (val, vec)
            })
            .collect();
        pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).expect("eigenvalues are finite"));
        Ok(pairs)
    }
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = CoreError;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Matrix::from_rows(rows)
    }
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        m.to_rows()
    }
}
