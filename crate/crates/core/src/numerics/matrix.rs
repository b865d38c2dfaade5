use std::fmt;
use std::ops::{Index, IndexMut};

use super::NumericsError;

/// Dense row-major matrix of finite reals.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, NumericsError> {
        if data.len() != rows * cols {
            return Err(NumericsError::Shape {
                expected: (rows, cols),
                len: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(NumericsError::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows; all rows must share one length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, NumericsError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(NumericsError::Ragged {
                    row: i,
                    len: r.len(),
                    expected: cols,
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn column(values: &[f64]) -> Result<Self, NumericsError> {
        Self::new(values.len(), 1, values.to_vec())
    }

    pub fn row_vector(values: &[f64]) -> Result<Self, NumericsError> {
        Self::new(1, values.len(), values.to_vec())
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

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact(0) panics; a zero-column matrix has no meaningful rows.
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    /// Appends a row. Panics on width mismatch; rejects non-finite entries.
    pub fn push_row(&mut self, row: &[f64]) -> Result<(), NumericsError> {
        if self.rows == 0 && self.cols == 0 {
            self.cols = row.len();
        }
        assert_eq!(row.len(), self.cols, "push_row width mismatch");
        if let Some(col) = row.iter().position(|v| !v.is_finite()) {
            return Err(NumericsError::NonFinite {
                row: self.rows,
                col,
            });
        }
        self.data.extend_from_slice(row);
        self.rows += 1;
        Ok(())
    }

    /// Keeps only the rows flagged `true`.
    pub fn retain_rows(&mut self, keep: &[bool]) {
        assert_eq!(keep.len(), self.rows);
        let cols = self.cols;
        let mut out = Vec::with_capacity(self.data.len());
        for (i, k) in keep.iter().enumerate() {
            if *k {
                out.extend_from_slice(&self.data[i * cols..(i + 1) * cols]);
            }
        }
        self.rows = keep.iter().filter(|k| **k).count();
        self.data = out;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = rhs.row(k);
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "mul_vec dimension mismatch");
        self.row_iter().map(|r| dot(r, v)).collect()
    }

    /// Row vector times matrix: `v^T self`.
    pub fn vec_mul(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, v.len(), "vec_mul dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for (vi, r) in v.iter().zip(self.row_iter()) {
            for (o, a) in out.iter_mut().zip(r) {
                *o += vi * a;
            }
        }
        out
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, k: f64) -> Matrix {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * k).collect(),
        }
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.row_iter()
            .map(|r| r.iter().map(|a| a.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, rhs: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols);
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            out.data[i * cols..(i + 1) * cols].copy_from_slice(&self.row(r0 + i)[c0..c0 + cols]);
        }
        out
    }

    /// Solves `self X = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix, NumericsError> {
        if !self.is_square() {
            return Err(NumericsError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        assert_eq!(self.rows, rhs.rows, "solve dimension mismatch");
        let n = self.rows;
        let mut a = self.clone();
        let mut x = rhs.clone();
        let scale = self.norm_inf().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[(i, k)].abs().total_cmp(&a[(j, k)].abs()))
                .unwrap();
            if a[(p, k)].abs() <= 1e-14 * scale {
                return Err(NumericsError::Singular);
            }
            if p != k {
                a.swap_rows(p, k);
                x.swap_rows(p, k);
            }
            let piv = a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / piv;
                if f == 0.0 {
                    continue;
                }
                for j in k..n {
                    a[(i, j)] -= f * a[(k, j)];
                }
                for j in 0..x.cols {
                    x[(i, j)] -= f * x[(k, j)];
                }
            }
        }
        for k in (0..n).rev() {
            for j in 0..x.cols {
                let mut s = x[(k, j)];
                for i in k + 1..n {
                    s -= a[(k, i)] * x[(i, j)];
                }
                x[(k, j)] = s / a[(k, k)];
            }
        }
        Ok(x)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Largest eigenvalue modulus.
    pub fn spectral_radius(&self) -> Result<f64, NumericsError> {
        if !self.is_square() {
            return Err(NumericsError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(self
            .eigenvalues()
            .iter()
            .map(|z| z.0.hypot(z.1))
            .fold(0.0, f64::max))
    }

    /// Eigenvalues as (re, im) pairs.
    pub fn eigenvalues(&self) -> Vec<(f64, f64)> {
        assert!(self.is_square());
        let m = nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data);
        m.complex_eigenvalues()
            .iter()
            .map(|z| (z.re, z.im))
            .collect()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in self.row_iter() {
            writeln!(f, "  {r:?}")?;
        }
        write!(f, "]")
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
