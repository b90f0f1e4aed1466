//! Small dense matrices used as independent oracles for the sparse kernels.
//!
//! Nothing here is tuned for scale; the point is a second, structurally
//! different route to the same numbers so tests can cross-check the CSR path.

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        DenseMatrix {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n_cols + j] = v;
    }

    /// Returns `self + other * factor`.
    pub fn add_scaled(&self, other: &DenseMatrix, factor: f64) -> Result<DenseMatrix> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Err(Error::Dimension("dense add on different shapes".into()));
        }
        let mut out = self.clone();
        for (o, v) in out.data.iter_mut().zip(&other.data) {
            *o += v * factor;
        }
        Ok(out)
    }

    /// Textbook triple-loop product; the brute-force reference for the CSR
    /// multiply. The inner index runs in ascending order.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.n_cols != other.n_rows {
            return Err(Error::Dimension(format!(
                "dense matmul: {}x{} * {}x{}",
                self.n_rows, self.n_cols, other.n_rows, other.n_cols
            )));
        }
        let mut out = DenseMatrix::zeros(self.n_rows, other.n_cols);
        for i in 0..self.n_rows {
            for j in 0..other.n_cols {
                let mut s = 0.0;
                for k in 0..self.n_cols {
                    s += self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, s);
            }
        }
        Ok(out)
    }

    /// Largest absolute entry-wise difference.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> Result<f64> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Err(Error::Dimension("dense diff on different shapes".into()));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Inverse via LU decomposition. Errors on non-square or singular input.
    pub fn inverse(&self) -> Result<DenseMatrix> {
        if self.n_rows != self.n_cols {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let m = nalgebra::DMatrix::from_row_slice(self.n_rows, self.n_cols, &self.data);
        let inv = m
            .try_inverse()
            .ok_or_else(|| Error::Singular("matrix is not invertible".into()))?;
        let mut out = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                out.set(i, j, inv[(i, j)]);
            }
        }
        Ok(out)
    }

    /// Eigenvalue of largest magnitude for a symmetric matrix, computed by a
    /// full dense eigen-decomposition.
    pub fn symmetric_spectral_radius(&self) -> Result<f64> {
        if self.n_rows != self.n_cols {
            return Err(Error::Dimension(
                "spectral radius of a non-square matrix".into(),
            ));
        }
        let m = nalgebra::DMatrix::from_row_slice(self.n_rows, self.n_cols, &self.data);
        let eig = m.symmetric_eigen();
        Ok(eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_inverse_is_identity() {
        let id = DenseMatrix::identity(3);
        assert_eq!(id.inverse().unwrap(), id);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let z = DenseMatrix::zeros(2, 2);
        assert!(matches!(z.inverse(), Err(Error::Singular(_))));
    }

    #[test]
    fn inverse_times_original_is_identity() {
        let mut m = DenseMatrix::zeros(2, 2);
        m.set(0, 0, 4.0);
        m.set(0, 1, 1.0);
        m.set(1, 0, 2.0);
        m.set(1, 1, 3.0);
        let prod = m.inverse().unwrap().matmul(&m).unwrap();
        assert!(prod.max_abs_diff(&DenseMatrix::identity(2)).unwrap() < 1e-12);
    }

    #[test]
    fn all_ones_matrix_has_spectral_radius_n() {
        let mut j = DenseMatrix::zeros(4, 4);
        for i in 0..4 {
            for k in 0..4 {
                j.set(i, k, 1.0);
            }
        }
        assert!((j.symmetric_spectral_radius().unwrap() - 4.0).abs() < 1e-10);
    }
}
