//! Compressed sparse row matrices tuned for repeated self-products of a
//! trust adjacency matrix.
//!
//! Invariants maintained by every constructor and operation: `indptr` is
//! monotone with `indptr[0] == 0` and `indptr[n_rows] == nnz`, column indices
//! are strictly increasing within a row, and no explicit zeros are stored.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::par;

/// Sparse matrix in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    indptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

/// Reusable dense accumulator for one product row; zeroed between rows so a
/// thread can carry it across the rows it processes.
struct RowScratch {
    acc: Vec<f64>,
    mark: Vec<bool>,
    touched: Vec<u32>,
}

impl RowScratch {
    fn new(n_cols: usize) -> Self {
        RowScratch {
            acc: vec![0.0; n_cols],
            mark: vec![false; n_cols],
            touched: Vec::new(),
        }
    }

    fn reset(&mut self) {
        for &j in &self.touched {
            self.acc[j as usize] = 0.0;
            self.mark[j as usize] = false;
        }
        self.touched.clear();
    }
}

impl SparseMatrix {
    /// Matrix with no stored entries.
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        SparseMatrix {
            n_rows,
            n_cols,
            indptr: vec![0; n_rows + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            n_rows: n,
            n_cols: n,
            indptr: (0..=n).collect(),
            cols: (0..n as u32).collect(),
            vals: vec![1.0; n],
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets.
    ///
    /// Triplets may arrive in any order; duplicates are summed and entries
    /// that are (or sum to) exactly zero are dropped.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        mut triplets: Vec<(u32, u32, f64)>,
    ) -> Result<Self> {
        if n_cols > u32::MAX as usize || n_rows > u32::MAX as usize {
            return Err(Error::Dimension(format!(
                "matrix {n_rows}x{n_cols} exceeds u32 index space"
            )));
        }
        for &(r, c, _) in &triplets {
            if r as usize >= n_rows || c as usize >= n_cols {
                return Err(Error::Dimension(format!(
                    "entry ({r}, {c}) outside {n_rows}x{n_cols}"
                )));
            }
        }
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = Vec::with_capacity(n_rows + 1);
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals = Vec::with_capacity(triplets.len());
        indptr.push(0);
        let mut row = 0u32;
        let mut i = 0;
        while i < triplets.len() {
            let (r, c, _) = triplets[i];
            while row < r {
                indptr.push(cols.len());
                row += 1;
            }
            let mut v = 0.0;
            while i < triplets.len() && triplets[i].0 == r && triplets[i].1 == c {
                v += triplets[i].2;
                i += 1;
            }
            if v != 0.0 {
                cols.push(c);
                vals.push(v);
            }
        }
        while (row as usize) < n_rows {
            indptr.push(cols.len());
            row += 1;
        }
        Ok(SparseMatrix {
            n_rows,
            n_cols,
            indptr,
            cols,
            vals,
        })
    }

    /// Assembles a matrix from per-row `(cols, vals)` pairs that already
    /// satisfy the CSR invariants (sorted, unique, non-zero).
    pub(crate) fn from_rows(n_rows: usize, n_cols: usize, rows: Vec<(Vec<u32>, Vec<f64>)>) -> Self {
        debug_assert_eq!(rows.len(), n_rows);
        let nnz = rows.iter().map(|(c, _)| c.len()).sum();
        let mut indptr = Vec::with_capacity(n_rows + 1);
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        indptr.push(0);
        for (rc, rv) in rows {
            debug_assert_eq!(rc.len(), rv.len());
            debug_assert!(
                rc.windows(2).all(|w| w[0] < w[1]),
                "row columns must be strictly increasing"
            );
            cols.extend_from_slice(&rc);
            vals.extend_from_slice(&rv);
            indptr.push(cols.len());
        }
        SparseMatrix {
            n_rows,
            n_cols,
            indptr,
            cols,
            vals,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Number of stored (non-zero) entries.
    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Fraction of the full matrix that is stored.
    pub fn density(&self) -> f64 {
        if self.n_rows == 0 || self.n_cols == 0 {
            return 0.0;
        }
        self.nnz() as f64 / (self.n_rows as f64 * self.n_cols as f64)
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (lo, hi) = (self.indptr[i], self.indptr[i + 1]);
        (&self.cols[lo..hi], &self.vals[lo..hi])
    }

    /// Value at `(i, j)`, zero when the entry is not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&(j as u32)) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// Iterates stored entries as `(row, col, value)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u32, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&c, &v)| (i, c, v))
        })
    }

    /// Returns a copy with every value scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.vals {
            *v *= factor;
        }
        out
    }

    /// Transposed copy (CSC view materialized as CSR).
    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &c in &self.cols {
            counts[c as usize + 1] += 1;
        }
        for i in 0..self.n_cols {
            counts[i + 1] += counts[i];
        }
        let indptr = counts.clone();
        let mut cols = vec![0u32; self.nnz()];
        let mut vals = vec![0.0; self.nnz()];
        let mut next = counts;
        for i in 0..self.n_rows {
            let (rc, rv) = self.row(i);
            for (&c, &v) in rc.iter().zip(rv) {
                let slot = next[c as usize];
                cols[slot] = i as u32;
                vals[slot] = v;
                next[c as usize] += 1;
            }
        }
        SparseMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            indptr,
            cols,
            vals,
        }
    }

    /// Matrix-vector product `A * x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_cols {
            return Err(Error::Dimension(format!(
                "matvec: vector of {} against {} columns",
                x.len(),
                self.n_cols
            )));
        }
        Ok((0..self.n_rows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter()
                    .zip(vals)
                    .map(|(&c, &v)| v * x[c as usize])
                    .sum()
            })
            .collect())
    }

    /// Entry-wise sum `A + B`.
    ///
    /// Entries that cancel to exactly zero are dropped to keep the
    /// no-stored-zeros invariant.
    pub fn add(&self, other: &SparseMatrix) -> Result<Self> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Err(Error::Dimension(format!(
                "add: {}x{} + {}x{}",
                self.n_rows, self.n_cols, other.n_rows, other.n_cols
            )));
        }
        let rows = par::map_ordered(self.n_rows, |i| {
            let (ac, av) = self.row(i);
            let (bc, bv) = other.row(i);
            let mut cols = Vec::with_capacity(ac.len() + bc.len());
            let mut vals = Vec::with_capacity(ac.len() + bc.len());
            let (mut p, mut q) = (0, 0);
            while p < ac.len() || q < bc.len() {
                let (c, v) = if q >= bc.len() || (p < ac.len() && ac[p] < bc[q]) {
                    let e = (ac[p], av[p]);
                    p += 1;
                    e
                } else if p >= ac.len() || bc[q] < ac[p] {
                    let e = (bc[q], bv[q]);
                    q += 1;
                    e
                } else {
                    let e = (ac[p], av[p] + bv[q]);
                    p += 1;
                    q += 1;
                    e
                };
                if v != 0.0 {
                    cols.push(c);
                    vals.push(v);
                }
            }
            (cols, vals)
        });
        Ok(SparseMatrix::from_rows(self.n_rows, self.n_cols, rows))
    }

    /// Sparse-sparse product `A * B`, row-parallel when the `parallel`
    /// feature is enabled. Results are bit-identical to [`Self::matmul_seq`].
    pub fn matmul(&self, other: &SparseMatrix) -> Result<Self> {
        self.check_matmul_dims(other)?;
        let rows = par::map_ordered_init(
            self.n_rows,
            || RowScratch::new(other.n_cols),
            |scratch, i| self.product_row(other, i, scratch),
        );
        Ok(SparseMatrix::from_rows(self.n_rows, other.n_cols, rows))
    }

    /// Sequential reference implementation of [`Self::matmul`].
    pub fn matmul_seq(&self, other: &SparseMatrix) -> Result<Self> {
        self.check_matmul_dims(other)?;
        let rows = par::map_ordered_init_seq(
            self.n_rows,
            || RowScratch::new(other.n_cols),
            |scratch, i| self.product_row(other, i, scratch),
        );
        Ok(SparseMatrix::from_rows(self.n_rows, other.n_cols, rows))
    }

    fn check_matmul_dims(&self, other: &SparseMatrix) -> Result<()> {
        if self.n_cols != other.n_rows {
            return Err(Error::Dimension(format!(
                "matmul: {}x{} * {}x{}",
                self.n_rows, self.n_cols, other.n_rows, other.n_cols
            )));
        }
        Ok(())
    }

    /// One output row of `self * other` via a dense accumulator.
    ///
    /// Contributions are added in ascending order of the inner index `k`, a
    /// fixed order that makes the floating-point result independent of thread
    /// scheduling.
    fn product_row(
        &self,
        other: &SparseMatrix,
        i: usize,
        scratch: &mut RowScratch,
    ) -> (Vec<u32>, Vec<f64>) {
        let (ac, av) = self.row(i);
        for (&k, &a) in ac.iter().zip(av) {
            let (bc, bv) = other.row(k as usize);
            for (&j, &b) in bc.iter().zip(bv) {
                if !scratch.mark[j as usize] {
                    scratch.mark[j as usize] = true;
                    scratch.touched.push(j);
                }
                scratch.acc[j as usize] += a * b;
            }
        }
        scratch.touched.sort_unstable();
        let mut cols = Vec::with_capacity(scratch.touched.len());
        let mut vals = Vec::with_capacity(scratch.touched.len());
        for &j in &scratch.touched {
            let v = scratch.acc[j as usize];
            if v != 0.0 {
                cols.push(j);
                vals.push(v);
            }
        }
        scratch.reset();
        (cols, vals)
    }

    /// Rebuilds each row through `f`, which receives the row index plus the
    /// row's columns and values and returns the replacement row (already
    /// sorted, zero-free).
    pub(crate) fn map_rows<F>(&self, f: F) -> Self
    where
        F: Fn(usize, &[u32], &[f64]) -> (Vec<u32>, Vec<f64>) + Sync + Send,
    {
        let rows = par::map_ordered(self.n_rows, |i| {
            let (cols, vals) = self.row(i);
            f(i, cols, vals)
        });
        SparseMatrix::from_rows(self.n_rows, self.n_cols, rows)
    }

    /// Dense copy, for small oracles and tests.
    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for (i, j, v) in self.iter() {
            d.set(i, j as usize, v);
        }
        d
    }

    /// Largest absolute entry-wise difference between two matrices of the
    /// same shape, treating missing entries as zero.
    pub fn max_abs_diff(&self, other: &SparseMatrix) -> Result<f64> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Err(Error::Dimension("max_abs_diff on different shapes".into()));
        }
        let diff = self.add(&other.scaled(-1.0))?;
        Ok(diff.vals.iter().fold(0.0, |m, v| m.max(v.abs())))
    }
}
