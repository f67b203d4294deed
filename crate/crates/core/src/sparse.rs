// SPDX-License-Identifier: Apache-2.0

//! Compressed-sparse-row complex matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Entries with magnitude at or below this are not stored.
pub const ASSEMBLY_ZERO: f64 = 1e-15;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<Complex64>,
}

impl CsrMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CsrMatrix {
            rows,
            cols,
            indptr: vec![0; rows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix::from_diagonal(&vec![Complex64::new(1.0, 0.0); n])
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        CsrMatrix::from_triplets(diag.len(), diag.len(), diag.iter().enumerate().map(|(i, &v)| (i, i, v)))
            .expect("diagonal entries are in range")
    }

    /// Assembles from `(row, col, value)` triplets. Duplicates are summed,
    /// then entries with `|v| <= ASSEMBLY_ZERO` are dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Complex64)>,
    ) -> Result<Self> {
        CsrMatrix::from_triplets_with_threshold(rows, cols, triplets, ASSEMBLY_ZERO)
    }

    pub fn from_triplets_with_threshold(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Complex64)>,
        threshold: f64,
    ) -> Result<Self> {
        let mut per_row: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); rows];
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({r}, {c}) outside a {rows}x{cols} matrix"
                )));
            }
            per_row[r].push((c, v));
        }
        let mut indptr = Vec::with_capacity(rows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for mut row in per_row {
            row.sort_by_key(|&(c, _)| c);
            let mut k = 0;
            while k < row.len() {
                let col = row[k].0;
                let mut acc = ZERO;
                while k < row.len() && row[k].0 == col {
                    acc += row[k].1;
                    k += 1;
                }
                if acc.norm() > threshold {
                    indices.push(col);
                    values.push(acc);
                }
            }
            indptr.push(indices.len());
        }
        Ok(CsrMatrix {
            rows,
            cols,
            indptr,
            indices,
            values,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// `(column, value)` pairs of one row.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let span = self.indptr[r]..self.indptr[r + 1];
        match self.indices[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => ZERO,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_diagonal(&self) -> bool {
        self.triplets().all(|(r, c, _)| r == c)
    }

    /// Dense diagonal, or `None` when off-diagonal entries are stored.
    pub fn diagonal(&self) -> Option<Vec<Complex64>> {
        if !self.is_square() || !self.is_diagonal() {
            return None;
        }
        let mut d = vec![ZERO; self.rows];
        for (r, _, v) in self.triplets() {
            d[r] = v;
        }
        Some(d)
    }

    pub fn adjoint(&self) -> CsrMatrix {
        CsrMatrix::from_triplets_with_threshold(
            self.cols,
            self.rows,
            self.triplets().map(|(r, c, v)| (c, r, v.conj())),
            0.0,
        )
        .expect("transposed entries are in range")
    }

    pub fn scale(&self, factor: Complex64) -> CsrMatrix {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= factor);
        out.prune(ASSEMBLY_ZERO);
        out
    }

    /// `a * self + b * other`.
    pub fn linear_combination(&self, a: Complex64, other: &CsrMatrix, b: Complex64) -> Result<CsrMatrix> {
        self.check_same_dims(other)?;
        CsrMatrix::from_triplets(
            self.rows,
            self.cols,
            self.triplets()
                .map(|(r, c, v)| (r, c, a * v))
                .chain(other.triplets().map(|(r, c, v)| (r, c, b * v))),
        )
    }

    /// Sparse product without dropping anything: exact cancellations
    /// survive as stored zeros until [`CsrMatrix::prune`].
    pub fn matmul(&self, other: &CsrMatrix) -> Result<CsrMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut acc = vec![ZERO; other.cols];
        let mut touched = vec![false; other.cols];
        let mut cols_in_row = Vec::new();
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for r in 0..self.rows {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if !touched[c] {
                        touched[c] = true;
                        cols_in_row.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            cols_in_row.sort_unstable();
            for &c in &cols_in_row {
                indices.push(c);
                values.push(acc[c]);
                acc[c] = ZERO;
                touched[c] = false;
            }
            cols_in_row.clear();
            indptr.push(indices.len());
        }
        Ok(CsrMatrix {
            rows: self.rows,
            cols: other.cols,
            indptr,
            indices,
            values,
        })
    }

    /// Drops stored entries with `|v| <= threshold`.
    pub fn prune(&mut self, threshold: f64) {
        let mut indptr = vec![0];
        let mut indices = Vec::with_capacity(self.indices.len());
        let mut values = Vec::with_capacity(self.values.len());
        for r in 0..self.rows {
            for (c, v) in self.row(r) {
                if v.norm() > threshold {
                    indices.push(c);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        self.indptr = indptr;
        self.indices = indices;
        self.values = values;
    }

    /// `out = self * x`.
    pub fn matvec_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            *o = acc;
        }
    }

    pub fn matvec(&self, x: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator applied to a vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        let mut out = DVector::zeros(self.rows);
        self.matvec_into(x.as_slice(), out.as_mut_slice());
        Ok(out)
    }

    /// `out = self * dense`, column by column.
    pub fn mul_dense_into(&self, dense: &DMatrix<Complex64>, out: &mut DMatrix<Complex64>) {
        debug_assert_eq!(dense.nrows(), self.cols);
        debug_assert_eq!(out.shape(), (self.rows, dense.ncols()));
        let (n_in, n_out) = (self.cols, self.rows);
        if n_in == 0 || n_out == 0 {
            return;
        }
        let src = dense.as_slice();
        let dst = out.as_mut_slice();
        for (x, y) in src.chunks_exact(n_in).zip(dst.chunks_exact_mut(n_out)) {
            self.matvec_into(x, y);
        }
    }

    /// `out += dense * self^dagger`. Uses that column `k` of the result is
    /// `sum_l conj(self[k, l]) * dense[:, l]`.
    pub fn add_dense_mul_adjoint(&self, dense: &DMatrix<Complex64>, out: &mut DMatrix<Complex64>) {
        debug_assert_eq!(dense.ncols(), self.cols);
        debug_assert_eq!(out.shape(), (dense.nrows(), self.rows));
        let n = dense.nrows();
        let src = dense.as_slice();
        let dst = out.as_mut_slice();
        for k in 0..self.rows {
            let out_col = &mut dst[k * n..(k + 1) * n];
            for (l, v) in self.row(k) {
                let w = v.conj();
                let in_col = &src[l * n..(l + 1) * n];
                for (o, x) in out_col.iter_mut().zip(in_col) {
                    *o += w * x;
                }
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    /// Largest entry of `|A - A^dagger|`.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.triplets()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Rows and columns restricted to `keep` (in that order).
    pub fn submatrix(&self, keep: &[usize]) -> CsrMatrix {
        let mut position = vec![usize::MAX; self.cols.max(self.rows)];
        for (new, &old) in keep.iter().enumerate() {
            position[old] = new;
        }
        let triplets = keep.iter().enumerate().flat_map(|(new_r, &old_r)| {
            let position = &position;
            self.row(old_r).filter_map(move |(c, v)| {
                let new_c = position[c];
                (new_c != usize::MAX).then_some((new_r, new_c, v))
            })
        });
        CsrMatrix::from_triplets_with_threshold(keep.len(), keep.len(), triplets, 0.0)
            .expect("restricted entries are in range")
    }

    fn check_same_dims(&self, other: &CsrMatrix) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample() -> CsrMatrix {
        CsrMatrix::from_triplets(
            3,
            3,
            [
                (0, 1, c(1.0, 2.0)),
                (2, 0, c(-0.5, 0.0)),
                (1, 1, c(3.0, 0.0)),
                (0, 1, c(1.0, 0.0)),
                (2, 2, c(1e-16, 0.0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn assembly_sums_duplicates_and_drops_zeros() {
        let m = sample();
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.get(0, 1), c(2.0, 2.0));
        assert_eq!(m.get(2, 2), c(0.0, 0.0));
        assert!(CsrMatrix::from_triplets(2, 2, [(2, 0, c(1.0, 0.0))]).is_err());
    }

    #[test]
    fn products_match_dense() {
        let a = sample();
        let b = a.adjoint();
        let sparse = a.matmul(&b).unwrap().to_dense();
        let dense = a.to_dense() * b.to_dense();
        assert!((sparse - dense).norm() < 1e-14);

        let x = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, -1.0)]);
        let y = a.matvec(&x).unwrap();
        assert!((y - a.to_dense() * &x).norm() < 1e-14);
    }

    #[test]
    fn dense_kernels_match_dense_algebra() {
        let a = sample();
        let rho = DMatrix::from_fn(3, 3, |i, j| c(i as f64 + 0.5, j as f64 - 1.0));
        let mut left = DMatrix::zeros(3, 3);
        a.mul_dense_into(&rho, &mut left);
        assert!((&left - a.to_dense() * &rho).norm() < 1e-14);

        let mut right = DMatrix::from_element(3, 3, c(1.0, 0.0));
        a.add_dense_mul_adjoint(&rho, &mut right);
        let expected = DMatrix::from_element(3, 3, c(1.0, 0.0)) + &rho * a.to_dense().adjoint();
        assert!((right - expected).norm() < 1e-14);
    }

    #[test]
    fn hermiticity_and_diagonal() {
        let a = sample();
        assert!(a.hermiticity_defect() > 0.1);
        let h = a.linear_combination(c(1.0, 0.0), &a.adjoint(), c(1.0, 0.0)).unwrap();
        assert_eq!(h.hermiticity_defect(), 0.0);
        assert!(!h.is_diagonal());
        let d = CsrMatrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(d.nnz(), 2);
        assert_eq!(d.diagonal().unwrap()[2], c(2.0, 0.0));
    }

    #[test]
    fn submatrix_keeps_selected_block() {
        let a = sample();
        let s = a.submatrix(&[2, 0]);
        assert_eq!(s.dims(), (2, 2));
        assert_eq!(s.get(0, 1), c(-0.5, 0.0));
        assert_eq!(s.nnz(), 1);
    }

    #[test]
    fn prune_removes_cancellations() {
        let a = sample();
        let zero = a.linear_combination(c(1.0, 0.0), &a, c(-1.0, 0.0)).unwrap();
        assert_eq!(zero.nnz(), 0);
        let mut p = a.matmul(&CsrMatrix::zeros(3, 3)).unwrap();
        p.prune(0.0);
        assert_eq!(p.nnz(), 0);
    }
}
