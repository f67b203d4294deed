// SPDX-License-Identifier: Apache-2.0

//! Restriction of a run to the basis states it can ever touch.
//!
//! Every operator in the equations of motion maps basis state `c` only to
//! the states in column `c` of its sparsity pattern. Starting from the
//! support of the initial state and closing under those maps gives an
//! invariant subspace; amplitudes outside it stay exactly zero, so the run
//! can be carried out on the subspace and embedded back at output time.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::sparse::CsrMatrix;

#[derive(Clone, Debug)]
pub(crate) struct Reduction {
    keep: Vec<usize>,
    full_dim: usize,
}

impl Reduction {
    pub fn identity(full_dim: usize) -> Self {
        Reduction {
            keep: (0..full_dim).collect(),
            full_dim,
        }
    }

    /// Closure of `seeds` under the directed graphs of `ops`.
    pub fn closure(seeds: impl IntoIterator<Item = usize>, full_dim: usize, ops: &[&CsrMatrix]) -> Self {
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); full_dim];
        for op in ops {
            for (r, c, _) in op.triplets() {
                adjacency[c].push(r);
            }
        }
        let mut seen = vec![false; full_dim];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for s in seeds {
            if !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(c) = queue.pop_front() {
            for &r in &adjacency[c] {
                if !seen[r] {
                    seen[r] = true;
                    queue.push_back(r);
                }
            }
        }
        Reduction {
            keep: (0..full_dim).filter(|&i| seen[i]).collect(),
            full_dim,
        }
    }

    pub fn len(&self) -> usize {
        self.keep.len()
    }

    pub fn op(&self, op: &CsrMatrix) -> CsrMatrix {
        op.submatrix(&self.keep)
    }

    pub fn values<T: Copy>(&self, full: &[T]) -> Vec<T> {
        self.keep.iter().map(|&i| full[i]).collect()
    }

    pub fn vector(&self, full: &DVector<Complex64>) -> DVector<Complex64> {
        DVector::from_iterator(self.len(), self.keep.iter().map(|&i| full[i]))
    }

    pub fn matrix(&self, full: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.len(), self.len(), |r, c| full[(self.keep[r], self.keep[c])])
    }

    pub fn embed_vector(&self, reduced: &DVector<Complex64>, phase: Complex64) -> DVector<Complex64> {
        let mut full = DVector::zeros(self.full_dim);
        for (r, &i) in self.keep.iter().enumerate() {
            full[i] = reduced[r] * phase;
        }
        full
    }

    pub fn embed_matrix(&self, reduced: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut full = DMatrix::zeros(self.full_dim, self.full_dim);
        for (c, &j) in self.keep.iter().enumerate() {
            for (r, &i) in self.keep.iter().enumerate() {
                full[(i, j)] = reduced[(r, c)];
            }
        }
        full
    }
}

/// Indices touched by a vector.
pub(crate) fn vector_support(v: &DVector<Complex64>) -> Vec<usize> {
    (0..v.len()).filter(|&i| v[i] != Complex64::new(0.0, 0.0)).collect()
}

/// Indices of rows or columns with a nonzero entry.
pub(crate) fn matrix_support(m: &DMatrix<Complex64>) -> Vec<usize> {
    let n = m.nrows();
    let zero = Complex64::new(0.0, 0.0);
    (0..n)
        .filter(|&i| (0..n).any(|j| m[(i, j)] != zero || m[(j, i)] != zero))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_follows_directed_edges() {
        let one = Complex64::new(1.0, 0.0);
        // 0 -> 1 -> 2, 3 isolated, 4 -> 0
        let op = CsrMatrix::from_triplets(5, 5, [(1, 0, one), (2, 1, one), (0, 4, one)]).unwrap();
        let r = Reduction::closure([0], 5, &[&op]);
        assert_eq!(r.keep, vec![0, 1, 2]);
        let v = DVector::from_fn(3, |i, _| Complex64::new(i as f64 + 1.0, 0.0));
        let full = r.embed_vector(&v, one);
        assert_eq!(full[2], Complex64::new(3.0, 0.0));
        assert_eq!(full[4], Complex64::new(0.0, 0.0));
        assert_eq!(r.vector(&full), v);
        assert_eq!(Reduction::identity(5).len(), 5);
    }
}
