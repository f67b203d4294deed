// SPDX-License-Identifier: Apache-2.0

//! Dense density matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::{BasisKey, BasisMap, StateVector};
use crate::error::{Error, Result};

pub const HERMITICITY_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-10;
pub const POSITIVITY_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    key: BasisKey,
    elements: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(basis: &BasisMap, elements: DMatrix<Complex64>) -> Result<Self> {
        if elements.shape() != (basis.len(), basis.len()) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} density matrix for a basis of {}",
                elements.nrows(),
                elements.ncols(),
                basis.len()
            )));
        }
        let rho = DensityMatrix {
            key: basis.key(),
            elements,
        };
        let herm = rho.hermiticity_defect();
        if herm > HERMITICITY_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (defect {herm:.3e})"
            )));
        }
        let trace = rho.trace();
        if (trace - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("trace {trace}")));
        }
        let min = rho.min_eigenvalue();
        if min < -POSITIVITY_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("minimum eigenvalue {min:.3e}")));
        }
        Ok(rho)
    }

    pub(crate) fn from_raw(key: BasisKey, elements: DMatrix<Complex64>) -> Self {
        DensityMatrix { key, elements }
    }

    /// `|psi><psi|`.
    pub fn from_pure(psi: &StateVector) -> Self {
        let a = psi.amplitudes();
        DensityMatrix {
            key: psi.key(),
            elements: a * a.adjoint(),
        }
    }

    /// `sum_k w_k |psi_k><psi_k|`; weights must be non-negative and sum to 1.
    pub fn mixture(terms: &[(f64, &StateVector)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidDensityMatrix("empty mixture".into()))?;
        let key = first.key();
        let n = first.len();
        let mut elements = DMatrix::zeros(n, n);
        let mut total = 0.0;
        for &(w, psi) in terms {
            if psi.key() != key {
                return Err(Error::BasisMismatch);
            }
            if w.is_nan() || w < 0.0 {
                return Err(Error::InvalidDensityMatrix(format!("negative weight {w}")));
            }
            let a = psi.amplitudes();
            elements += a * a.adjoint() * Complex64::new(w, 0.0);
            total += w;
        }
        if (total - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("weights sum to {total}")));
        }
        Ok(DensityMatrix { key, elements })
    }

    pub fn key(&self) -> BasisKey {
        self.key
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    pub fn elements(&self) -> &DMatrix<Complex64> {
        &self.elements
    }

    /// Real part of the trace.
    pub fn trace(&self) -> f64 {
        self.elements.diagonal().iter().map(|z| z.re).sum()
    }

    /// Largest entry of `|rho - rho^dagger|`.
    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.elements)
    }

    /// `tr(rho^2)` for Hermitian `rho`, as `sum |rho_ij|^2`.
    pub fn purity(&self) -> f64 {
        self.elements.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues in ascending order; see [`hermitian_eigenvalues`].
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.elements)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }
}

/// Largest entry of `|m - m^dagger|`.
pub fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
///
/// The matrix is first split into the connected components of its nonzero
/// pattern and each block is diagonalized on its own. This is exact (a
/// permutation similarity) and makes block-diagonal states cheap.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut values = Vec::with_capacity(m.nrows());
    for block in blocks(m) {
        if block.len() == 1 {
            values.push(m[(block[0], block[0])].re);
            continue;
        }
        let sub = DMatrix::from_fn(block.len(), block.len(), |r, c| {
            let (i, j) = (block[r], block[c]);
            (m[(i, j)] + m[(j, i)].conj()) * 0.5
        });
        values.extend(sub.symmetric_eigenvalues().iter().copied());
    }
    values.sort_by(f64::total_cmp);
    values
}

/// Index sets of the connected components of the nonzero pattern.
fn blocks(m: &DMatrix<Complex64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let zero = Complex64::new(0.0, 0.0);
    for j in 0..n {
        for i in 0..j {
            if m[(i, j)] != zero || m[(j, i)] != zero {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let root = find(&mut parent, i);
        groups[root].push(i);
    }
    groups.into_iter().filter(|g| !g.is_empty()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{enumerate_basis, named_state, NamedState, Sector};

    #[test]
    fn pure_state_properties() {
        let b = enumerate_basis(3, 3, Sector::Full).unwrap();
        let rho = DensityMatrix::from_pure(&named_state(NamedState::Psi1, &b).unwrap());
        assert!((rho.trace() - 1.0).abs() < 1e-15);
        assert!((rho.purity() - 1.0).abs() < 1e-15);
        let ev = rho.eigenvalues();
        assert_eq!(ev.len(), 64);
        assert!((ev[63] - 1.0).abs() < 1e-14);
        assert!(ev[0].abs() < 1e-14);
        assert!(DensityMatrix::new(&b, rho.elements().clone()).is_ok());
    }

    #[test]
    fn block_eigenvalues_match_full_solve() {
        let b = enumerate_basis(2, 2, Sector::Full).unwrap();
        let psi_a = named_state(NamedState::Psi0, &b).unwrap();
        let mut amps = nalgebra::DVector::zeros(9);
        amps[0] = Complex64::new(0.6, 0.0);
        amps[5] = Complex64::new(0.0, 0.8);
        let psi_b = StateVector::new(&b, amps).unwrap();
        let rho = DensityMatrix::mixture(&[(0.3, &psi_a), (0.7, &psi_b)]).unwrap();
        let full = rho.elements().clone().symmetric_eigenvalues();
        let mut full: Vec<f64> = full.iter().copied().collect();
        full.sort_by(f64::total_cmp);
        for (x, y) in full.iter().zip(rho.eigenvalues()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn validation_errors() {
        let b = enumerate_basis(1, 1, Sector::Full).unwrap();
        let c = |re, im| Complex64::new(re, im);
        let not_herm = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)]);
        assert!(DensityMatrix::new(&b, not_herm).is_err());
        let bad_trace = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.6, 0.0)]);
        assert!(DensityMatrix::new(&b, bad_trace).is_err());
        let negative = DMatrix::from_row_slice(2, 2, &[c(1.2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.2, 0.0)]);
        assert!(DensityMatrix::new(&b, negative).is_err());
        let wrong = DMatrix::from_element(3, 3, c(0.0, 0.0));
        assert!(matches!(
            DensityMatrix::new(&b, wrong),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
