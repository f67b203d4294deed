// SPDX-License-Identifier: Apache-2.0

//! Driven Bose-Hubbard chains under strong interaction: Fock bases, sparse
//! operators, resonance bookkeeping, closed and open time evolution and
//! observables.

pub mod basis;
pub mod density;
pub mod error;
pub mod evolution;
pub mod observables;
pub mod operators;
pub mod resonance;
pub mod sparse;

pub use basis::{
    dimension_count, enumerate_basis, named_state, BasisKey, BasisMap, FockConfig, NamedState, Sector, StateVector,
};
pub use density::DensityMatrix;
pub use error::{Error, Result};
pub use evolution::{evolve_closed, evolve_open, oracle_propagate, Observer, Schedule};
pub use observables::{ObservableSample, ObservableSet, Recorder, StateRef};
pub use operators::{DrivenHamiltonian, LatticeParams, NoiseParams, SparseOperator};
pub use sparse::CsrMatrix;
