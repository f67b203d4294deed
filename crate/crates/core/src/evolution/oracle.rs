// SPDX-License-Identifier: Apache-2.0

//! Piecewise-constant propagator built from the dense Lindblad
//! superoperator, with `vec(A X B) = (B^T (x) A) vec(X)` on column-major
//! vectorization. Within each step the Hamiltonian is frozen at the step
//! midpoint and the superoperator is exponentiated exactly (Pade
//! scaling-and-squaring). Meant for cross-checks on small systems.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{Observer, Schedule};
use crate::basis::BasisMap;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::operators::{all_collapse_operators, DrivenHamiltonian, LatticeParams, NoiseParams};

/// Largest Hilbert-space dimension the oracle accepts.
pub const ORACLE_MAX_DIM: usize = 64;

/// Propagators kept per run, in bytes.
const CACHE_BUDGET: usize = 1 << 29;

struct Superoperator {
    ham: DrivenHamiltonian,
    dissipator: DMatrix<Complex64>,
    dim: usize,
}

impl Superoperator {
    fn new(basis: &BasisMap, params: &LatticeParams, noise: &NoiseParams) -> Result<Self> {
        let dim = basis.len();
        if dim > ORACLE_MAX_DIM {
            return Err(Error::OracleTooLarge {
                dim,
                max: ORACLE_MAX_DIM,
            });
        }
        if !basis.is_full() {
            return Err(Error::SectorMismatch(basis.sector()));
        }
        let ham = DrivenHamiltonian::new(params, basis)?;
        let id = DMatrix::<Complex64>::identity(dim, dim);
        let mut dissipator = DMatrix::zeros(dim * dim, dim * dim);
        for c in all_collapse_operators(basis, noise)? {
            let c = c.to_dense();
            let k = c.adjoint() * &c;
            dissipator += c.conjugate().kronecker(&c);
            dissipator -= (id.kronecker(&k) + k.transpose().kronecker(&id)) * Complex64::new(0.5, 0.0);
        }
        Ok(Superoperator { ham, dissipator, dim })
    }

    fn generator(&self, t: f64) -> DMatrix<Complex64> {
        let h = self.ham.at(t).to_dense();
        let id = DMatrix::<Complex64>::identity(self.dim, self.dim);
        let unitary = (id.kronecker(&h) - h.transpose().kronecker(&id)) * Complex64::new(0.0, -1.0);
        unitary + &self.dissipator
    }

    fn propagator(&self, t_mid: f64, dt: f64) -> DMatrix<Complex64> {
        (self.generator(t_mid) * Complex64::new(dt, 0.0)).exp()
    }
}

/// `exp(L(t_mid) dt)` acting on column-major `vec(rho)`; times in seconds.
pub fn oracle_step_propagator(
    basis: &BasisMap,
    params: &LatticeParams,
    noise: &NoiseParams,
    t_mid: f64,
    dt: f64,
) -> Result<DMatrix<Complex64>> {
    Ok(Superoperator::new(basis, params, noise)?.propagator(t_mid, dt))
}

/// Propagates `rho0` over `schedule`, reporting samples like the RK4 runs.
pub fn oracle_trajectory<O: Observer<DensityMatrix>>(
    basis: &BasisMap,
    rho0: &DensityMatrix,
    params: &LatticeParams,
    noise: &NoiseParams,
    schedule: &Schedule,
    observer: &mut O,
) -> Result<DensityMatrix> {
    if rho0.key() != basis.key() {
        return Err(Error::BasisMismatch);
    }
    schedule.validate()?;
    let sup = Superoperator::new(basis, params, noise)?;
    let n = sup.dim;
    let dt = schedule.dt * params.period();

    // The frozen generator only depends on the step's phase within the
    // drive period, so propagators repeat when a period holds whole steps.
    let time_independent = params.static_hopping || params.hopping == 0.0;
    let cache_key = |k: usize| -> Option<usize> {
        let bytes = n.pow(4) * std::mem::size_of::<Complex64>();
        if time_independent {
            return Some(0);
        }
        let per_period = schedule.steps_per_period()?;
        (per_period * bytes <= CACHE_BUDGET).then_some(k % per_period)
    };
    let mut cache: HashMap<usize, DMatrix<Complex64>> = HashMap::new();

    let mut v = DVector::from_column_slice(rho0.elements().as_slice());
    let as_state =
        |v: &DVector<Complex64>| DensityMatrix::from_raw(basis.key(), DMatrix::from_column_slice(n, n, v.as_slice()));
    observer.observe(0.0, &as_state(&v))?;
    for k in 0..schedule.steps() {
        let t_mid = (k as f64 + 0.5) * dt;
        v = match cache_key(k) {
            Some(key) => {
                let p = cache.entry(key).or_insert_with(|| sup.propagator(t_mid, dt));
                &*p * &v
            }
            None => sup.propagator(t_mid, dt) * &v,
        };
        if !v.iter().all(|z| z.is_finite()) {
            return Err(Error::NonFinite { t: t_mid });
        }
        if schedule.is_sample(k + 1) {
            observer.observe(schedule.time_of(k + 1), &as_state(&v))?;
        }
    }
    Ok(as_state(&v))
}

/// Final state of [`oracle_trajectory`].
pub fn oracle_propagate(
    basis: &BasisMap,
    rho0: &DensityMatrix,
    params: &LatticeParams,
    noise: &NoiseParams,
    schedule: &Schedule,
) -> Result<DensityMatrix> {
    oracle_trajectory(
        basis,
        rho0,
        params,
        noise,
        schedule,
        &mut |_: f64, _: &DensityMatrix| Ok(()),
    )
}
