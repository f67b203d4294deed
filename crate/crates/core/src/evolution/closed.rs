// SPDX-License-Identifier: Apache-2.0

use nalgebra::DVector;
use num_complex::Complex64;

use super::reach::{vector_support, Reduction};
use super::{EvolveOptions, Observer, Rk4, Schedule, NORM_ABORT};
use crate::basis::{BasisMap, StateVector};
use crate::error::{Error, Result};
use crate::operators::{DrivenHamiltonian, LatticeParams};

#[derive(Clone, Debug)]
pub struct ClosedOutcome {
    pub final_state: StateVector,
    pub steps: usize,
    pub samples: usize,
    /// Largest `| |psi| - 1 |` seen at any step.
    pub max_norm_drift: f64,
    /// Dimension actually integrated.
    pub integrated_dim: usize,
}

/// RK4 on `d psi / dt = -i H(t) psi`. The state is never renormalized.
pub fn evolve_closed<O: Observer<StateVector>>(
    basis: &BasisMap,
    psi0: &StateVector,
    params: &LatticeParams,
    schedule: &Schedule,
    observer: &mut O,
) -> Result<ClosedOutcome> {
    evolve_closed_with(basis, psi0, params, schedule, EvolveOptions::default(), observer)
}

pub fn evolve_closed_with<O: Observer<StateVector>>(
    basis: &BasisMap,
    psi0: &StateVector,
    params: &LatticeParams,
    schedule: &Schedule,
    options: EvolveOptions,
    observer: &mut O,
) -> Result<ClosedOutcome> {
    if psi0.key() != basis.key() {
        return Err(Error::BasisMismatch);
    }
    schedule.validate()?;
    let ham = DrivenHamiltonian::new(params, basis)?;
    let h0_diag: Vec<f64> = ham
        .h0()
        .diagonal()
        .expect("local energy is diagonal in the Fock basis")
        .iter()
        .map(|z| z.re)
        .collect();

    // The integrated state carries the extra phase exp(+i e_ref t); taking
    // it out keeps the fast phase of the initial configuration from
    // entering the RK4 error. It is restored at every sample.
    let e_ref: f64 = psi0
        .amplitudes()
        .iter()
        .zip(&h0_diag)
        .map(|(a, e)| a.norm_sqr() * e)
        .sum();

    let reduction = if options.restrict_to_reachable {
        Reduction::closure(
            vector_support(psi0.amplitudes()),
            basis.len(),
            &[ham.h0(), ham.hopping()],
        )
    } else {
        Reduction::identity(basis.len())
    };
    let diag: Vec<f64> = reduction.values(&h0_diag).iter().map(|e| e - e_ref).collect();
    let hop = reduction.op(ham.hopping());
    let mut y = reduction.vector(psi0.amplitudes());

    let period = params.period();
    let dt = schedule.dt * period;
    let steps = schedule.steps();
    let minus_i = Complex64::new(0.0, -1.0);
    let rhs = |t: f64, y: &DVector<Complex64>, out: &mut DVector<Complex64>| {
        hop.matvec_into(y.as_slice(), out.as_mut_slice());
        let j = params.hopping_at(t);
        for ((o, y), e) in out.iter_mut().zip(y.iter()).zip(&diag) {
            *o = minus_i * (y * *e - *o * j);
        }
    };

    let embed = |k: usize, y: &DVector<Complex64>| {
        let phase = Complex64::from_polar(1.0, -e_ref * k as f64 * dt);
        StateVector::from_raw(basis.key(), reduction.embed_vector(y, phase))
    };

    let mut rk = Rk4::new(&y);
    let mut samples = 1;
    let mut max_norm_drift: f64 = 0.0;
    observer.observe(0.0, &embed(0, &y))?;
    for k in 0..steps {
        rk.step(&rhs, k as f64 * dt, &mut y, dt)?;
        let drift = (y.norm() - 1.0).abs();
        max_norm_drift = max_norm_drift.max(drift);
        if drift > NORM_ABORT {
            return Err(Error::NormDrift {
                drift,
                t_over_period: schedule.time_of(k + 1),
            });
        }
        if schedule.is_sample(k + 1) {
            observer.observe(schedule.time_of(k + 1), &embed(k + 1, &y))?;
            samples += 1;
        }
    }

    Ok(ClosedOutcome {
        final_state: embed(steps, &y),
        steps,
        samples,
        max_norm_drift,
        integrated_dim: reduction.len(),
    })
}
