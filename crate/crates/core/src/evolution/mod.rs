// SPDX-License-Identifier: Apache-2.0

//! Time evolution: closed Schrodinger dynamics and the Lindblad master
//! equation with fixed-step RK4, plus a dense propagator used as an
//! independent check on small systems.
//!
//! Times handed to observers are in drive periods `t / T`.

mod closed;
mod open;
mod oracle;
mod reach;
mod rk4;

pub use closed::{evolve_closed, evolve_closed_with, ClosedOutcome};
pub use open::{evolve_open, evolve_open_with, LindbladGenerator, OpenOutcome};
pub use oracle::{oracle_propagate, oracle_step_propagator, oracle_trajectory, ORACLE_MAX_DIM};
pub use rk4::{rk4_step, OdeState, Rk4};

use crate::error::{Error, Result};

/// Closed runs abort once `| |psi| - 1 |` exceeds this.
pub const NORM_ABORT: f64 = 1e-3;
/// Open runs abort once `|tr rho - 1|` exceeds this.
pub const TRACE_ABORT: f64 = 1e-6;
/// Open runs abort once a sampled eigenvalue of `rho` drops below minus this.
pub const POSITIVITY_ABORT: f64 = 1e-6;

/// Integration grid in units of the drive period `T = 2 pi / Omega`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Schedule {
    pub t_final: f64,
    pub dt: f64,
    /// Steps between recorded samples.
    pub output_stride: usize,
}

impl Schedule {
    pub fn new(t_final: f64, dt: f64, output_stride: usize) -> Result<Self> {
        let s = Schedule {
            t_final,
            dt,
            output_stride,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad("dt", format!("must be finite and > 0, got {}", self.dt));
        }
        if !(self.t_final.is_finite() && self.t_final >= self.dt) {
            return bad("t_final", format!("must be >= dt, got {}", self.t_final));
        }
        if self.output_stride == 0 {
            return bad("output_stride", "must be >= 1".into());
        }
        Ok(())
    }

    /// Number of steps; the run ends at `steps() * dt`, the grid point
    /// nearest `t_final`.
    pub fn steps(&self) -> usize {
        ((self.t_final / self.dt).round() as usize).max(1)
    }

    /// Step `k` is recorded. The initial and final steps always are.
    pub fn is_sample(&self, k: usize) -> bool {
        k.is_multiple_of(self.output_stride) || k == self.steps()
    }

    pub fn sample_count(&self) -> usize {
        (0..=self.steps()).filter(|&k| self.is_sample(k)).count()
    }

    pub fn time_of(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    /// Steps per drive period when `1 / dt` is an integer.
    pub fn steps_per_period(&self) -> Option<usize> {
        let n = (1.0 / self.dt).round();
        ((n * self.dt - 1.0).abs() < 1e-12 && n >= 1.0).then_some(n as usize)
    }
}

/// Receives recorded samples as `(t / T, state)`.
pub trait Observer<S> {
    fn observe(&mut self, t_over_period: f64, state: &S) -> Result<()>;
}

impl<S, F> Observer<S> for F
where
    F: FnMut(f64, &S) -> Result<()>,
{
    fn observe(&mut self, t_over_period: f64, state: &S) -> Result<()> {
        self(t_over_period, state)
    }
}

/// Knobs that do not change the mathematics of a run.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct EvolveOptions {
    /// Integrate only on the subspace reachable from the initial support.
    pub restrict_to_reachable: bool,
    /// Eigen-decompose `rho` at every sample (open runs).
    pub check_positivity: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            restrict_to_reachable: true,
            check_positivity: true,
        }
    }
}
