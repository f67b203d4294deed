// SPDX-License-Identifier: Apache-2.0

//! Classical fourth-order Runge-Kutta.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Vector-space operations the stepper needs, done in place.
pub trait OdeState: Clone {
    /// `self = y + a * k`.
    fn assign_axpy(&mut self, y: &Self, a: f64, k: &Self);
    /// `self += a * k`.
    fn add_scaled(&mut self, a: f64, k: &Self);
    fn all_finite(&self) -> bool;
}

impl OdeState for f64 {
    fn assign_axpy(&mut self, y: &Self, a: f64, k: &Self) {
        *self = y + a * k;
    }
    fn add_scaled(&mut self, a: f64, k: &Self) {
        *self += a * k;
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl OdeState for Complex64 {
    fn assign_axpy(&mut self, y: &Self, a: f64, k: &Self) {
        *self = y + k * a;
    }
    fn add_scaled(&mut self, a: f64, k: &Self) {
        *self += k * a;
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

fn slice_axpy(out: &mut [Complex64], y: &[Complex64], a: f64, k: &[Complex64]) {
    for ((o, y), k) in out.iter_mut().zip(y).zip(k) {
        *o = y + k * a;
    }
}

fn slice_add(out: &mut [Complex64], a: f64, k: &[Complex64]) {
    for (o, k) in out.iter_mut().zip(k) {
        *o += k * a;
    }
}

impl OdeState for DVector<Complex64> {
    fn assign_axpy(&mut self, y: &Self, a: f64, k: &Self) {
        slice_axpy(self.as_mut_slice(), y.as_slice(), a, k.as_slice());
    }
    fn add_scaled(&mut self, a: f64, k: &Self) {
        slice_add(self.as_mut_slice(), a, k.as_slice());
    }
    fn all_finite(&self) -> bool {
        self.iter().all(|z| z.is_finite())
    }
}

impl OdeState for DMatrix<Complex64> {
    fn assign_axpy(&mut self, y: &Self, a: f64, k: &Self) {
        slice_axpy(self.as_mut_slice(), y.as_slice(), a, k.as_slice());
    }
    fn add_scaled(&mut self, a: f64, k: &Self) {
        slice_add(self.as_mut_slice(), a, k.as_slice());
    }
    fn all_finite(&self) -> bool {
        self.iter().all(|z| z.is_finite())
    }
}

/// Stage buffers, allocated once per run.
pub struct Rk4<S> {
    k: [S; 4],
    stage: S,
}

impl<S: OdeState> Rk4<S> {
    pub fn new(template: &S) -> Self {
        Rk4 {
            k: [template.clone(), template.clone(), template.clone(), template.clone()],
            stage: template.clone(),
        }
    }

    /// Advances `y` from `t` to `t + dt`. `rhs(t, y, out)` writes `dy/dt`.
    pub fn step<F>(&mut self, mut rhs: F, t: f64, y: &mut S, dt: f64) -> Result<()>
    where
        F: FnMut(f64, &S, &mut S),
    {
        let [k1, k2, k3, k4] = &mut self.k;
        let stage = &mut self.stage;
        let check = |k: &S| {
            if k.all_finite() {
                Ok(())
            } else {
                Err(Error::NonFinite { t })
            }
        };

        rhs(t, y, k1);
        check(k1)?;
        stage.assign_axpy(y, 0.5 * dt, k1);
        rhs(t + 0.5 * dt, stage, k2);
        check(k2)?;
        stage.assign_axpy(y, 0.5 * dt, k2);
        rhs(t + 0.5 * dt, stage, k3);
        check(k3)?;
        stage.assign_axpy(y, dt, k3);
        rhs(t + dt, stage, k4);
        check(k4)?;

        y.add_scaled(dt / 6.0, k1);
        y.add_scaled(dt / 3.0, k2);
        y.add_scaled(dt / 3.0, k3);
        y.add_scaled(dt / 6.0, k4);
        Ok(())
    }
}

/// One RK4 step with an allocating right-hand side.
pub fn rk4_step<S, F>(mut rhs: F, t: f64, state: &S, dt: f64) -> Result<S>
where
    S: OdeState,
    F: FnMut(f64, &S) -> S,
{
    if dt.is_nan() || dt <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("must be > 0, got {dt}"),
        });
    }
    let mut y = state.clone();
    Rk4::new(state).step(|t, y, out| *out = rhs(t, y), t, &mut y, dt)?;
    Ok(y)
}
