// SPDX-License-Identifier: Apache-2.0

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::reach::{matrix_support, Reduction};
use super::{EvolveOptions, Observer, Rk4, Schedule, POSITIVITY_ABORT, TRACE_ABORT};
use crate::basis::BasisMap;
use crate::density::{hermitian_eigenvalues, hermiticity_defect, DensityMatrix};
use crate::error::{Error, Result};
use crate::operators::{all_collapse_operators, DrivenHamiltonian, LatticeParams, NoiseParams};
use crate::sparse::CsrMatrix;

/// Right-hand side of the master equation
/// `-i[H(t), rho] + sum_C (C rho C^dagger - 1/2 {C^dagger C, rho})`
/// for `H(t) = H0 - J(t) K_hop` with diagonal `H0`.
pub struct LindbladGenerator {
    params: LatticeParams,
    h0: Vec<f64>,
    hopping: CsrMatrix,
    /// Jump operators with off-diagonal entries, applied as `C rho C^dagger`.
    jumps: Vec<CsrMatrix>,
    /// Elementwise factor collecting the diagonal jumps and, when it is
    /// diagonal, the anticommutator term.
    weights: Option<DMatrix<f64>>,
    /// `sum C^dagger C` when it is not diagonal.
    damping: Option<CsrMatrix>,
    scratch: DMatrix<Complex64>,
}

impl LindbladGenerator {
    pub fn new(params: &LatticeParams, h0: &CsrMatrix, hopping: &CsrMatrix, collapse: &[CsrMatrix]) -> Result<Self> {
        let n = h0.rows();
        let h0_diag = h0
            .diagonal()
            .ok_or_else(|| Error::DimensionMismatch("H0 must be diagonal".into()))?;
        if hopping.dims() != (n, n) || collapse.iter().any(|c| c.dims() != (n, n)) {
            return Err(Error::DimensionMismatch(format!(
                "generator pieces must all be {n}x{n}"
            )));
        }

        let mut damping = CsrMatrix::zeros(n, n);
        for c in collapse {
            damping = damping.linear_combination(
                Complex64::new(1.0, 0.0),
                &c.adjoint().matmul(c)?,
                Complex64::new(1.0, 0.0),
            )?;
        }
        let mut weights = DMatrix::<f64>::zeros(n, n);
        let mut any_weight = false;
        let mut jumps = Vec::new();
        for c in collapse {
            match c.diagonal() {
                Some(d) if d.iter().all(|z| z.im == 0.0) => {
                    for k in 0..n {
                        for i in 0..n {
                            weights[(i, k)] += d[i].re * d[k].re;
                        }
                    }
                    any_weight = true;
                }
                _ => jumps.push(c.clone()),
            }
        }
        let damping = match damping.diagonal() {
            Some(kd) => {
                for k in 0..n {
                    for i in 0..n {
                        weights[(i, k)] -= 0.5 * (kd[i].re + kd[k].re);
                    }
                }
                any_weight |= damping.nnz() > 0;
                None
            }
            None => Some(damping),
        };

        Ok(LindbladGenerator {
            params: params.clone(),
            h0: h0_diag.iter().map(|z| z.re).collect(),
            hopping: hopping.clone(),
            jumps,
            weights: any_weight.then_some(weights),
            damping,
            scratch: DMatrix::zeros(n, n),
        })
    }

    pub fn dim(&self) -> usize {
        self.h0.len()
    }

    /// Writes `d rho / dt` at time `t` (seconds) into `out`. Assumes `rho`
    /// is Hermitian; the result is Hermitian to the last bit.
    pub fn apply(&mut self, t: f64, rho: &DMatrix<Complex64>, out: &mut DMatrix<Complex64>) {
        let n = self.dim();
        let j = self.params.hopping_at(t);
        let minus_i = Complex64::new(0.0, -1.0);

        // A = H rho; then [H, rho] = A - A^dagger for Hermitian rho.
        self.hopping.mul_dense_into(rho, &mut self.scratch);
        {
            let a = self.scratch.as_mut_slice();
            let r = rho.as_slice();
            for c in 0..n {
                for i in 0..n {
                    let idx = c * n + i;
                    a[idx] = r[idx] * self.h0[i] - a[idx] * j;
                }
            }
        }
        {
            let a = self.scratch.as_slice();
            let o = out.as_mut_slice();
            for c in 0..n {
                for i in 0..n {
                    o[c * n + i] = minus_i * (a[c * n + i] - a[i * n + c].conj());
                }
            }
        }

        if let Some(w) = &self.weights {
            for ((o, r), w) in out.iter_mut().zip(rho.iter()).zip(w.iter()) {
                *o += r * *w;
            }
        }
        if let Some(k) = &self.damping {
            k.mul_dense_into(rho, &mut self.scratch);
            for c in 0..n {
                for i in 0..n {
                    out[(i, c)] -= (self.scratch[(i, c)] + self.scratch[(c, i)].conj()) * 0.5;
                }
            }
        }
        for c in &self.jumps {
            c.mul_dense_into(rho, &mut self.scratch);
            c.add_dense_mul_adjoint(&self.scratch, out);
        }

        for c in 0..n {
            for i in 0..c {
                let avg = (out[(i, c)] + out[(c, i)].conj()) * 0.5;
                out[(i, c)] = avg;
                out[(c, i)] = avg.conj();
            }
            out[(c, c)].im = 0.0;
        }
    }
}

#[derive(Clone, Debug)]
pub struct OpenOutcome {
    pub final_state: DensityMatrix,
    pub steps: usize,
    pub samples: usize,
    /// Largest `|tr rho - 1|` seen at any step.
    pub max_trace_drift: f64,
    /// Largest Hermiticity defect over the samples.
    pub max_hermiticity_defect: f64,
    /// Smallest eigenvalue over the samples, when checked.
    pub min_eigenvalue: Option<f64>,
    pub integrated_dim: usize,
}

/// RK4 on the Lindblad master equation with the per-site decay and
/// dephasing channels of `noise`. Requires the full basis.
pub fn evolve_open<O: Observer<DensityMatrix>>(
    basis: &BasisMap,
    rho0: &DensityMatrix,
    params: &LatticeParams,
    noise: &NoiseParams,
    schedule: &Schedule,
    observer: &mut O,
) -> Result<OpenOutcome> {
    evolve_open_with(basis, rho0, params, noise, schedule, EvolveOptions::default(), observer)
}

pub fn evolve_open_with<O: Observer<DensityMatrix>>(
    basis: &BasisMap,
    rho0: &DensityMatrix,
    params: &LatticeParams,
    noise: &NoiseParams,
    schedule: &Schedule,
    options: EvolveOptions,
    observer: &mut O,
) -> Result<OpenOutcome> {
    if !basis.is_full() {
        return Err(Error::SectorMismatch(basis.sector()));
    }
    if rho0.key() != basis.key() {
        return Err(Error::BasisMismatch);
    }
    schedule.validate()?;
    let ham = DrivenHamiltonian::new(params, basis)?;
    let collapse = all_collapse_operators(basis, noise)?;

    let reduction = if options.restrict_to_reachable {
        let products: Vec<CsrMatrix> = collapse.iter().map(|c| c.adjoint().matmul(c)).collect::<Result<_>>()?;
        let mut graph: Vec<&CsrMatrix> = vec![ham.h0(), ham.hopping()];
        graph.extend(collapse.iter());
        graph.extend(products.iter());
        Reduction::closure(matrix_support(rho0.elements()), basis.len(), &graph)
    } else {
        Reduction::identity(basis.len())
    };
    let reduced_collapse: Vec<CsrMatrix> = collapse.iter().map(|c| reduction.op(c)).collect();
    let mut generator = LindbladGenerator::new(
        params,
        &reduction.op(ham.h0()),
        &reduction.op(ham.hopping()),
        &reduced_collapse,
    )?;
    let mut rho = reduction.matrix(rho0.elements());

    let dt = schedule.dt * params.period();
    let steps = schedule.steps();
    let embed = |m: &DMatrix<Complex64>| DensityMatrix::from_raw(basis.key(), reduction.embed_matrix(m));

    let mut max_trace_drift: f64 = 0.0;
    let mut max_hermiticity_defect: f64 = 0.0;
    let mut min_eigenvalue: Option<f64> = None;
    let mut record = |k: usize, m: &DMatrix<Complex64>| -> Result<()> {
        let t_over_period = schedule.time_of(k);
        max_hermiticity_defect = max_hermiticity_defect.max(hermiticity_defect(m));
        if options.check_positivity {
            let low = hermitian_eigenvalues(m).first().copied().unwrap_or(0.0);
            min_eigenvalue = Some(min_eigenvalue.map_or(low, |v| v.min(low)));
            if low < -POSITIVITY_ABORT {
                return Err(Error::PositivityViolation {
                    min_eigenvalue: low,
                    t_over_period,
                });
            }
        }
        observer.observe(t_over_period, &embed(m))
    };

    let mut rk = Rk4::new(&rho);
    let mut rhs = |t: f64, y: &DMatrix<Complex64>, out: &mut DMatrix<Complex64>| generator.apply(t, y, out);
    let mut samples = 1;
    record(0, &rho)?;
    for k in 0..steps {
        rk.step(&mut rhs, k as f64 * dt, &mut rho, dt)?;
        let trace: f64 = rho.diagonal().iter().map(|z| z.re).sum();
        let drift = (trace - 1.0).abs();
        max_trace_drift = max_trace_drift.max(drift);
        if drift > TRACE_ABORT {
            return Err(Error::TraceDrift {
                drift,
                t_over_period: schedule.time_of(k + 1),
            });
        }
        if schedule.is_sample(k + 1) {
            record(k + 1, &rho)?;
            samples += 1;
        }
    }

    Ok(OpenOutcome {
        final_state: embed(&rho),
        steps,
        samples,
        max_trace_drift,
        max_hermiticity_defect,
        min_eigenvalue,
        integrated_dim: reduction.len(),
    })
}
