// SPDX-License-Identifier: Apache-2.0

//! Reported quantities: named-state populations, configuration
//! populations, linear entropy, purity and symmetry expectations.

use std::sync::Arc;

use num_complex::Complex64;

use crate::basis::{named_state, BasisKey, BasisMap, FockConfig, NamedState, StateVector};
use crate::density::{hermitian_eigenvalues, DensityMatrix};
use crate::error::{Error, Result};
use crate::evolution::Observer;
use crate::operators::symmetry_operators;
use crate::sparse::CsrMatrix;

/// Populations below this are errors; between it and zero they are
/// clamped to zero.
pub const POPULATION_FLOOR: f64 = -1e-9;

#[derive(Copy, Clone, Debug)]
pub enum StateRef<'a> {
    Pure(&'a StateVector),
    Mixed(&'a DensityMatrix),
}

impl<'a> From<&'a StateVector> for StateRef<'a> {
    fn from(s: &'a StateVector) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a> From<&'a DensityMatrix> for StateRef<'a> {
    fn from(r: &'a DensityMatrix) -> Self {
        StateRef::Mixed(r)
    }
}

impl StateRef<'_> {
    pub fn key(&self) -> BasisKey {
        match self {
            StateRef::Pure(s) => s.key(),
            StateRef::Mixed(r) => r.key(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            StateRef::Pure(s) => s.len(),
            StateRef::Mixed(r) => r.dim(),
        }
    }
}

fn clamp_population(p: f64) -> Result<f64> {
    if !(POPULATION_FLOOR..=1.0 - POPULATION_FLOOR).contains(&p) {
        return Err(Error::InvalidDensityMatrix(format!("population {p} outside [0, 1]")));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// `|<target|psi>|^2` or `<target|rho|target>`.
pub fn population<'a>(state: impl Into<StateRef<'a>>, target: &StateVector) -> Result<f64> {
    let state = state.into();
    if state.key() != target.key() {
        return Err(Error::BasisMismatch);
    }
    let t = target.amplitudes();
    let p = match state {
        StateRef::Pure(psi) => t.dotc(psi.amplitudes()).norm_sqr(),
        StateRef::Mixed(rho) => t.dotc(&(rho.elements() * t)).re,
    };
    clamp_population(p)
}

/// Diagonal of `rho`, or `|amplitude|^2`.
pub fn config_populations<'a>(state: impl Into<StateRef<'a>>) -> Vec<f64> {
    match state.into() {
        StateRef::Pure(psi) => psi.amplitudes().iter().map(|a| a.norm_sqr()).collect(),
        StateRef::Mixed(rho) => rho.elements().diagonal().iter().map(|z| z.re).collect(),
    }
}

/// Total population on basis states whose configuration is not in `keep`.
pub fn population_outside<'a>(state: impl Into<StateRef<'a>>, basis: &BasisMap, keep: &[FockConfig]) -> Result<f64> {
    let state = state.into();
    if state.key() != basis.key() {
        return Err(Error::BasisMismatch);
    }
    Ok(config_populations(state)
        .iter()
        .zip(basis.configs())
        .filter(|(_, c)| !keep.contains(c))
        .map(|(p, _)| p)
        .sum())
}

/// `tr(rho^2)`; 1 for a state vector.
pub fn purity<'a>(state: impl Into<StateRef<'a>>) -> f64 {
    match state.into() {
        StateRef::Pure(_) => 1.0,
        StateRef::Mixed(rho) => rho.purity(),
    }
}

/// `S = 1 - tr(rho^2)`.
pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    1.0 - rho.purity()
}

/// `1 - sum lambda_i^2` from the spectrum.
pub fn linear_entropy_from_spectrum(rho: &DensityMatrix) -> f64 {
    1.0 - hermitian_eigenvalues(rho.elements()).iter().map(|l| l * l).sum::<f64>()
}

/// `<O>` as `<psi|O|psi>` or `tr(O rho)`.
pub fn expectation<'a>(state: impl Into<StateRef<'a>>, op: &CsrMatrix) -> Result<Complex64> {
    let state = state.into();
    if op.dims() != (state.dim(), state.dim()) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator on a state of dimension {}",
            op.rows(),
            op.cols(),
            state.dim()
        )));
    }
    Ok(match state {
        StateRef::Pure(psi) => {
            let a = psi.amplitudes();
            op.triplets().map(|(r, c, v)| a[r].conj() * v * a[c]).sum()
        }
        StateRef::Mixed(rho) => {
            let m = rho.elements();
            op.triplets().map(|(r, c, v)| v * m[(c, r)]).sum()
        }
    })
}

/// `(<N>, <P>)`.
pub fn symmetry_expectations<'a>(
    state: impl Into<StateRef<'a>>,
    number: &CsrMatrix,
    parity: &CsrMatrix,
) -> Result<(f64, f64)> {
    let state = state.into();
    Ok((expectation(state, number)?.re, expectation(state, parity)?.re))
}

/// One recorded time point. Values line up with the names of the
/// [`ObservableSet`] that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSample {
    pub t_over_period: f64,
    names: Arc<[String]>,
    pub values: Vec<f64>,
}

impl ObservableSample {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.names.iter().map(String::as_str).zip(self.values.iter().copied())
    }
}

/// The standard column set: `P0..P5` (those defined for the lattice), `S`,
/// `trace`, `N_exp`, `parity_exp`, and optionally one `cfg_<label>` per
/// basis state.
#[derive(Clone, Debug)]
pub struct ObservableSet {
    key: BasisKey,
    named: Vec<StateVector>,
    number: CsrMatrix,
    parity: CsrMatrix,
    record_configs: bool,
    names: Arc<[String]>,
}

impl ObservableSet {
    pub fn standard(basis: &BasisMap, record_configs: bool) -> Result<Self> {
        let mut names = Vec::new();
        let mut named = Vec::new();
        for which in NamedState::ALL {
            // Only the unit-filling state is defined beyond three sites.
            if which != NamedState::Psi0 && basis.sites() != 3 {
                continue;
            }
            named.push(named_state(which, basis)?);
            names.push(which.population_label());
        }
        names.extend(["S", "trace", "N_exp", "parity_exp"].map(String::from));
        if record_configs {
            names.extend(basis.configs().iter().map(|c| format!("cfg_{}", c.label())));
        }
        let (number, parity) = symmetry_operators(basis)?;
        Ok(ObservableSet {
            key: basis.key(),
            named,
            number,
            parity,
            record_configs,
            names: names.into(),
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn evaluate<'a>(&self, t_over_period: f64, state: impl Into<StateRef<'a>>) -> Result<ObservableSample> {
        let state = state.into();
        if state.key() != self.key {
            return Err(Error::BasisMismatch);
        }
        let mut values = Vec::with_capacity(self.names.len());
        for target in &self.named {
            values.push(population(state, target)?);
        }
        let (entropy, trace) = match state {
            StateRef::Pure(psi) => (1.0 - purity(psi), psi.amplitudes().norm_squared()),
            StateRef::Mixed(rho) => (linear_entropy(rho), rho.trace()),
        };
        let (n, p) = symmetry_expectations(state, &self.number, &self.parity)?;
        values.extend([entropy, trace, n, p]);
        if self.record_configs {
            for p in config_populations(state) {
                values.push(clamp_population(p)?);
            }
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Observer(format!(
                "{} is not finite at t/T = {t_over_period}",
                self.names[i]
            )));
        }
        Ok(ObservableSample {
            t_over_period,
            names: self.names.clone(),
            values,
        })
    }
}

/// Observer that evaluates an [`ObservableSet`] at every sample.
#[derive(Clone, Debug)]
pub struct Recorder {
    set: ObservableSet,
    pub samples: Vec<ObservableSample>,
}

impl Recorder {
    pub fn new(set: ObservableSet) -> Self {
        Recorder {
            set,
            samples: Vec::new(),
        }
    }

    pub fn names(&self) -> &[String] {
        self.set.names()
    }

    /// Values of one column over time.
    pub fn series(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.set.names().iter().position(|n| n == name)?;
        Some(self.samples.iter().map(|s| s.values[i]).collect())
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t_over_period).collect()
    }
}

impl Observer<StateVector> for Recorder {
    fn observe(&mut self, t_over_period: f64, state: &StateVector) -> Result<()> {
        let s = self.set.evaluate(t_over_period, state)?;
        self.samples.push(s);
        Ok(())
    }
}

impl Observer<DensityMatrix> for Recorder {
    fn observe(&mut self, t_over_period: f64, state: &DensityMatrix) -> Result<()> {
        let s = self.set.evaluate(t_over_period, state)?;
        self.samples.push(s);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{enumerate_basis, Sector};
    use nalgebra::{DMatrix, DVector};

    fn basis3() -> BasisMap {
        enumerate_basis(3, 3, Sector::Full).unwrap()
    }

    fn psi(b: &BasisMap, which: NamedState) -> StateVector {
        named_state(which, b).unwrap()
    }

    #[test]
    fn population_examples() {
        let b = basis3();
        let p0 = psi(&b, NamedState::Psi0);
        assert_eq!(population(&p0, &p0).unwrap(), 1.0);
        assert_eq!(population(&p0, &psi(&b, NamedState::Psi3)).unwrap(), 0.0);
        let p4 = psi(&b, NamedState::Psi4);
        let rho = DensityMatrix::mixture(&[(0.5, &p0), (0.5, &p4)]).unwrap();
        assert!((population(&rho, &p0).unwrap() - 0.5).abs() < 1e-15);
        let other = enumerate_basis(3, 2, Sector::Full).unwrap();
        let q = named_state(NamedState::Psi0, &other).unwrap();
        assert_eq!(population(&p0, &q), Err(Error::BasisMismatch));
    }

    #[test]
    fn population_ignores_global_phase() {
        let b = basis3();
        let p1 = psi(&b, NamedState::Psi1);
        let mixed = StateVector::new(
            &b,
            (p1.amplitudes() * Complex64::new(0.6, 0.0)
                + psi(&b, NamedState::Psi2).amplitudes() * Complex64::new(0.0, 0.8))
                * Complex64::from_polar(1.0, 0.0),
        )
        .unwrap();
        let rotated = StateVector::new(&b, mixed.amplitudes() * Complex64::from_polar(1.0, 1.234)).unwrap();
        let target = StateVector::new(&b, p1.amplitudes() * Complex64::from_polar(1.0, -0.4)).unwrap();
        let a = population(&mixed, &p1).unwrap();
        assert!((a - 0.36).abs() < 1e-15);
        assert!((population(&rotated, &target).unwrap() - a).abs() < 1e-15);
    }

    #[test]
    fn configuration_populations() {
        let b = basis3();
        let p0 = config_populations(&psi(&b, NamedState::Psi0));
        let i111 = b.index_of(&FockConfig::unit_filling(3)).unwrap();
        assert_eq!(p0[i111], 1.0);
        assert_eq!(p0.iter().sum::<f64>(), 1.0);
        let p1 = config_populations(&psi(&b, NamedState::Psi1));
        let i120 = b.index_of(&FockConfig::new([1, 2, 0])).unwrap();
        let i021 = b.index_of(&FockConfig::new([0, 2, 1])).unwrap();
        assert!((p1[i120] - 0.5).abs() < 1e-15 && (p1[i021] - 0.5).abs() < 1e-15);
        let keep = [FockConfig::new([1, 2, 0])];
        let out = population_outside(&psi(&b, NamedState::Psi1), &b, &keep).unwrap();
        assert!((out - 0.5).abs() < 1e-15);
    }

    #[test]
    fn entropy_examples() {
        let b = basis3();
        let p0 = psi(&b, NamedState::Psi0);
        assert_eq!(purity(&p0), 1.0);
        assert_eq!(linear_entropy(&DensityMatrix::from_pure(&p0)), 0.0);
        let p3 = psi(&b, NamedState::Psi3);
        let rho = DensityMatrix::mixture(&[(0.5, &p0), (0.5, &p3)]).unwrap();
        assert!((linear_entropy(&rho) - 0.5).abs() < 1e-15);
        assert!((linear_entropy_from_spectrum(&rho) - 0.5).abs() < 1e-14);

        let two = enumerate_basis(1, 1, Sector::Full).unwrap();
        let half = DMatrix::from_diagonal(&DVector::from_element(2, Complex64::new(0.5, 0.0)));
        let mixed = DensityMatrix::new(&two, half).unwrap();
        assert_eq!(linear_entropy(&mixed), 0.5);
    }

    #[test]
    fn symmetry_expectation_examples() {
        let b = basis3();
        let (n, p) = symmetry_operators(&b).unwrap();
        for which in [NamedState::Psi0, NamedState::Psi5] {
            let (ne, pe) = symmetry_expectations(&psi(&b, which), &n, &p).unwrap();
            assert!((ne - 3.0).abs() < 1e-14 && (pe - 1.0).abs() < 1e-14, "{which:?}");
        }
        let vac = StateVector::basis_state(&b, &FockConfig::vacuum(3)).unwrap();
        assert_eq!(symmetry_expectations(&vac, &n, &p).unwrap(), (0.0, 1.0));
        let odd = StateVector::from_configs(
            &b,
            &[
                (
                    FockConfig::new([1, 2, 0]),
                    Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                ),
                (
                    FockConfig::new([0, 2, 1]),
                    Complex64::new(-std::f64::consts::FRAC_1_SQRT_2, 0.0),
                ),
            ],
        )
        .unwrap();
        let (_, pe) = symmetry_expectations(&DensityMatrix::from_pure(&odd), &n, &p).unwrap();
        assert!((pe + 1.0).abs() < 1e-14);
        let small = CsrMatrix::identity(3);
        assert!(expectation(&odd, &small).is_err());
    }

    #[test]
    fn standard_columns() {
        let b = basis3();
        let set = ObservableSet::standard(&b, false).unwrap();
        assert_eq!(
            set.names(),
            ["P0", "P1", "P2", "P3", "P4", "P5", "S", "trace", "N_exp", "parity_exp"]
        );
        let s = set.evaluate(0.0, &psi(&b, NamedState::Psi0)).unwrap();
        assert_eq!(s.get("P0"), Some(1.0));
        assert_eq!(s.get("S"), Some(0.0));
        assert_eq!(s.get("N_exp"), Some(3.0));
        let four = enumerate_basis(4, 2, Sector::Full).unwrap();
        let set4 = ObservableSet::standard(&four, true).unwrap();
        assert_eq!(set4.names()[0], "P0");
        assert_eq!(set4.names()[1], "S");
        assert_eq!(set4.names().len(), 5 + 81);
        assert!(set4.names().contains(&"cfg_1111".to_string()));
    }

    #[test]
    fn entropy_routes_agree_on_random_mixtures() {
        let b = enumerate_basis(2, 2, Sector::Full).unwrap();
        // deterministic pseudo-random pure states
        let mut seed = 0x2545f491u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed % 10_000) as f64 / 10_000.0 - 0.5
        };
        for _ in 0..20 {
            let states: Vec<StateVector> = (0..3)
                .map(|_| {
                    let v = DVector::from_fn(9, |_, _| Complex64::new(next(), next()));
                    let norm = v.norm();
                    StateVector::new(&b, v / Complex64::new(norm, 0.0)).unwrap()
                })
                .collect();
            let w = [0.2, 0.3, 0.5];
            let rho = DensityMatrix::mixture(&[(w[0], &states[0]), (w[1], &states[1]), (w[2], &states[2])]).unwrap();
            assert!((linear_entropy(&rho) - linear_entropy_from_spectrum(&rho)).abs() < 1e-10);
        }
    }
}
