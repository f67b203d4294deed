// SPDX-License-Identifier: Apache-2.0

//! Truncated bosonic Fock bases.
//!
//! A [`BasisMap`] is an ordered list of occupation vectors with an inverse
//! lookup. Configurations are always listed in lexicographic order of their
//! occupation vectors, site 0 first, so dense indices are reproducible.
//!
//! Three sectors are supported:
//! * [`Sector::Full`]: every vector in `[0, n_max]^L`, `(n_max+1)^L` entries.
//! * [`Sector::FixedN`]: vectors with a fixed total particle number.
//! * [`Sector::FixedNPositiveParity`]: one representative per reflection
//!   orbit; basis vector `i` is the normalized symmetric combination
//!   `(|c> + |P c>)/sqrt(2)` (or `|c>` for palindromes).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest basis [`BasisMap::enumerate`] will build.
pub const MAX_BASIS_DIM: usize = 1 << 22;

/// Occupation numbers `(n_1, ..., n_L)` of a lattice configuration.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FockConfig(Vec<u8>);

impl FockConfig {
    pub fn new(occupations: impl Into<Vec<u8>>) -> Self {
        FockConfig(occupations.into())
    }

    pub fn vacuum(sites: usize) -> Self {
        FockConfig(vec![0; sites])
    }

    /// `|1, 1, ..., 1>`
    pub fn unit_filling(sites: usize) -> Self {
        FockConfig(vec![1; sites])
    }

    pub fn sites(&self) -> usize {
        self.0.len()
    }

    pub fn occupations(&self) -> &[u8] {
        &self.0
    }

    pub fn occupation(&self, site: usize) -> u8 {
        self.0[site]
    }

    pub fn total(&self) -> u32 {
        self.0.iter().map(|&n| u32::from(n)).sum()
    }

    pub fn sum_squares(&self) -> u64 {
        self.0.iter().map(|&n| u64::from(n) * u64::from(n)).sum()
    }

    pub fn max_occupation(&self) -> u8 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Lattice reflection `n_j -> n_{L+1-j}`.
    pub fn reflect(&self) -> FockConfig {
        let mut occ = self.0.clone();
        occ.reverse();
        FockConfig(occ)
    }

    pub fn is_palindrome(&self) -> bool {
        self.0.iter().eq(self.0.iter().rev())
    }

    /// Copy with one occupation replaced.
    pub fn with_occupation(&self, site: usize, n: u8) -> FockConfig {
        let mut occ = self.0.clone();
        occ[site] = n;
        FockConfig(occ)
    }

    /// Compact label: digits run together when every occupation is a single
    /// digit (`"120"`), dot-separated otherwise (`"1.10.0"`).
    pub fn label(&self) -> String {
        if self.0.iter().all(|&n| n < 10) {
            self.0.iter().map(|n| char::from(b'0' + n)).collect()
        } else {
            self.0.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(".")
        }
    }
}

impl fmt::Display for FockConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}>", self.label())
    }
}

/// Reverses the occupation vector. An involution.
pub fn parity_reflect(config: &FockConfig) -> FockConfig {
    config.reflect()
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Sector {
    Full,
    FixedN(u32),
    FixedNPositiveParity(u32),
}

impl Sector {
    pub fn particle_number(&self) -> Option<u32> {
        match *self {
            Sector::Full => None,
            Sector::FixedN(n) | Sector::FixedNPositiveParity(n) => Some(n),
        }
    }
}

/// Identifies a basis without holding on to it; states and operators carry
/// this to detect mismatched arguments.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisKey {
    pub sites: usize,
    pub n_max: u8,
    pub sector: Sector,
}

/// Bijection between Fock configurations and dense indices.
#[derive(Clone, Debug)]
pub struct BasisMap {
    key: BasisKey,
    configs: Vec<FockConfig>,
    index: HashMap<FockConfig, usize>,
}

impl BasisMap {
    pub fn enumerate(sites: usize, n_max: u8, sector: Sector) -> Result<Self> {
        if sites == 0 {
            return Err(Error::EmptyLattice);
        }
        let capacity = sites as u64 * u64::from(n_max);
        if let Some(n) = sector.particle_number() {
            if u64::from(n) > capacity {
                return Err(Error::InvalidSector {
                    sector,
                    sites,
                    n_max,
                    reason: format!("N = {n} exceeds L * n_max = {capacity}"),
                });
            }
        }
        let full = u32::try_from(sites)
            .ok()
            .and_then(|s| (usize::from(n_max) + 1).checked_pow(s));
        if sector == Sector::Full && full.is_none_or(|d| d > MAX_BASIS_DIM) {
            return Err(Error::BasisTooLarge(format!(
                "(n_max+1)^L with L={sites}, n_max={n_max}"
            )));
        }

        let mut configs = Vec::new();
        let mut current = vec![0u8; sites];
        let target = sector.particle_number();
        fill_lexicographic(&mut current, 0, n_max, target, &mut configs)?;
        if let Sector::FixedNPositiveParity(_) = sector {
            configs.retain(|c| *c <= c.reflect());
        }

        let index = configs.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        Ok(BasisMap {
            key: BasisKey { sites, n_max, sector },
            configs,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn key(&self) -> BasisKey {
        self.key
    }

    pub fn sites(&self) -> usize {
        self.key.sites
    }

    pub fn n_max(&self) -> u8 {
        self.key.n_max
    }

    pub fn sector(&self) -> Sector {
        self.key.sector
    }

    pub fn is_full(&self) -> bool {
        self.key.sector == Sector::Full
    }

    pub fn configs(&self) -> &[FockConfig] {
        &self.configs
    }

    pub fn config(&self, index: usize) -> &FockConfig {
        &self.configs[index]
    }

    pub fn index_of(&self, config: &FockConfig) -> Option<usize> {
        self.index.get(config).copied()
    }

    /// Index of the basis vector that `config` contributes to. In the parity
    /// sector this is the orbit representative.
    pub fn representative_index(&self, config: &FockConfig) -> Option<usize> {
        match self.key.sector {
            Sector::FixedNPositiveParity(_) => {
                let reflected = config.reflect();
                self.index_of(if reflected < *config { &reflected } else { config })
            }
            _ => self.index_of(config),
        }
    }

    /// Fock configurations making up basis vector `index` with their
    /// amplitudes.
    pub fn components(&self, index: usize) -> Vec<(FockConfig, f64)> {
        let c = &self.configs[index];
        match self.key.sector {
            Sector::FixedNPositiveParity(_) if !c.is_palindrome() => {
                let w = std::f64::consts::FRAC_1_SQRT_2;
                vec![(c.clone(), w), (c.reflect(), w)]
            }
            _ => vec![(c.clone(), 1.0)],
        }
    }
}

fn fill_lexicographic(
    current: &mut [u8],
    site: usize,
    n_max: u8,
    target: Option<u32>,
    out: &mut Vec<FockConfig>,
) -> Result<()> {
    let placed: u32 = current[..site].iter().map(|&n| u32::from(n)).sum();
    if site == current.len() {
        if target.is_none_or(|t| t == placed) {
            if out.len() >= MAX_BASIS_DIM {
                return Err(Error::BasisTooLarge(format!(
                    "more than {MAX_BASIS_DIM} configurations"
                )));
            }
            out.push(FockConfig(current.to_vec()));
        }
        return Ok(());
    }
    let remaining_sites = (current.len() - site - 1) as u32;
    for n in 0..=n_max {
        if let Some(t) = target {
            let total = placed + u32::from(n);
            if total > t {
                break;
            }
            if total + remaining_sites * u32::from(n_max) < t {
                continue;
            }
        }
        current[site] = n;
        fill_lexicographic(current, site + 1, n_max, target, out)?;
    }
    current[site] = 0;
    Ok(())
}

pub fn enumerate_basis(sites: usize, n_max: u8, sector: Sector) -> Result<BasisMap> {
    BasisMap::enumerate(sites, n_max, sector)
}

/// Number of ways to place `n` bosons on `sites` sites without a cutoff,
/// `(N+L-1)! / (N! (L-1)!)`, in exact integer arithmetic.
pub fn dimension_count(n: u64, sites: u64) -> Result<u64> {
    if sites == 0 {
        return Err(Error::EmptyLattice);
    }
    let overflow = || Error::Overflow(format!("D(N={n}, L={sites})"));
    let top = n.checked_add(sites - 1).ok_or_else(overflow)?;
    let k = n.min(sites - 1);
    let mut acc: u128 = 1;
    for i in 1..=u128::from(k) {
        // acc * (top - k + i) is divisible by i at every step.
        acc = acc.checked_mul(u128::from(top - k) + i).ok_or_else(overflow)? / i;
    }
    u64::try_from(acc).map_err(|_| overflow())
}

/// Pure state as a complex amplitude vector over a basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    key: BasisKey,
    amplitudes: DVector<Complex64>,
}

pub const NORM_TOLERANCE: f64 = 1e-12;

impl StateVector {
    pub fn new(basis: &BasisMap, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for a basis of {}",
                amplitudes.len(),
                basis.len()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(StateVector {
            key: basis.key(),
            amplitudes,
        })
    }

    /// Skips the normalization check. Integrators use this so that norm drift
    /// stays visible.
    pub(crate) fn from_raw(key: BasisKey, amplitudes: DVector<Complex64>) -> Self {
        StateVector { key, amplitudes }
    }

    /// Builds a state from amplitudes on Fock configurations, projecting onto
    /// the basis (orbit representatives in the parity sector).
    pub fn from_configs(basis: &BasisMap, terms: &[(FockConfig, Complex64)]) -> Result<Self> {
        let mut amplitudes = DVector::zeros(basis.len());
        for (config, amp) in terms {
            let i = basis
                .representative_index(config)
                .ok_or_else(|| Error::ConfigNotInBasis {
                    config: config.to_string(),
                })?;
            let weight = basis
                .components(i)
                .iter()
                .find(|(c, _)| c == config)
                .map(|&(_, w)| w)
                .ok_or_else(|| Error::ConfigNotInBasis {
                    config: config.to_string(),
                })?;
            amplitudes[i] += amp * weight;
        }
        StateVector::new(basis, amplitudes)
    }

    pub fn basis_state(basis: &BasisMap, config: &FockConfig) -> Result<Self> {
        StateVector::from_configs(basis, &[(config.clone(), Complex64::new(1.0, 0.0))])
    }

    pub fn key(&self) -> BasisKey {
        self.key
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }
}

/// The positive-parity states of the three-site unit-filling problem.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum NamedState {
    Psi0,
    Psi1,
    Psi2,
    Psi3,
    Psi4,
    Psi5,
}

impl NamedState {
    pub const ALL: [NamedState; 6] = [
        NamedState::Psi0,
        NamedState::Psi1,
        NamedState::Psi2,
        NamedState::Psi3,
        NamedState::Psi4,
        NamedState::Psi5,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Column name used in output files (`P0` ... `P5`).
    pub fn population_label(self) -> String {
        format!("P{}", self.index())
    }

    /// Configurations with equal weight in the state. `Psi0` is unit filling
    /// on any lattice; the others are defined for three sites only.
    pub fn constituents(self, sites: usize) -> Result<Vec<FockConfig>> {
        if self == NamedState::Psi0 {
            return Ok(vec![FockConfig::unit_filling(sites)]);
        }
        if sites != 3 {
            return Err(Error::InvalidParameter {
                name: "named_state",
                reason: format!("{self:?} is defined for L = 3 only, got L = {sites}"),
            });
        }
        let pair = |a: [u8; 3]| {
            let c = FockConfig::new(a);
            let r = c.reflect();
            vec![c, r]
        };
        Ok(match self {
            NamedState::Psi0 => unreachable!(),
            NamedState::Psi1 => pair([1, 2, 0]),
            NamedState::Psi2 => pair([1, 0, 2]),
            NamedState::Psi3 => pair([2, 1, 0]),
            NamedState::Psi4 => vec![FockConfig::new([0, 3, 0])],
            NamedState::Psi5 => pair([3, 0, 0]),
        })
    }
}

impl FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digit = s
            .trim()
            .to_ascii_lowercase()
            .strip_prefix("psi")
            .and_then(|d| d.parse::<usize>().ok());
        match digit {
            Some(i) if i < 6 => Ok(NamedState::ALL[i]),
            _ => Err(Error::InvalidParameter {
                name: "named_state",
                reason: format!("unknown state `{s}`, expected psi0..psi5"),
            }),
        }
    }
}

pub fn named_state(name: NamedState, basis: &BasisMap) -> Result<StateVector> {
    let configs = name.constituents(basis.sites())?;
    let amp = Complex64::new(1.0 / (configs.len() as f64).sqrt(), 0.0);
    let terms: Vec<_> = configs.into_iter().map(|c| (c, amp)).collect();
    StateVector::from_configs(basis, &terms)
}
