// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::basis::Sector;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid sector {sector:?} for L={sites}, n_max={n_max}: {reason}")]
    InvalidSector {
        sector: Sector,
        sites: usize,
        n_max: u8,
        reason: String,
    },

    #[error("lattice must have at least one site")]
    EmptyLattice,

    #[error("basis too large: {0}")]
    BasisTooLarge(String),

    #[error("integer overflow computing {0}")]
    Overflow(String),

    #[error("site {site} out of range for a lattice of {sites} sites")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("configuration {config} is not in the basis")]
    ConfigNotInBasis { config: String },

    #[error("operator requires the full Fock basis, got sector {0:?}")]
    SectorMismatch(Sector),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("states live on different bases")]
    BasisMismatch,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid hop from site {from} to site {to}: {reason}")]
    InvalidHop { from: usize, to: usize, reason: String },

    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("non-finite value in integrator stage at t = {t}")]
    NonFinite { t: f64 },

    #[error("norm drift {drift:.3e} at t/T = {t_over_period:.4}; reduce the step size")]
    NormDrift { drift: f64, t_over_period: f64 },

    #[error("trace drift {drift:.3e} at t/T = {t_over_period:.4}")]
    TraceDrift { drift: f64, t_over_period: f64 },

    #[error("positivity violated: minimum eigenvalue {min_eigenvalue:.3e} at t/T = {t_over_period:.4}")]
    PositivityViolation { min_eigenvalue: f64, t_over_period: f64 },

    #[error("oracle dimension {dim} exceeds the supported maximum {max}")]
    OracleTooLarge { dim: usize, max: usize },

    #[error("observer failed: {0}")]
    Observer(String),
}
