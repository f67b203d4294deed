// SPDX-License-Identifier: Apache-2.0

//! Sparse operators of the driven Bose-Hubbard chain.
//!
//! Units: `hbar = 1`. Hamiltonian parameters are angular frequencies (rad/s)
//! and noise rates are plain rates (1/s).
//!
//! Every operator is assembled from its action on single Fock
//! configurations, so the same builders work on the full basis, on fixed-N
//! sectors and (for reflection-symmetric operators) on the positive-parity
//! sector. Operators that change the particle number require the full basis.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::{BasisMap, FockConfig, Sector};
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

pub type SparseOperator = CsrMatrix;

/// Relative drop threshold for commutators, scaled by `max|A| * max|B|`.
pub const COMMUTATOR_ZERO: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeParams {
    pub sites: usize,
    pub n_max: u8,
    /// On-site frequency `omega` (rad/s).
    pub omega: f64,
    /// On-site interaction `U` (rad/s).
    pub interaction: f64,
    /// Bare hopping `J0` (rad/s).
    pub hopping: f64,
    /// Drive frequency `Omega` (rad/s).
    pub drive_frequency: f64,
    /// Replace `J0 cos(Omega t)` by the constant `J0`. `Omega` then only
    /// sets the time unit.
    pub static_hopping: bool,
}

impl LatticeParams {
    pub fn new(sites: usize, n_max: u8, interaction: f64, hopping: f64, drive_frequency: f64) -> Result<Self> {
        let params = LatticeParams {
            sites,
            n_max,
            omega: 0.0,
            interaction,
            hopping,
            drive_frequency,
            static_hopping: false,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_static_hopping(mut self) -> Self {
        self.static_hopping = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: &str| {
            Err(Error::InvalidParameter {
                name,
                reason: reason.to_string(),
            })
        };
        if self.sites == 0 {
            return Err(Error::EmptyLattice);
        }
        if !self.omega.is_finite() {
            return bad("omega", "must be finite");
        }
        if !(self.interaction.is_finite() && self.interaction > 0.0) {
            return bad("U", "must be finite and > 0");
        }
        if !(self.hopping.is_finite() && self.hopping >= 0.0) {
            return bad("J0", "must be finite and >= 0");
        }
        if !(self.drive_frequency.is_finite() && self.drive_frequency > 0.0) {
            return bad("Omega", "must be finite and > 0");
        }
        Ok(())
    }

    /// Non-fatal note when the chain is outside the `U >> J0` regime.
    pub fn strong_interaction_warning(&self) -> Option<String> {
        (self.interaction < 10.0 * self.hopping).then(|| {
            format!(
                "U/J0 = {:.3} < 10: outside the strongly interacting regime",
                self.interaction / self.hopping
            )
        })
    }

    /// Drive period `T = 2 pi / Omega` (s).
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.drive_frequency
    }

    /// `J(t)`.
    pub fn hopping_at(&self, t: f64) -> f64 {
        if self.static_hopping {
            self.hopping
        } else {
            self.hopping * (self.drive_frequency * t).cos()
        }
    }

    /// Eigenvalue of the local energy term on `config`:
    /// `sum_j (omega n_j + U/2 n_j^2)`. Evaluated from the integer sums so
    /// that reflected configurations get bit-identical energies.
    pub fn local_energy(&self, config: &FockConfig) -> f64 {
        self.omega * f64::from(config.total()) + 0.5 * self.interaction * config.sum_squares() as f64
    }
}

/// Per-level rates of the local loss channels.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseParams {
    /// `kappa_{n,n-1}` for `n = 1..=n_max` (1/s).
    pub decay: Vec<f64>,
    /// `gamma_{n-1,n}` for `n = 1..=n_max` (1/s).
    pub dephasing: Vec<f64>,
}

impl NoiseParams {
    pub fn new(decay: Vec<f64>, dephasing: Vec<f64>, n_max: u8) -> Result<Self> {
        let noise = NoiseParams { decay, dephasing };
        noise.validate(n_max)?;
        Ok(noise)
    }

    pub fn none(n_max: u8) -> Self {
        NoiseParams {
            decay: vec![0.0; usize::from(n_max)],
            dephasing: vec![0.0; usize::from(n_max)],
        }
    }

    pub fn validate(&self, n_max: u8) -> Result<()> {
        for (name, rates) in [("kappa", &self.decay), ("gamma", &self.dephasing)] {
            if rates.len() != usize::from(n_max) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("expected {n_max} rates, got {}", rates.len()),
                });
            }
            if let Some(r) = rates.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("rate {r} must be finite and >= 0"),
                });
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.decay.iter().chain(&self.dephasing).all(|&r| r == 0.0)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum CollapseKind {
    Decay,
    Dephase,
}

/// Assembles an operator from its action on configurations. `action` pushes
/// `(target config, amplitude)` pairs for one source configuration.
pub fn assemble(basis: &BasisMap, action: impl Fn(&FockConfig, &mut Vec<(FockConfig, f64)>)) -> Result<CsrMatrix> {
    let mut triplets = Vec::new();
    let mut images = Vec::new();
    for col in 0..basis.len() {
        for (source, w_source) in basis.components(col) {
            images.clear();
            action(&source, &mut images);
            for (target, amp) in images.drain(..) {
                let row = basis
                    .representative_index(&target)
                    .ok_or(Error::SectorMismatch(basis.sector()))?;
                let w_target = basis
                    .components(row)
                    .iter()
                    .find(|(c, _)| *c == target)
                    .map(|&(_, w)| w)
                    .ok_or(Error::SectorMismatch(basis.sector()))?;
                triplets.push((row, col, Complex64::new(w_source * amp * w_target, 0.0)));
            }
        }
    }
    CsrMatrix::from_triplets(basis.len(), basis.len(), triplets)
}

fn check_site(basis: &BasisMap, site: usize) -> Result<()> {
    if site >= basis.sites() {
        return Err(Error::SiteOutOfRange {
            site,
            sites: basis.sites(),
        });
    }
    Ok(())
}

fn require_full(basis: &BasisMap) -> Result<()> {
    if !basis.is_full() {
        return Err(Error::SectorMismatch(basis.sector()));
    }
    Ok(())
}

/// `(n_max+1) x (n_max+1)` lowering matrix, `<n-1| a |n> = sqrt(n)`.
pub fn local_lowering(n_max: u8) -> DMatrix<f64> {
    let d = usize::from(n_max) + 1;
    DMatrix::from_fn(d, d, |r, c| if c == r + 1 { (c as f64).sqrt() } else { 0.0 })
}

/// Local decay collapse matrix: `sqrt(n kappa_{n,n-1})` at `(n-1, n)`.
pub fn local_decay(noise: &NoiseParams) -> DMatrix<f64> {
    let d = noise.decay.len() + 1;
    DMatrix::from_fn(d, d, |r, c| {
        if c == r + 1 {
            (c as f64 * noise.decay[c - 1]).sqrt()
        } else {
            0.0
        }
    })
}

/// Local dephasing collapse matrix: `n sqrt(gamma_{n-1,n})` at `(n, n)`.
pub fn local_dephasing(noise: &NoiseParams) -> DMatrix<f64> {
    let d = noise.dephasing.len() + 1;
    DMatrix::from_fn(d, d, |r, c| {
        if r == c && r > 0 {
            r as f64 * noise.dephasing[r - 1].sqrt()
        } else {
            0.0
        }
    })
}

/// Embeds a single-site matrix into the full lattice (identity on the other
/// sites) by mixed-radix index arithmetic: with site 0 most significant, the
/// full-basis index of `(n_1..n_L)` is `sum_j n_j (n_max+1)^(L-1-j)`, so a
/// local transition `n -> m` shifts the index by `(m - n) * stride(site)`.
pub fn embed_local(basis: &BasisMap, local: &DMatrix<f64>, site: usize) -> Result<CsrMatrix> {
    require_full(basis)?;
    check_site(basis, site)?;
    let d = usize::from(basis.n_max()) + 1;
    if local.shape() != (d, d) {
        return Err(Error::DimensionMismatch(format!(
            "local operator is {}x{}, site dimension is {d}",
            local.nrows(),
            local.ncols()
        )));
    }
    let stride = d.pow((basis.sites() - 1 - site) as u32);
    let mut triplets = Vec::new();
    for (col, config) in basis.configs().iter().enumerate() {
        let n = usize::from(config.occupation(site));
        for m in 0..d {
            let v = local[(m, n)];
            if v != 0.0 {
                let row = col + m * stride - n * stride;
                triplets.push((row, col, Complex64::new(v, 0.0)));
            }
        }
    }
    CsrMatrix::from_triplets(basis.len(), basis.len(), triplets)
}

/// `a_site` on the full basis.
pub fn ladder_down(basis: &BasisMap, site: usize) -> Result<CsrMatrix> {
    embed_local(basis, &local_lowering(basis.n_max()), site)
}

/// `a_site^dagger` on the full basis; annihilates `n = n_max`.
pub fn ladder_up(basis: &BasisMap, site: usize) -> Result<CsrMatrix> {
    embed_local(basis, &local_lowering(basis.n_max()).transpose(), site)
}

/// `n_site`. Not defined on the parity sector.
pub fn number_at(basis: &BasisMap, site: usize) -> Result<CsrMatrix> {
    check_site(basis, site)?;
    if let Sector::FixedNPositiveParity(_) = basis.sector() {
        return Err(Error::SectorMismatch(basis.sector()));
    }
    assemble(basis, |c, out| out.push((c.clone(), f64::from(c.occupation(site)))))
}

/// Diagonal local energy `sum_j (omega n_j + U/2 n_j^2)`.
pub fn build_h0(params: &LatticeParams, basis: &BasisMap) -> Result<CsrMatrix> {
    assemble(basis, |c, out| out.push((c.clone(), params.local_energy(c))))
}

/// Moves one particle from `from` to `to`: `a_to^dagger a_from`.
fn push_hop(c: &FockConfig, from: usize, to: usize, n_max: u8, out: &mut Vec<(FockConfig, f64)>) {
    let (nf, nt) = (c.occupation(from), c.occupation(to));
    if nf == 0 || nt == n_max {
        return;
    }
    let amp = (f64::from(nf) * f64::from(nt + 1)).sqrt();
    out.push((c.with_occupation(from, nf - 1).with_occupation(to, nt + 1), amp));
}

/// `sum_j (a_j^dagger a_{j+1} + a_{j+1}^dagger a_j)` with open boundaries.
pub fn build_hopping(basis: &BasisMap) -> Result<CsrMatrix> {
    let sites = basis.sites();
    if sites < 2 {
        return Err(Error::InvalidParameter {
            name: "L",
            reason: "hopping needs at least two sites".into(),
        });
    }
    let n_max = basis.n_max();
    assemble(basis, |c, out| {
        for j in 0..sites - 1 {
            push_hop(c, j + 1, j, n_max, out);
            push_hop(c, j, j + 1, n_max, out);
        }
    })
}

fn check_square_pair(a: &CsrMatrix, b: &CsrMatrix) -> Result<()> {
    if a.dims() != b.dims() || !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

/// `H(t) = H0 - J(t) Hop`.
pub fn hamiltonian_at(t: f64, params: &LatticeParams, h0: &CsrMatrix, hopping: &CsrMatrix) -> Result<CsrMatrix> {
    check_square_pair(h0, hopping)?;
    h0.linear_combination(
        Complex64::new(1.0, 0.0),
        hopping,
        Complex64::new(-params.hopping_at(t), 0.0),
    )
}

/// Collapse operator of one loss channel on one site (full basis only).
pub fn build_collapse(basis: &BasisMap, noise: &NoiseParams, site: usize, kind: CollapseKind) -> Result<CsrMatrix> {
    noise.validate(basis.n_max())?;
    let local = match kind {
        CollapseKind::Decay => local_decay(noise),
        CollapseKind::Dephase => local_dephasing(noise),
    };
    embed_local(basis, &local, site)
}

/// Every collapse operator, ordered site by site with decay before dephasing.
/// Channels whose rates are all zero are skipped.
pub fn all_collapse_operators(basis: &BasisMap, noise: &NoiseParams) -> Result<Vec<CsrMatrix>> {
    let mut ops = Vec::new();
    for site in 0..basis.sites() {
        for kind in [CollapseKind::Decay, CollapseKind::Dephase] {
            let op = build_collapse(basis, noise, site, kind)?;
            if op.nnz() > 0 {
                ops.push(op);
            }
        }
    }
    Ok(ops)
}

/// Total number operator and the reflection operator.
pub fn symmetry_operators(basis: &BasisMap) -> Result<(CsrMatrix, CsrMatrix)> {
    let number = assemble(basis, |c, out| out.push((c.clone(), f64::from(c.total()))))?;
    let parity = assemble(basis, |c, out| out.push((c.reflect(), 1.0)))?;
    Ok((number, parity))
}

/// `AB - BA` with entries below `COMMUTATOR_ZERO * max|A| * max|B|` dropped.
pub fn commutator(a: &CsrMatrix, b: &CsrMatrix) -> Result<CsrMatrix> {
    let scale = (a.max_abs() * b.max_abs()).max(1.0);
    commutator_with_threshold(a, b, COMMUTATOR_ZERO * scale)
}

pub fn commutator_with_threshold(a: &CsrMatrix, b: &CsrMatrix, threshold: f64) -> Result<CsrMatrix> {
    check_square_pair(a, b)?;
    let ab = a.matmul(b)?;
    let ba = b.matmul(a)?;
    CsrMatrix::from_triplets_with_threshold(
        a.rows(),
        a.cols(),
        ab.triplets().chain(ba.triplets().map(|(r, c, v)| (r, c, -v))),
        threshold,
    )
}

/// The Hamiltonian pieces of one lattice, built once and reused at every
/// time step.
#[derive(Clone, Debug)]
pub struct DrivenHamiltonian {
    params: LatticeParams,
    h0: CsrMatrix,
    hopping: CsrMatrix,
}

impl DrivenHamiltonian {
    pub fn new(params: &LatticeParams, basis: &BasisMap) -> Result<Self> {
        params.validate()?;
        if params.sites != basis.sites() {
            return Err(Error::DimensionMismatch(format!(
                "parameters describe {} sites, basis has {}",
                params.sites,
                basis.sites()
            )));
        }
        let h0 = build_h0(params, basis)?;
        let hopping = if basis.sites() > 1 {
            build_hopping(basis)?
        } else {
            CsrMatrix::zeros(basis.len(), basis.len())
        };
        Ok(DrivenHamiltonian {
            params: params.clone(),
            h0,
            hopping,
        })
    }

    pub fn params(&self) -> &LatticeParams {
        &self.params
    }

    pub fn h0(&self) -> &CsrMatrix {
        &self.h0
    }

    pub fn hopping(&self) -> &CsrMatrix {
        &self.hopping
    }

    pub fn dim(&self) -> usize {
        self.h0.rows()
    }

    pub fn at(&self, t: f64) -> CsrMatrix {
        hamiltonian_at(t, &self.params, &self.h0, &self.hopping).expect("pieces share one basis")
    }
}
