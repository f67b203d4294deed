// SPDX-License-Identifier: Apache-2.0

//! Semi-classical resonance bookkeeping for the driven chain.
//!
//! Moving one particle from site `j` to a neighbour `k` changes the local
//! energy by `U (n_k - n_j + 1)`. A drive of frequency `Omega` makes that
//! move resonant when `m Omega` equals the energy change (integer
//! resonance). Moving a particle two sites over through a shared
//! intermediate costs the same expression with the far site's occupation;
//! each of the two hops then supplies half, giving `2 m Omega = dE`
//! (fractional resonance).

use std::collections::BTreeMap;

use num_complex::Complex64;
use ratio::Ratio;

use crate::basis::FockConfig;
use crate::error::{Error, Result};
use crate::operators::LatticeParams;

/// One particle moving from `from` to `to`, either to a neighbour or across
/// one intermediate site.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HopEvent {
    from: usize,
    to: usize,
    config: FockConfig,
}

impl HopEvent {
    pub fn new(config: FockConfig, from: usize, to: usize) -> Result<Self> {
        let invalid = |reason: &str| {
            Err(Error::InvalidHop {
                from,
                to,
                reason: reason.to_string(),
            })
        };
        let sites = config.sites();
        if from >= sites || to >= sites {
            return invalid("site out of range");
        }
        if !matches!(from.abs_diff(to), 1 | 2) {
            return invalid("sites must be one or two apart");
        }
        if config.occupation(from) == 0 {
            return invalid("source site is empty");
        }
        Ok(HopEvent { from, to, config })
    }

    pub fn from_site(&self) -> usize {
        self.from
    }

    pub fn to_site(&self) -> usize {
        self.to
    }

    pub fn config(&self) -> &FockConfig {
        &self.config
    }

    /// 1 for a single hop, 2 for a composite hop over an intermediate site.
    pub fn distance(&self) -> usize {
        self.from.abs_diff(self.to)
    }

    /// Configuration after the move.
    pub fn target(&self) -> FockConfig {
        let c = &self.config;
        c.with_occupation(self.from, c.occupation(self.from) - 1)
            .with_occupation(self.to, c.occupation(self.to) + 1)
    }

    /// `n_to - n_from + 1`, the energy change in units of `U`.
    pub fn energy_quanta(&self) -> i64 {
        i64::from(self.config.occupation(self.to)) - i64::from(self.config.occupation(self.from)) + 1
    }
}

/// Local energy of a configuration (rad/s).
pub fn config_energy(config: &FockConfig, params: &LatticeParams) -> f64 {
    params.local_energy(config)
}

/// `U (n_to - n_from + 1)`.
pub fn hop_energy_diff(event: &HopEvent, params: &LatticeParams) -> f64 {
    params.interaction * event.energy_quanta() as f64
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ResonanceKind {
    Integer,
    Fractional,
    OffResonant,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResonanceClass {
    pub kind: ResonanceKind,
    /// Photon number `m`; 0 for off-resonant drives.
    pub order: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Resonance {
    /// `Omega / U` as an exact fraction.
    pub ratio: Ratio,
    /// `Omega` (rad/s).
    pub frequency: f64,
    pub class: ResonanceClass,
    /// Number of distinct hop events producing this line.
    pub multiplicity: usize,
    /// The same frequency also appears with the other kind.
    pub coincident: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResonanceReport {
    /// Sorted by decreasing frequency, then kind, then order.
    pub resonances: Vec<Resonance>,
    /// Moves that cost no energy; they are not resonances of the drive.
    pub free_transitions: Vec<HopEvent>,
}

fn hop_events(config: &FockConfig) -> Vec<HopEvent> {
    let sites = config.sites();
    let mut events = Vec::new();
    for from in 0..sites {
        for to in 0..sites {
            if let Ok(e) = HopEvent::new(config.clone(), from, to) {
                events.push(e);
            }
        }
    }
    events
}

/// Positive drive frequencies that are integer (single hop) or fractional
/// (two hops) resonant for `config`, for photon orders `1..=m_max`.
pub fn resonance_frequencies(config: &FockConfig, m_max: u32, params: &LatticeParams) -> Result<ResonanceReport> {
    if m_max == 0 {
        return Err(Error::InvalidParameter {
            name: "m_max",
            reason: "must be >= 1".into(),
        });
    }
    let mut lines: BTreeMap<(Ratio, ResonanceKind, u32), usize> = BTreeMap::new();
    let mut free_transitions = Vec::new();
    for event in hop_events(config) {
        let quanta = event.energy_quanta();
        if quanta == 0 {
            free_transitions.push(event);
            continue;
        }
        if quanta < 0 {
            continue;
        }
        let (kind, photons_per_order) = match event.distance() {
            1 => (ResonanceKind::Integer, 1),
            _ => (ResonanceKind::Fractional, 2),
        };
        for m in 1..=m_max {
            let ratio = Ratio::new(quanta, i64::from(photons_per_order * m));
            *lines.entry((ratio, kind, m)).or_default() += 1;
        }
    }

    let mut resonances: Vec<Resonance> = lines
        .iter()
        .map(|(&(ratio, kind, order), &multiplicity)| Resonance {
            ratio,
            frequency: ratio.to_f64() * params.interaction,
            class: ResonanceClass { kind, order },
            multiplicity,
            coincident: lines.keys().any(|&(r, k, _)| r == ratio && k != kind),
        })
        .collect();
    resonances.sort_by(|a, b| {
        b.ratio
            .cmp(&a.ratio)
            .then(a.class.kind.cmp(&b.class.kind))
            .then(a.class.order.cmp(&b.class.order))
    });
    Ok(ResonanceReport {
        resonances,
        free_transitions,
    })
}

/// Classifies a drive frequency against the resonances of `config`. The
/// lowest-order match wins; integer beats fractional at equal order.
pub fn classify_drive(
    config: &FockConfig,
    drive_frequency: f64,
    m_max: u32,
    params: &LatticeParams,
    rel_tol: f64,
) -> Result<ResonanceClass> {
    let report = resonance_frequencies(config, m_max, params)?;
    Ok(report
        .resonances
        .iter()
        .filter(|r| (r.frequency - drive_frequency).abs() <= rel_tol * drive_frequency.abs())
        .map(|r| r.class)
        .min_by_key(|c| (c.order, c.kind))
        .unwrap_or(ResonanceClass {
            kind: ResonanceKind::OffResonant,
            order: 0,
        }))
}

/// Phase `exp(i U t (n_{j+1} - n_j - 1))` attached to the hop on bond
/// `(j, j+1)` in the frame rotating with the local energy.
pub fn rotating_phase(t: f64, config: &FockConfig, bond: usize, params: &LatticeParams) -> Result<Complex64> {
    if bond + 1 >= config.sites() {
        return Err(Error::SiteOutOfRange {
            site: bond + 1,
            sites: config.sites(),
        });
    }
    let exponent = i64::from(config.occupation(bond + 1)) - i64::from(config.occupation(bond)) - 1;
    Ok(Complex64::from_polar(1.0, params.interaction * t * exponent as f64))
}

/// `cos(Omega t)` times [`rotating_phase`]: the full time dependence of one
/// hopping term in the rotating frame.
pub fn drive_factor(t: f64, config: &FockConfig, bond: usize, params: &LatticeParams) -> Result<Complex64> {
    Ok(rotating_phase(t, config, bond, params)? * (params.drive_frequency * t).cos())
}

mod ratio {
    use std::cmp::Ordering;
    use std::fmt;

    /// Reduced fraction with a positive denominator.
    #[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
    pub struct Ratio {
        num: i64,
        den: i64,
    }

    impl Ratio {
        pub fn new(num: i64, den: i64) -> Self {
            assert!(den != 0, "zero denominator");
            let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i64;
            let sign = den.signum();
            Ratio {
                num: sign * num / g,
                den: sign * den / g,
            }
        }

        pub fn numer(&self) -> i64 {
            self.num
        }

        pub fn denom(&self) -> i64 {
            self.den
        }

        pub fn to_f64(&self) -> f64 {
            self.num as f64 / self.den as f64
        }
    }

    fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a.max(1)
    }

    impl Ord for Ratio {
        fn cmp(&self, other: &Self) -> Ordering {
            (i128::from(self.num) * i128::from(other.den)).cmp(&(i128::from(other.num) * i128::from(self.den)))
        }
    }

    impl PartialOrd for Ratio {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }

    impl fmt::Display for Ratio {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if self.den == 1 {
                write!(f, "{}", self.num)
            } else {
                write!(f, "{}/{}", self.num, self.den)
            }
        }
    }
}

pub use ratio::Ratio as FrequencyRatio;
