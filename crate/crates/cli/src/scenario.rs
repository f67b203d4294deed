// SPDX-License-Identifier: Apache-2.0

//! Scenario files: UTF-8 text, one `key = value` per line, `#` comments,
//! lists written `[a, b, c]`.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use fracres_core::basis::{FockConfig, MAX_BASIS_DIM};
use fracres_core::evolution::Schedule;
use fracres_core::operators::{LatticeParams, NoiseParams};
use thiserror::Error;

/// Accepted keys with their defaults, as printed by `--help`.
pub const KEY_HELP: &str = "\
Scenario keys (one `key = value` per line, `#` starts a comment):
  L                 sites (required)
  n_max             per-site cutoff (default: particle number of `initial`)
  U_over_J0         interaction in units of J0 (default 40)
  J0_hz             bare hopping as an ordinary frequency, J0 = 2 pi J0_hz (default 11.5e6)
  omega_hz          on-site frequency; metadata only, runs use the rotating frame (default 0)
  drive             integer (Omega = U), fractional (Omega = U/2) or a ratio Omega/U (default fractional)
  open_system       true to integrate the master equation (default false)
  kappa_hz          decay rates [k10, k21, ...] in 1/s, one per level (default all 0)
  gamma_hz          dephasing rates [g01, g12, ...] in 1/s, one per level (default all 0)
  initial           unit_filling or an occupation list such as [1, 2, 0] (default unit_filling)
  t_final_periods   run length in drive periods T = 2 pi / Omega (default 50)
  dt_periods        step in drive periods; `a/b` accepted (default 1/256)
  output_stride     steps between recorded samples (default 16)
  m_max             highest photon order in resonance reports (default 3)
  record_configs    add one cfg_<occupations> column per basis state (default false)";

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: `{key}`: {message}")]
pub struct ParseError {
    /// 1-based; 0 when the problem is a missing key.
    pub line: usize,
    pub key: String,
    pub message: String,
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Drive {
    Integer,
    Fractional,
    /// `Omega / U`.
    Ratio(f64),
}

impl Drive {
    pub fn ratio(&self) -> f64 {
        match self {
            Drive::Integer => 1.0,
            Drive::Fractional => 0.5,
            Drive::Ratio(r) => *r,
        }
    }
}

impl fmt::Display for Drive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Drive::Integer => f.write_str("integer"),
            Drive::Fractional => f.write_str("fractional"),
            Drive::Ratio(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Initial {
    UnitFilling,
    Occupations(Vec<u8>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub sites: usize,
    pub n_max: u8,
    pub u_over_j0: f64,
    pub j0_hz: f64,
    pub omega_hz: f64,
    pub drive: Drive,
    pub open_system: bool,
    pub kappa_hz: Vec<f64>,
    pub gamma_hz: Vec<f64>,
    pub initial: Initial,
    pub t_final_periods: f64,
    pub dt_periods: f64,
    pub output_stride: usize,
    pub m_max: u32,
    pub record_configs: bool,
}

const KEYS: [&str; 15] = [
    "L",
    "n_max",
    "U_over_J0",
    "J0_hz",
    "omega_hz",
    "drive",
    "open_system",
    "kappa_hz",
    "gamma_hz",
    "initial",
    "t_final_periods",
    "dt_periods",
    "output_stride",
    "m_max",
    "record_configs",
];

fn parse_real(s: &str) -> Result<f64, String> {
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| format!("expected a number, got `{s}`"))?;
            let b: f64 = b.trim().parse().map_err(|_| format!("expected a number, got `{s}`"))?;
            a / b
        }
        None => s.parse().map_err(|_| format!("expected a number, got `{s}`"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn parse_int<T: FromStr>(s: &str) -> Result<T, String> {
    s.parse()
        .map_err(|_| format!("expected a non-negative integer, got `{s}`"))
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("expected true or false, got `{s}`")),
    }
}

fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    let inner = s
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| format!("expected a list like [a, b], got `{s}`"))?
        .trim();
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(|x| item(x.trim())).collect()
}

fn format_list<T: fmt::Display>(items: &[T]) -> String {
    let parts: Vec<String> = items.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

impl ScenarioConfig {
    pub fn from_path(path: &Path) -> Result<Self, crate::CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| crate::CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(text.parse()?)
    }

    pub fn lattice_params(&self) -> fracres_core::Result<LatticeParams> {
        let j0 = std::f64::consts::TAU * self.j0_hz;
        let u = self.u_over_j0 * j0;
        LatticeParams::new(self.sites, self.n_max, u, j0, self.drive.ratio() * u)
    }

    /// Zero-filled when the lists are empty.
    pub fn noise_params(&self) -> fracres_core::Result<NoiseParams> {
        let fill = |v: &[f64]| {
            if v.is_empty() {
                vec![0.0; usize::from(self.n_max)]
            } else {
                v.to_vec()
            }
        };
        NoiseParams::new(fill(&self.kappa_hz), fill(&self.gamma_hz), self.n_max)
    }

    pub fn schedule(&self) -> fracres_core::Result<Schedule> {
        Schedule::new(self.t_final_periods, self.dt_periods, self.output_stride)
    }

    pub fn initial_config(&self) -> FockConfig {
        match &self.initial {
            Initial::UnitFilling => FockConfig::unit_filling(self.sites),
            Initial::Occupations(o) => FockConfig::new(o.clone()),
        }
    }

    /// Serializes every key; parsing the result gives back `self`.
    pub fn to_text(&self) -> String {
        let initial = match &self.initial {
            Initial::UnitFilling => "unit_filling".to_string(),
            Initial::Occupations(o) => format_list(o),
        };
        let lines = [
            ("L", self.sites.to_string()),
            ("n_max", self.n_max.to_string()),
            ("U_over_J0", self.u_over_j0.to_string()),
            ("J0_hz", self.j0_hz.to_string()),
            ("omega_hz", self.omega_hz.to_string()),
            ("drive", self.drive.to_string()),
            ("open_system", self.open_system.to_string()),
            ("kappa_hz", format_list(&self.kappa_hz)),
            ("gamma_hz", format_list(&self.gamma_hz)),
            ("initial", initial),
            ("t_final_periods", self.t_final_periods.to_string()),
            ("dt_periods", self.dt_periods.to_string()),
            ("output_stride", self.output_stride.to_string()),
            ("m_max", self.m_max.to_string()),
            ("record_configs", self.record_configs.to_string()),
        ];
        lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

impl FromStr for ScenarioConfig {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, ParseError> {
        let mut entries: HashMap<&'static str, (usize, String)> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ParseError {
                line,
                key: content.to_string(),
                message: "expected `key = value`".into(),
            })?;
            let key = key.trim();
            let known = KEYS.iter().find(|k| **k == key).ok_or_else(|| ParseError {
                line,
                key: key.to_string(),
                message: "unknown key".into(),
            })?;
            if let Some((first, _)) = entries.insert(known, (line, value.trim().to_string())) {
                return Err(ParseError {
                    line,
                    key: key.to_string(),
                    message: format!("duplicate key, first set on line {first}"),
                });
            }
        }

        let err = |key: &str, message: String| {
            let line = entries.get(key).map_or(0, |(l, _)| *l);
            ParseError {
                line,
                key: key.to_string(),
                message,
            }
        };
        fn get<T>(
            entries: &HashMap<&'static str, (usize, String)>,
            key: &'static str,
            default: T,
            parse: impl Fn(&str) -> Result<T, String>,
        ) -> Result<T, ParseError> {
            match entries.get(key) {
                None => Ok(default),
                Some((line, v)) => parse(v).map_err(|message| ParseError {
                    line: *line,
                    key: key.to_string(),
                    message,
                }),
            }
        }

        let sites: usize = match entries.get("L") {
            None => return Err(err("L", "required key is missing".into())),
            Some(_) => get(&entries, "L", 0, parse_int)?,
        };
        if sites == 0 {
            return Err(err("L", "must be >= 1".into()));
        }
        let initial = get(&entries, "initial", Initial::UnitFilling, |s| {
            if s == "unit_filling" {
                Ok(Initial::UnitFilling)
            } else {
                parse_list(s, parse_int::<u8>).map(Initial::Occupations)
            }
        })?;
        let particles = match &initial {
            Initial::UnitFilling => sites as u64,
            Initial::Occupations(o) => {
                if o.len() != sites {
                    return Err(err("initial", format!("has {} occupations for L = {sites}", o.len())));
                }
                o.iter().map(|&n| u64::from(n)).sum()
            }
        };
        let default_n_max = u8::try_from(particles).map_err(|_| err("initial", "too many particles".into()))?;
        let n_max: u8 = get(&entries, "n_max", default_n_max, parse_int)?;
        if let Initial::Occupations(o) = &initial {
            if o.iter().any(|&n| n > n_max) {
                return Err(err("initial", format!("occupation above n_max = {n_max}")));
            }
        }
        if matches!(initial, Initial::UnitFilling) && n_max == 0 {
            return Err(err("n_max", "unit filling needs n_max >= 1".into()));
        }

        let positive = |key: &'static str, v: f64| {
            if v > 0.0 {
                Ok(v)
            } else {
                Err(err(key, format!("must be > 0, got {v}")))
            }
        };
        let u_over_j0 = positive("U_over_J0", get(&entries, "U_over_J0", 40.0, parse_real)?)?;
        let j0_hz = get(&entries, "J0_hz", 11.5e6, parse_real)?;
        if j0_hz < 0.0 {
            return Err(err("J0_hz", "must be >= 0".into()));
        }
        let omega_hz = get(&entries, "omega_hz", 0.0, parse_real)?;
        let drive = get(&entries, "drive", Drive::Fractional, |s| match s {
            "integer" => Ok(Drive::Integer),
            "fractional" => Ok(Drive::Fractional),
            other => parse_real(other)
                .map(Drive::Ratio)
                .map_err(|_| format!("expected integer, fractional or a ratio, got `{other}`")),
        })?;
        if drive.ratio() <= 0.0 {
            return Err(err("drive", "ratio must be > 0".into()));
        }
        let open_system = get(&entries, "open_system", false, parse_bool)?;
        let rates = |key: &'static str| -> Result<Vec<f64>, ParseError> {
            let v = get(&entries, key, Vec::new(), |s| parse_list(s, parse_real))?;
            if !v.is_empty() && v.len() != usize::from(n_max) {
                return Err(err(key, format!("has {} rates, expected n_max = {n_max}", v.len())));
            }
            if v.iter().any(|r| *r < 0.0) {
                return Err(err(key, "rates must be >= 0".into()));
            }
            Ok(v)
        };
        let kappa_hz = rates("kappa_hz")?;
        let gamma_hz = rates("gamma_hz")?;
        let t_final_periods = positive("t_final_periods", get(&entries, "t_final_periods", 50.0, parse_real)?)?;
        let dt_periods = positive("dt_periods", get(&entries, "dt_periods", 1.0 / 256.0, parse_real)?)?;
        if t_final_periods < dt_periods {
            return Err(err("t_final_periods", "must be >= dt_periods".into()));
        }
        let output_stride: usize = get(&entries, "output_stride", 16, parse_int)?;
        if output_stride == 0 {
            return Err(err("output_stride", "must be >= 1".into()));
        }
        let m_max: u32 = get(&entries, "m_max", 3, parse_int)?;
        if m_max == 0 {
            return Err(err("m_max", "must be >= 1".into()));
        }
        let record_configs = get(&entries, "record_configs", false, parse_bool)?;

        let config = ScenarioConfig {
            sites,
            n_max,
            u_over_j0,
            j0_hz,
            omega_hz,
            drive,
            open_system,
            kappa_hz,
            gamma_hz,
            initial,
            t_final_periods,
            dt_periods,
            output_stride,
            m_max,
            record_configs,
        };
        let dim = u32::try_from(sites)
            .ok()
            .and_then(|l| (usize::from(n_max) + 1).checked_pow(l))
            .filter(|&d| d <= MAX_BASIS_DIM);
        if dim.is_none() {
            return Err(err(
                "L",
                format!("full basis of (n_max + 1)^L states exceeds {MAX_BASIS_DIM}"),
            ));
        }
        Ok(config)
    }
}
