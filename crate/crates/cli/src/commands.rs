// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write;
use std::time::Instant;

use fracres_core::basis::{dimension_count, enumerate_basis, BasisMap, Sector, StateVector};
use fracres_core::density::DensityMatrix;
use fracres_core::evolution::{evolve_closed, evolve_open};
use fracres_core::observables::{ObservableSet, Recorder};
use fracres_core::resonance::{classify_drive, resonance_frequencies, ResonanceKind};
use serde::Serialize;

use crate::plot;
use crate::scenario::{Drive, ScenarioConfig};
use crate::table::Table;
use crate::CliError;

/// Integrator bookkeeping for one run.
#[derive(Clone, Debug)]
pub struct Diagnostics {
    pub open: bool,
    pub steps: usize,
    pub samples: usize,
    pub integrated_dim: usize,
    pub full_dim: usize,
    /// `| |psi| - 1 |` (closed) or `|tr rho - 1|` (open), worst over steps.
    pub max_drift: f64,
    pub max_hermiticity_defect: Option<f64>,
    pub min_eigenvalue: Option<f64>,
    pub seconds: f64,
}

pub struct RunOutput {
    pub recorder: Recorder,
    pub diagnostics: Diagnostics,
}

impl RunOutput {
    pub fn table(&self) -> Table {
        let mut columns = vec!["t_over_T".to_string()];
        columns.extend(self.recorder.names().iter().cloned());
        let mut t = Table::new(columns);
        for s in &self.recorder.samples {
            let mut row = vec![s.t_over_period];
            row.extend(&s.values);
            t.push(row);
        }
        t
    }

    pub fn series(&self, name: &str) -> Option<Vec<f64>> {
        self.recorder.series(name)
    }

    pub fn times(&self) -> Vec<f64> {
        self.recorder.times()
    }
}

fn full_basis(config: &ScenarioConfig) -> Result<BasisMap, CliError> {
    Ok(enumerate_basis(config.sites, config.n_max, Sector::Full)?)
}

/// Runs the scenario closed (`open = false`) or with its noise channels.
pub fn run(config: &ScenarioConfig, open: bool) -> Result<RunOutput, CliError> {
    let params = config.lattice_params()?;
    let schedule = config.schedule()?;
    let basis = full_basis(config)?;
    let psi0 = StateVector::basis_state(&basis, &config.initial_config())?;
    let mut recorder = Recorder::new(ObservableSet::standard(&basis, config.record_configs)?);
    let start = Instant::now();
    let diagnostics = if open {
        let noise = config.noise_params()?;
        let out = evolve_open(
            &basis,
            &DensityMatrix::from_pure(&psi0),
            &params,
            &noise,
            &schedule,
            &mut recorder,
        )?;
        Diagnostics {
            open,
            steps: out.steps,
            samples: out.samples,
            integrated_dim: out.integrated_dim,
            full_dim: basis.len(),
            max_drift: out.max_trace_drift,
            max_hermiticity_defect: Some(out.max_hermiticity_defect),
            min_eigenvalue: out.min_eigenvalue,
            seconds: start.elapsed().as_secs_f64(),
        }
    } else {
        let out = evolve_closed(&basis, &psi0, &params, &schedule, &mut recorder)?;
        Diagnostics {
            open,
            steps: out.steps,
            samples: out.samples,
            integrated_dim: out.integrated_dim,
            full_dim: basis.len(),
            max_drift: out.max_norm_drift,
            max_hermiticity_defect: None,
            min_eigenvalue: None,
            seconds: start.elapsed().as_secs_f64(),
        }
    };
    Ok(RunOutput { recorder, diagnostics })
}

/// Time of the largest value, with the value.
pub fn peak(times: &[f64], values: &[f64]) -> Option<(f64, f64)> {
    values
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, &v)| match best {
            Some((_, b)) if b >= v => best,
            _ => Some((i, v)),
        })
        .map(|(i, v)| (times[i], v))
}

/// First sample time at which `values` exceeds `level`.
pub fn first_crossing(times: &[f64], values: &[f64], level: f64) -> Option<f64> {
    values.iter().position(|&v| v > level).map(|i| times[i])
}

/// Mean spacing of the local maxima that reach half the global maximum.
pub fn oscillation_period(times: &[f64], values: &[f64]) -> Option<f64> {
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let maxima: Vec<f64> = (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1] && values[i] >= 0.5 * top)
        .map(|i| times[i])
        .collect();
    (maxima.len() >= 2).then(|| (maxima[maxima.len() - 1] - maxima[0]) / (maxima.len() - 1) as f64)
}

fn describe(config: &ScenarioConfig) -> String {
    format!(
        "L = {}, n_max = {}, U/J0 = {}, drive = {} (Omega/U = {}), {}",
        config.sites,
        config.n_max,
        config.u_over_j0,
        config.drive,
        config.drive.ratio(),
        if config.open_system { "open" } else { "closed" }
    )
}

fn diagnostics_lines(out: &mut String, d: &Diagnostics) {
    let _ = writeln!(
        out,
        "steps: {}, samples: {}, integrated states: {} of {}, wall time: {:.2} s",
        d.steps, d.samples, d.integrated_dim, d.full_dim, d.seconds
    );
    if d.open {
        let _ = writeln!(out, "max trace drift: {:.3e}", d.max_drift);
    } else {
        let _ = writeln!(out, "max norm drift: {:.3e}", d.max_drift);
    }
    if let Some(h) = d.max_hermiticity_defect {
        let _ = writeln!(out, "max hermiticity defect: {h:.3e}");
    }
    if let Some(m) = d.min_eigenvalue {
        let _ = writeln!(out, "min eigenvalue: {m:.3e}");
    }
}

pub struct Report {
    pub csv: String,
    pub summary: String,
}

pub fn simulate(config: &ScenarioConfig) -> Result<Report, CliError> {
    let output = run(config, config.open_system)?;
    let times = output.times();
    let mut s = String::new();
    let _ = writeln!(s, "scenario: {}", describe(config));
    if let Some(w) = config.lattice_params()?.strong_interaction_warning() {
        let _ = writeln!(s, "warning: {w}");
    }
    diagnostics_lines(&mut s, &output.diagnostics);
    let last = |name: &str| output.series(name).and_then(|v| v.last().copied());
    if let Some(entropy) = last("S") {
        let _ = writeln!(s, "final S: {entropy:.6e}");
    }
    if let Some(trace) = last("trace") {
        let _ = writeln!(s, "final trace defect: {:.3e}", (trace - 1.0).abs());
    }
    if let Some(p) = output.series("parity_exp") {
        let worst = p.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
        let _ = writeln!(s, "max parity defect |<P> - 1|: {worst:.3e}");
    }
    let show_p3 = !matches!(config.drive, Drive::Integer);
    let show_p1 = !matches!(config.drive, Drive::Fractional);
    if show_p3 {
        if let Some((t, v)) = output.series("P3").and_then(|p3| peak(&times, &p3)) {
            let _ = writeln!(s, "peak P3: {v:.6} at t/T = {t}");
        }
    }
    if show_p1 {
        if let Some(p1) = output.series("P1") {
            match oscillation_period(&times, &p1) {
                Some(period) => {
                    let _ = writeln!(s, "P1 oscillation period: {period:.4} T");
                }
                None => {
                    let _ = writeln!(s, "P1 oscillation period: fewer than two maxima in the window");
                }
            }
        }
    }
    Ok(Report {
        csv: output.table().to_csv(),
        summary: s,
    })
}

/// Concurrent-run cap from `FRACRES_THREADS`; defaults to the number of
/// available cores.
pub fn thread_limit() -> Result<usize, CliError> {
    match std::env::var("FRACRES_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(CliError::Usage(format!(
                "FRACRES_THREADS must be a positive integer, got `{v}`"
            ))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub struct Comparison {
    pub closed: RunOutput,
    pub open: RunOutput,
}

impl Comparison {
    /// Named-state population columns present in both runs.
    pub fn population_names(&self) -> Vec<String> {
        self.closed
            .recorder
            .names()
            .iter()
            .filter(|n| n.starts_with('P'))
            .cloned()
            .collect()
    }

    /// `max_t |P_i(t) - P_i^D(t)|`.
    pub fn max_deviation(&self, name: &str) -> Option<f64> {
        let a = self.closed.series(name)?;
        let b = self.open.series(name)?;
        Some(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
    }

    pub fn table(&self) -> Table {
        let names = self.population_names();
        let mut columns = vec!["t_over_T".to_string()];
        for n in &names {
            columns.push(n.clone());
            columns.push(format!("{n}_D"));
        }
        columns.push("S_D".into());
        let closed: Vec<Vec<f64>> = names.iter().map(|n| self.closed.series(n).unwrap()).collect();
        let open: Vec<Vec<f64>> = names.iter().map(|n| self.open.series(n).unwrap()).collect();
        let entropy = self.open.series("S").unwrap();
        let mut t = Table::new(columns);
        for (k, time) in self.closed.times().into_iter().enumerate() {
            let mut row = vec![time];
            for (c, o) in closed.iter().zip(&open) {
                row.push(c[k]);
                row.push(o[k]);
            }
            row.push(entropy[k]);
            t.push(row);
        }
        t
    }
}

pub fn run_comparison(config: &ScenarioConfig, threads: usize) -> Result<Comparison, CliError> {
    let (closed, open) = if threads >= 2 {
        std::thread::scope(|scope| {
            let closed = scope.spawn(|| run(config, false));
            let open = run(config, true);
            (closed.join().expect("closed run panicked"), open)
        })
    } else {
        (run(config, false), run(config, true))
    };
    Ok(Comparison {
        closed: closed?,
        open: open?,
    })
}

pub fn compare(config: &ScenarioConfig, threads: usize) -> Result<Report, CliError> {
    let cmp = run_comparison(config, threads)?;
    let times = cmp.closed.times();
    let mut s = String::new();
    let _ = writeln!(s, "scenario: {}, closed vs open", describe(config));
    let _ = writeln!(s, "closed run:");
    diagnostics_lines(&mut s, &cmp.closed.diagnostics);
    let _ = writeln!(s, "open run:");
    diagnostics_lines(&mut s, &cmp.open.diagnostics);
    let mut overall: f64 = 0.0;
    for name in cmp.population_names() {
        let d = cmp.max_deviation(&name).unwrap();
        overall = overall.max(d);
        let _ = writeln!(s, "max |{name} - {name}_D|: {d:.6e}");
    }
    let _ = writeln!(s, "max deviation over all populations: {overall:.6e}");
    if let (Some(a), Some(b)) = (cmp.closed.series("P3"), cmp.open.series("P3")) {
        if let (Some((ta, va)), Some((tb, vb))) = (peak(&times, &a), peak(&times, &b)) {
            let _ = writeln!(s, "peak P3: {va:.6} at t/T = {ta}; peak P3_D: {vb:.6} at t/T = {tb}");
        }
    }
    if let Some(entropy) = cmp.open.series("S").and_then(|v| v.last().copied()) {
        let _ = writeln!(s, "final S (open): {entropy:.6e}");
    }
    Ok(Report {
        csv: cmp.table().to_csv(),
        summary: s,
    })
}

#[derive(Serialize)]
struct ResonanceLine {
    omega_over_u: String,
    omega_over_u_value: f64,
    omega_rad_per_s: f64,
    kind: &'static str,
    order: u32,
    multiplicity: usize,
    coincident: bool,
}

#[derive(Serialize)]
struct FreeTransition {
    from_site: usize,
    to_site: usize,
}

#[derive(Serialize)]
struct ResonanceJson {
    initial: String,
    m_max: u32,
    interaction_rad_per_s: f64,
    drive_over_u: f64,
    drive_class: String,
    resonances: Vec<ResonanceLine>,
    free_transitions: Vec<FreeTransition>,
}

fn kind_name(kind: ResonanceKind) -> &'static str {
    match kind {
        ResonanceKind::Integer => "integer",
        ResonanceKind::Fractional => "fractional",
        ResonanceKind::OffResonant => "off-resonant",
    }
}

pub fn resonances(config: &ScenarioConfig, json: bool) -> Result<String, CliError> {
    let params = config.lattice_params()?;
    let initial = config.initial_config();
    let report = resonance_frequencies(&initial, config.m_max, &params)?;
    let class = classify_drive(&initial, params.drive_frequency, config.m_max, &params, 1e-9)?;
    let drive_class = match class.kind {
        ResonanceKind::OffResonant => "off-resonant".to_string(),
        k => format!("{} m={}", kind_name(k), class.order),
    };
    let doc = ResonanceJson {
        initial: initial.to_string(),
        m_max: config.m_max,
        interaction_rad_per_s: params.interaction,
        drive_over_u: config.drive.ratio(),
        drive_class,
        resonances: report
            .resonances
            .iter()
            .map(|r| ResonanceLine {
                omega_over_u: r.ratio.to_string(),
                omega_over_u_value: r.ratio.to_f64(),
                omega_rad_per_s: r.frequency,
                kind: kind_name(r.class.kind),
                order: r.class.order,
                multiplicity: r.multiplicity,
                coincident: r.coincident,
            })
            .collect(),
        free_transitions: report
            .free_transitions
            .iter()
            .map(|e| FreeTransition {
                from_site: e.from_site(),
                to_site: e.to_site(),
            })
            .collect(),
    };
    if json {
        let mut text = serde_json::to_string_pretty(&doc).expect("plain data serializes");
        text.push('\n');
        return Ok(text);
    }
    let mut s = String::new();
    let _ = writeln!(s, "initial {}, m_max = {}", doc.initial, doc.m_max);
    let _ = writeln!(
        s,
        "configured drive Omega/U = {}: {}",
        doc.drive_over_u, doc.drive_class
    );
    if doc.resonances.is_empty() {
        let _ = writeln!(s, "no resonances");
    }
    for r in &doc.resonances {
        let _ = writeln!(
            s,
            "Omega/U = {:<6} {:<10} m={} multiplicity {}{}",
            r.omega_over_u,
            r.kind,
            r.order,
            r.multiplicity,
            if r.coincident {
                "  (coincides with the other kind)"
            } else {
                ""
            }
        );
    }
    for f in &doc.free_transitions {
        let _ = writeln!(
            s,
            "free transition: site {} -> site {} (zero energy cost)",
            f.from_site, f.to_site
        );
    }
    Ok(s)
}

/// Number of configurations of `n` particles on `sites` sites with at most
/// `n_max` per site, for every `n`.
fn bounded_counts(sites: usize, n_max: u8) -> Vec<u128> {
    let mut counts = vec![1u128];
    for _ in 0..sites {
        let mut next = vec![0u128; counts.len() + usize::from(n_max)];
        for (n, &c) in counts.iter().enumerate() {
            for k in 0..=usize::from(n_max) {
                next[n + k] = next[n + k].saturating_add(c);
            }
        }
        counts = next;
    }
    counts
}

pub fn dims(sites: usize, n_max: u8) -> Result<String, CliError> {
    if sites == 0 {
        return Err(CliError::Usage("L must be >= 1".into()));
    }
    let full = u32::try_from(sites)
        .ok()
        .and_then(|l| (u128::from(n_max) + 1).checked_pow(l))
        .ok_or_else(|| CliError::Usage("(n_max + 1)^L overflows".into()))?;
    let mut s = String::new();
    let _ = writeln!(s, "L = {sites}, n_max = {n_max}");
    let _ = writeln!(s, "full dimension (n_max+1)^L = {full}");
    let _ = writeln!(
        s,
        "{:>4} {:>22} {:>22}",
        "N", "D_{N,L} (no cutoff)", "with n_j <= n_max"
    );
    for (n, count) in bounded_counts(sites, n_max).iter().enumerate() {
        let unbounded = dimension_count(n as u64, sites as u64)
            .map(|d| d.to_string())
            .unwrap_or_else(|_| "overflow".into());
        let _ = writeln!(s, "{n:>4} {unbounded:>22} {count:>22}");
    }
    Ok(s)
}

pub fn plot_csv(csv: &str, columns: &[String]) -> Result<String, CliError> {
    plot::render(&Table::parse_csv(csv)?, columns)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounded_counts_sum_to_full_dimension() {
        let c = bounded_counts(3, 3);
        assert_eq!(c.iter().sum::<u128>(), 64);
        assert_eq!(c[3], 10);
        assert_eq!(bounded_counts(4, 4).iter().sum::<u128>(), 625);
        assert_eq!(bounded_counts(1, 0), vec![1]);
    }

    #[test]
    fn series_helpers() {
        let t: Vec<f64> = (0..100).map(|k| k as f64 * 0.1).collect();
        let v: Vec<f64> = t
            .iter()
            .map(|x| (x * std::f64::consts::PI / 2.0).sin().powi(2))
            .collect();
        let period = oscillation_period(&t, &v).unwrap();
        assert!((period - 2.0).abs() < 0.11, "{period}");
        assert_eq!(first_crossing(&t, &v, 0.5), Some(t[6]));
        let (tp, vp) = peak(&t, &v).unwrap();
        assert!((tp - 1.0).abs() < 1e-12 && (vp - 1.0).abs() < 1e-12);
    }
}
