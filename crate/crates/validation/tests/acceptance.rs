// SPDX-License-Identifier: Apache-2.0

//! Acceptance checks. Each criterion prints one PASS or FAIL line; the
//! process exits nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::OnceLock;

use fracres_cli::commands::{dims, first_crossing, run_comparison, Comparison};
use fracres_cli::ScenarioConfig;
use fracres_core::basis::{enumerate_basis, BasisMap, FockConfig, NamedState, Sector, StateVector};
use fracres_core::density::DensityMatrix;
use fracres_core::evolution::{evolve_open, oracle_trajectory, Schedule};
use fracres_core::observables::{config_populations, linear_entropy, population_outside};
use fracres_core::operators::{
    commutator_with_threshold, symmetry_operators, DrivenHamiltonian, LatticeParams, NoiseParams,
};
use fracres_core::resonance::{resonance_frequencies, ResonanceKind};
use num_complex::Complex64;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn scenario(name: &str) -> ScenarioConfig {
    let path = format!("{}/../cli/scenarios/{name}.scn", env!("CARGO_MANIFEST_DIR"));
    ScenarioConfig::from_path(path.as_ref()).unwrap()
}

fn integer_runs() -> &'static Comparison {
    static RUNS: OnceLock<Comparison> = OnceLock::new();
    RUNS.get_or_init(|| run_comparison(&scenario("fig2_integer"), 1).unwrap())
}

fn fractional_runs() -> &'static Comparison {
    static RUNS: OnceLock<Comparison> = OnceLock::new();
    RUNS.get_or_init(|| run_comparison(&scenario("fig2_fractional"), 1).unwrap())
}

/// Per-sample structure and leakage diagnostics of an open run.
#[derive(Default)]
struct OpenTrace {
    samples: usize,
    max_trace_defect: f64,
    max_hermiticity_defect: f64,
    min_eigenvalue: f64,
    max_leakage: f64,
    leakage_at: f64,
    /// Largest population of any single configuration outside the kept set.
    max_single_outside: f64,
    max_entropy: f64,
    final_entropy: f64,
}

fn open_trace(config: &ScenarioConfig, keep: &[FockConfig]) -> OpenTrace {
    let basis = enumerate_basis(config.sites, config.n_max, Sector::Full).unwrap();
    let psi0 = StateVector::basis_state(&basis, &config.initial_config()).unwrap();
    let mut tr = OpenTrace {
        min_eigenvalue: f64::INFINITY,
        ..OpenTrace::default()
    };
    evolve_open(
        &basis,
        &DensityMatrix::from_pure(&psi0),
        &config.lattice_params().unwrap(),
        &config.noise_params().unwrap(),
        &config.schedule().unwrap(),
        &mut |t: f64, rho: &DensityMatrix| {
            tr.samples += 1;
            tr.max_trace_defect = tr.max_trace_defect.max((rho.trace() - 1.0).abs());
            tr.max_hermiticity_defect = tr.max_hermiticity_defect.max(rho.hermiticity_defect());
            tr.min_eigenvalue = tr.min_eigenvalue.min(rho.min_eigenvalue());
            if !keep.is_empty() {
                let out = population_outside(rho, &basis, keep)?;
                if out > tr.max_leakage {
                    tr.max_leakage = out;
                    tr.leakage_at = t;
                }
                for (p, c) in config_populations(rho).iter().zip(basis.configs()) {
                    if !keep.contains(c) {
                        tr.max_single_outside = tr.max_single_outside.max(*p);
                    }
                }
            }
            tr.final_entropy = linear_entropy(rho);
            tr.max_entropy = tr.max_entropy.max(tr.final_entropy.abs());
            Ok(())
        },
    )
    .unwrap();
    tr
}

fn fractional_open() -> &'static OpenTrace {
    static TRACE: OnceLock<OpenTrace> = OnceLock::new();
    TRACE.get_or_init(|| {
        let mut keep = NamedState::Psi0.constituents(3).unwrap();
        keep.extend(NamedState::Psi3.constituents(3).unwrap());
        open_trace(&scenario("fig2_fractional"), &keep)
    })
}

fn series(runs: &Comparison, open: bool, name: &str) -> Vec<f64> {
    let run = if open { &runs.open } else { &runs.closed };
    run.series(name).unwrap_or_else(|| panic!("missing column {name}"))
}

fn dimension_counts() -> Verdict {
    let a = dims(3, 3).unwrap();
    let b = dims(4, 4).unwrap();
    let reported = |text: &str| {
        text.lines()
            .find_map(|l| l.strip_prefix("full dimension (n_max+1)^L = "))
            .map(str::to_string)
            .unwrap_or_default()
    };
    let (ra, rb) = (reported(&a), reported(&b));
    let basis_a = enumerate_basis(3, 3, Sector::Full).unwrap().len();
    let basis_b = enumerate_basis(4, 4, Sector::Full).unwrap().len();
    verdict(
        ra == "64" && rb == "625" && basis_a == 64 && basis_b == 625,
        format!("dims reports {ra} (L=3) and {rb} (L=4); enumerated {basis_a} and {basis_b}"),
    )
}

fn symmetry_suite() -> Verdict {
    let mut worst = 0usize;
    for (sites, n_max) in [(3usize, 3u8), (4, 4)] {
        let basis = enumerate_basis(sites, n_max, Sector::Full).unwrap();
        let params = LatticeParams::new(sites, n_max, 40.0, 1.0, 20.0).unwrap();
        let h = DrivenHamiltonian::new(&params, &basis).unwrap();
        let (number, parity) = symmetry_operators(&basis).unwrap();
        for k in 0..16 {
            let ht = h.at(k as f64 * params.period() / 16.0);
            worst = worst
                .max(commutator_with_threshold(&ht, &number, 0.0).unwrap().nnz())
                .max(commutator_with_threshold(&ht, &parity, 0.0).unwrap().nnz());
        }
    }
    verdict(
        worst == 0,
        format!("largest nonzero count of [H(t),N] and [H(t),P] over 16 times, L=3 and L=4: {worst}"),
    )
}

fn max_deviation(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}

fn oracle_equivalence() -> Verdict {
    let schedule = Schedule::new(2.0, 1.0 / 1024.0, 32).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let l1 = enumerate_basis(1, 1, Sector::Full).unwrap();
    let l1_params = LatticeParams::new(1, 1, 40.0, 0.0, 40.0).unwrap();
    let excited = DensityMatrix::from_pure(&StateVector::basis_state(&l1, &FockConfig::new([1])).unwrap());
    let plus = DensityMatrix::from_pure(
        &StateVector::from_configs(
            &l1,
            &[
                (FockConfig::new([0]), Complex64::new(h, 0.0)),
                (FockConfig::new([1]), Complex64::new(h, 0.0)),
            ],
        )
        .unwrap(),
    );
    let l2 = enumerate_basis(2, 2, Sector::Full).unwrap();
    let l2_params = LatticeParams::new(2, 2, 40.0, 1.0, 20.0).unwrap();
    let l2_rho = DensityMatrix::from_pure(&StateVector::basis_state(&l2, &FockConfig::new([1, 1])).unwrap());
    let cases: [(&BasisMap, &LatticeParams, NoiseParams, &DensityMatrix); 3] = [
        (
            &l1,
            &l1_params,
            NoiseParams::new(vec![7.0], vec![0.0], 1).unwrap(),
            &excited,
        ),
        (
            &l1,
            &l1_params,
            NoiseParams::new(vec![0.0], vec![5.0], 1).unwrap(),
            &plus,
        ),
        (
            &l2,
            &l2_params,
            NoiseParams::new(vec![0.4, 0.9], vec![0.3, 1.1], 2).unwrap(),
            &l2_rho,
        ),
    ];
    let devs: Vec<f64> = cases
        .iter()
        .map(|(b, p, n, rho)| {
            let (mut rk4, mut oracle) = (Vec::new(), Vec::new());
            evolve_open(b, rho, p, n, &schedule, &mut |_: f64, st: &DensityMatrix| {
                rk4.push(config_populations(st));
                Ok(())
            })
            .unwrap();
            oracle_trajectory(b, rho, p, n, &schedule, &mut |_: f64, st: &DensityMatrix| {
                oracle.push(config_populations(st));
                Ok(())
            })
            .unwrap();
            assert_eq!(rk4.len(), oracle.len());
            max_deviation(&rk4, &oracle)
        })
        .collect();

    let kappa = 40.0;
    let noise = NoiseParams::new(vec![kappa], vec![0.0], 1).unwrap();
    let exact = (-kappa * l1_params.period()).exp();
    let err = |dt: f64| {
        let s = Schedule::new(1.0, dt, 1_000_000).unwrap();
        let out = evolve_open(
            &l1,
            &excited,
            &l1_params,
            &noise,
            &s,
            &mut |_: f64, _: &DensityMatrix| Ok(()),
        )
        .unwrap();
        (out.final_state.elements()[(1, 1)].re - exact).abs()
    };
    let errs = [err(1.0 / 32.0), err(1.0 / 64.0), err(1.0 / 128.0)];
    let ratios = [errs[0] / errs[1], errs[1] / errs[2]];
    let pass = devs.iter().all(|&d| d < 1e-6) && ratios.iter().all(|r| (r - 16.0).abs() < 1.5);
    verdict(
        pass,
        format!(
            "max |rk4 - oracle| = {:.2e} (decay), {:.2e} (dephasing), {:.2e} (L=2 driven); error ratios per halving {:.2}, {:.2}",
            devs[0], devs[1], devs[2], ratios[0], ratios[1]
        ),
    )
}

fn confinement() -> Verdict {
    let mut sum_defect: f64 = 0.0;
    let mut pair: Vec<f64> = Vec::new();
    for runs in [integer_runs(), fractional_runs()] {
        let cols: Vec<Vec<f64>> = (0..6).map(|i| series(runs, false, &format!("P{i}"))).collect();
        for k in 0..cols[0].len() {
            let total: f64 = cols.iter().map(|c| c[k]).sum();
            sum_defect = sum_defect.max((total - 1.0).abs());
        }
        pair.push(
            cols[1]
                .iter()
                .zip(&cols[2])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        );
    }
    let pass = sum_defect < 1e-6 && pair.iter().all(|&d| d < 1e-6);
    verdict(
        pass,
        format!(
            "max |sum P0..P5 - 1| = {sum_defect:.2e} (limit 1e-6); max |P1 - P2| = {:.3e} integer, {:.3e} fractional (limit 1e-6)",
            pair[0], pair[1]
        ),
    )
}

fn cptp_structure() -> Verdict {
    let tr = fractional_open();
    let pass = tr.max_trace_defect < 1e-8 && tr.max_hermiticity_defect < 1e-10 && tr.min_eigenvalue >= -1e-8;
    verdict(
        pass,
        format!(
            "{} samples: max |tr rho - 1| = {:.2e}, max hermiticity defect = {:.2e}, min eigenvalue = {:.2e}",
            tr.samples, tr.max_trace_defect, tr.max_hermiticity_defect, tr.min_eigenvalue
        ),
    )
}

fn resonance_classifier() -> Verdict {
    let params = LatticeParams::new(3, 3, 40.0, 1.0, 20.0).unwrap();
    let report = resonance_frequencies(&FockConfig::unit_filling(3), 1, &params).unwrap();
    let found: Vec<(String, ResonanceKind, u32)> = report
        .resonances
        .iter()
        .map(|r| (r.ratio.to_string(), r.class.kind, r.class.order))
        .collect();
    let expected = vec![
        ("1".to_string(), ResonanceKind::Integer, 1),
        ("1/2".to_string(), ResonanceKind::Fractional, 1),
    ];
    verdict(found == expected, format!("Omega/U lines at m_max = 1: {found:?}"))
}

fn fractional_slowdown() -> Verdict {
    let j0_time = |name: &str, runs: &Comparison, col: &str| -> Option<f64> {
        let params = scenario(name).lattice_params().unwrap();
        let t = first_crossing(&runs.closed.times(), &series(runs, false, col), 0.5)?;
        Some(t * params.period() * params.hopping)
    };
    let integer = j0_time("fig2_integer", integer_runs(), "P1");
    let fractional = j0_time("fig2_fractional", fractional_runs(), "P3");
    match (integer, fractional) {
        (Some(a), Some(b)) => verdict(
            b >= 10.0 * a,
            format!("first P1 > 0.5 (integer) at t J0 = {a:.3}; first P3 > 0.5 (fractional) at t J0 = {b:.3}; ratio {:.2} (need >= 10)", b / a),
        ),
        _ => verdict(false, format!("threshold never crossed: integer {integer:?}, fractional {fractional:?}")),
    }
}

fn noise_robustness() -> Verdict {
    let checks = [
        (integer_runs(), ["P0", "P1"], "integer"),
        (fractional_runs(), ["P0", "P3"], "fractional"),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (runs, names, label) in checks {
        for name in names {
            let d = runs.max_deviation(name).unwrap();
            pass &= d < 0.1;
            parts.push(format!("{label} {name}: {d:.3e}"));
        }
    }
    verdict(pass, format!("max |P_i^D - P_i| ({})", parts.join(", ")))
}

fn leakage_bound() -> Verdict {
    let tr = fractional_open();
    let runs = fractional_runs();
    let kept: Vec<Vec<f64>> = ["cfg_111", "cfg_210", "cfg_012"]
        .iter()
        .map(|c| series(runs, false, c))
        .collect();
    let closed = (0..kept[0].len())
        .map(|k| 1.0 - kept.iter().map(|c| c[k]).sum::<f64>())
        .fold(0.0, f64::max);
    verdict(
        tr.max_leakage <= 1e-2,
        format!(
            "max population outside {{111, 210, 012}} = {:.3e} at t/T = {} (limit 1e-2); largest single outside configuration {:.3e}; closed run {closed:.3e}",
            tr.max_leakage, tr.leakage_at, tr.max_single_outside
        ),
    )
}

fn entropy_scale() -> Verdict {
    let closed_max = [integer_runs(), fractional_runs()]
        .iter()
        .flat_map(|r| series(r, false, "S"))
        .fold(0.0, f64::max);
    let mut noiseless = scenario("fig2_fractional");
    noiseless
        .kappa_hz
        .iter_mut()
        .chain(noiseless.gamma_hz.iter_mut())
        .for_each(|r| *r = 0.0);
    let noiseless_max = open_trace(&noiseless, &[]).max_entropy;
    let open_final = fractional_open().final_entropy;
    let l4 = open_trace(&scenario("fig4_fractional_L4"), &[]);
    let l4_ok = l4.max_trace_defect < 1e-8 && l4.max_hermiticity_defect < 1e-10 && l4.min_eigenvalue >= -1e-8;
    let pass = closed_max < 1e-10 && (1e-3..=1e-1).contains(&open_final) && l4_ok;
    verdict(
        pass,
        format!(
            "closed max S = {closed_max:.2e}, noiseless density-matrix run max S = {noiseless_max:.2e} (recorded); open L=3 final S = {open_final:.4e} (band [1e-3, 1e-1]); \
             L=4 open: trace defect {:.2e}, hermiticity defect {:.2e}, min eigenvalue {:.2e}, final S = {:.4e} (recorded)",
            l4.max_trace_defect, l4.max_hermiticity_defect, l4.min_eigenvalue, l4.final_entropy
        ),
    )
}

type Check = fn() -> Verdict;

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("dimension counts", dimension_counts),
        ("symmetry suite", symmetry_suite),
        ("oracle equivalence", oracle_equivalence),
        ("closed-system confinement", confinement),
        ("CPTP structure", cptp_structure),
        ("resonance classifier", resonance_classifier),
        ("fractional slowdown", fractional_slowdown),
        ("noise robustness", noise_robustness),
        ("leakage bound", leakage_bound),
        ("linear entropy scale", entropy_scale),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| verdict(false, "check panicked".into()));
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {}",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
