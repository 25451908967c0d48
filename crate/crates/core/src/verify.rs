//! Acceptance checks with their tolerances and run-time limits.
//!
//! Each check runs at its full ensemble size and reports one line. A check
//! passes only if its statistical condition holds and it finishes inside its
//! time limit.

use std::f64::consts::{E, LN_2};
use std::fmt::Write as _;
use std::time::Instant;

use crate::bounds::{
    anderson_bound, brillouin_min_dissipation, ice_cube_erasure_energy, IceCubeModel,
};
use crate::capacitor::{
    bath_heat, erase, erase_dissipation_theory, partial_erase_error_prob, run_erasure_experiment,
    run_write_ensemble, write_bit, write_dissipation_theory, ErasureConfig, WriteOptions,
};
use crate::config::ExperimentConfig;
use crate::doublewell::{
    measure_escape_time, relax_ensemble, DoubleWellParams, EscapeConfig, RelaxConfig,
};
use crate::ensemble::{run_parallel_ensemble, EnsembleSpec};
use crate::error::Result;
use crate::experiments::Experiment;
use crate::info::{bit_information, memory_entropy};
use crate::sde::{simulate_ou_path, CellParams, UnitSystem, BOLTZMANN};
use crate::stats::Accumulator;

pub const N_CELL: usize = 100_000;
pub const N_WELL: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub limit_seconds: Option<f64>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let limit = self
            .limit_seconds
            .map_or(String::new(), |l| format!(" / {l:.0} s"));
        format!(
            "[{}] {:>2}. {:<28} {:>7.2} s{}  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.seconds,
            limit,
            self.detail
        )
    }
}

pub const CRITERIA: [(u8, &str, Option<f64>); 10] = [
    (1, "equipartition", Some(10.0)),
    (2, "negative erasure dissipation", Some(60.0)),
    (3, "write positivity", Some(60.0)),
    (4, "incomplete erasure info", Some(60.0)),
    (5, "passive double-well erasure", Some(180.0)),
    (6, "Kramers scaling", Some(120.0)),
    (7, "ice-cube violation", None),
    (8, "exact formulas", Some(1.0)),
    (9, "determinism", None),
    (10, "ledger identity", None),
];

/// Run criterion `id` (1-10).
pub fn run_criterion(id: u8, seed: u64, workers: usize) -> CriterionResult {
    let (_, title, limit) = CRITERIA[usize::from(id) - 1];
    let start = Instant::now();
    let outcome = match id {
        1 => equipartition(seed, workers),
        2 => negative_dissipation(seed, workers),
        3 => write_positivity(seed, workers),
        4 => incomplete_erasure(seed, workers),
        5 => passive_double_well(seed, workers),
        6 => kramers_scaling(seed, workers),
        7 => ice_cube(),
        8 => exact_formulas(),
        9 => determinism(seed),
        10 => ledger_identity(seed, workers),
        _ => panic!("no criterion {id}"),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (mut passed, mut detail) = match outcome {
        Ok(pair) => pair,
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(l) = limit {
        if seconds >= l {
            passed = false;
            detail.push_str(&format!(" (over the {l:.0} s limit)"));
        }
    }
    CriterionResult {
        id,
        title,
        passed,
        detail,
        seconds,
        limit_seconds: limit,
    }
}

pub fn run_all(seed: u64, workers: usize) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .map(|&(id, _, _)| run_criterion(id, seed, workers))
        .collect()
}

pub fn render_table(results: &[CriterionResult]) -> String {
    let mut out = String::new();
    for r in results {
        let _ = writeln!(out, "{}", r.line());
    }
    let passed = results.iter().filter(|r| r.passed).count();
    let _ = writeln!(out, "{passed}/{} criteria passed", results.len());
    out
}

type Outcome = Result<(bool, String)>;

fn within_se(mean: f64, se: f64, target: f64) -> bool {
    (mean - target).abs() <= 3.0 * se
}

/// Stationary variance of a mV-scale SI cell after 20 tau from rest.
fn equipartition(seed: u64, workers: usize) -> Outcome {
    let cell = CellParams::si(300.0, 1.0e6, 1.0e-15)?;
    let tau = cell.tau();
    let finals = run_parallel_ensemble(EnsembleSpec::new(N_CELL, seed, workers), |_, rng| {
        Ok(simulate_ou_path(0.0, 20.0 * tau, 0.01 * tau, &cell, rng)?.last_value())
    })?;
    let mut acc = Accumulator::default();
    finals.iter().for_each(|&v| acc.push(v));
    let target = cell.kt() / cell.capacitance();
    let rel = acc.variance() / target - 1.0;
    Ok((
        rel.abs() < 0.015,
        format!(
            "var/(kT/C) - 1 = {rel:+.4} (sigma = {:.4} mV), need |.| < 0.015",
            cell.sigma_st() * 1e3
        ),
    ))
}

fn reduced_erasure(
    u0_sigma: f64,
    durations: Vec<f64>,
    seed: u64,
    workers: usize,
) -> Result<ErasureConfig> {
    let cell = CellParams::reduced(1.0)?;
    let mut cfg = ErasureConfig::new(cell, u0_sigma * cell.sigma_st());
    cfg.durations = durations;
    cfg.n_trajectories = N_CELL;
    cfg.master_seed = seed;
    cfg.workers = workers;
    Ok(cfg)
}

fn negative_dissipation(seed: u64, workers: usize) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (u, expected) in [(0.5, -0.375), (1.0, 0.0), (2.0, 1.5)] {
        let cfg = reduced_erasure(u, vec![20.0], seed, workers)?;
        let theory = erase_dissipation_theory(cfg.u0, &cfg.cell)?;
        debug_assert_eq!(theory, expected);
        let rep = run_erasure_experiment(&cfg)?.remove(0);
        let good = within_se(rep.mean_q_env.mean, rep.mean_q_env.std_error, expected);
        ok &= good;
        parts.push(format!(
            "u0={u}s: {:+.4}+-{:.4} vs {expected:+}",
            rep.mean_q_env.mean, rep.mean_q_env.std_error
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn write_positivity(seed: u64, workers: usize) -> Outcome {
    let cfg = reduced_erasure(0.5, vec![], seed, workers)?;
    let (rep, records) = run_write_ensemble(&cfg)?;
    let theory = write_dissipation_theory(cfg.u0, &cfg.cell)?;
    let kt = cfg.cell.kt();
    let heat_ok = within_se(rep.mean_q_env.mean, rep.mean_q_env.std_error, theory);
    let cost_ok = records
        .iter()
        .all(|r| r.control_cost_lower_bound >= kt * LN_2 && r.control_cost_lower_bound > 0.0);
    Ok((
        heat_ok && cost_ok,
        format!(
            "Q_write = {:+.4}+-{:.4} vs {theory:+}; min control cost {:.4} kT (>= ln2)",
            rep.mean_q_env.mean,
            rep.mean_q_env.std_error,
            rep.min_control_cost / kt
        ),
    ))
}

fn incomplete_erasure(seed: u64, workers: usize) -> Outcome {
    let cfg = reduced_erasure(1.0, vec![1.0, 20.0], seed, workers)?;
    let reps = run_erasure_experiment(&cfg)?;
    let analytic = partial_erase_error_prob(cfg.u0, 1.0, &cfg.cell)?;
    let at_tau = &reps[0];
    let bracket = at_tau.channel.ci_low <= analytic && analytic <= at_tau.channel.ci_high;
    let info_ok = (at_tau.remaining_information.bits - 0.0694).abs() < 0.01;
    let complete = reps[1].remaining_information.bits;
    Ok((
        bracket && info_ok && complete < 1e-3,
        format!(
            "p_e = {:.4} [{:.4}, {:.4}] vs {analytic:.4}; I(tau) = {:.4} bits; I(20tau) = {complete:.2e} bits",
            at_tau.channel.p_e_hat, at_tau.channel.ci_low, at_tau.channel.ci_high, at_tau.remaining_information.bits
        ),
    ))
}

fn passive_double_well(seed: u64, workers: usize) -> Outcome {
    let params = DoubleWellParams::reduced(2.0)?;
    let mut esc = EscapeConfig::new(params, 2_000);
    esc.master_seed = seed;
    esc.workers = workers;
    let escape = measure_escape_time(&esc)?;
    let mut cfg = RelaxConfig::new(params, 1, 20.0 * escape.mean, N_WELL);
    cfg.master_seed = seed;
    cfg.workers = workers;
    let series = relax_ensemble(&cfg)?;
    let p1 = series.terminal_p1();
    let u0 = series.mean_u[0].mean;
    let drift = series
        .mean_u
        .iter()
        .map(|m| (m.mean - u0).abs())
        .fold(0.0, f64::max)
        / params.kt();
    Ok((
        (p1 - 0.5).abs() <= 0.02 && drift < 0.05,
        format!(
            "t_end = {:.1} (20 x escape {:.3}); p1 = {p1:.4}; max |dU| = {drift:.4} kT over {} times",
            cfg.t_total,
            escape.mean,
            series.times.len()
        ),
    ))
}

fn kramers_scaling(seed: u64, workers: usize) -> Outcome {
    let time_at = |barrier: f64| -> Result<f64> {
        let p =
            DoubleWellParams::with_well_curvature(barrier, 16.0, 1.0, 1.0, UnitSystem::Reduced)?;
        let mut cfg = EscapeConfig::new(p, N_WELL);
        cfg.master_seed = seed;
        cfg.workers = workers;
        Ok(measure_escape_time(&cfg)?.mean)
    };
    let (t2, t3) = (time_at(2.0)?, time_at(3.0)?);
    let ratio = t3 / t2;
    Ok((
        (ratio / E - 1.0).abs() < 0.3,
        format!("T(3kT)/T(2kT) = {t3:.3}/{t2:.3} = {ratio:.3} vs e, need within 30%"),
    ))
}

fn ice_cube() -> Outcome {
    let cmp = ice_cube_erasure_energy(&IceCubeModel::new(10.0, 300.0))?;
    let oracle = 0.917 * 10.0 * 333.55 / (BOLTZMANN * 300.0);
    let q = cmp.computed_cooling.kt_multiple;
    let order_ok = (q.log10() - 24.0).abs() < 0.5;
    Ok((
        (q / oracle - 1.0).abs() < 0.05 && order_ok && cmp.violation_factor > 1e23,
        format!(
            "Q = {q:.3e} kT (oracle {oracle:.3e}); violation factor {:.3e}",
            cmp.violation_factor
        ),
    ))
}

fn exact_formulas() -> Outcome {
    let rel = |got: f64, want: f64| {
        if want == 0.0 {
            got.abs() <= 1e-12
        } else {
            ((got - want) / want).abs() <= 1e-12
        }
    };
    let t = 300.0;
    let checks = [
        (
            "Brillouin(0.5)",
            rel(brillouin_min_dissipation(0.5, t)?.kt_multiple, LN_2),
        ),
        ("I(0)", rel(bit_information(0.0)?, 1.0)),
        ("I(0.5)", rel(bit_information(0.5)?, 0.0)),
        ("S(0)", rel(memory_entropy(0.0)?, 0.0)),
        ("S(1)", rel(memory_entropy(1.0)?, 0.0)),
        (
            "Anderson(1 bit)",
            rel(anderson_bound(1.0, t)?.kt_multiple, -LN_2),
        ),
    ];
    let failed: Vec<&str> = checks
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(n, _)| *n)
        .collect();
    Ok((
        failed.is_empty(),
        if failed.is_empty() {
            format!("{} values exact to 1e-12", checks.len())
        } else {
            format!("mismatch: {}", failed.join(", "))
        },
    ))
}

/// Small-ensemble config that exercises every subcommand quickly.
pub fn determinism_config(seed: u64, workers: usize) -> ExperimentConfig {
    ExperimentConfig {
        master_seed: seed,
        worker_count: workers,
        n_trajectories: Some(600),
        u0_sigma: vec![0.5, 1.5],
        durations_tau: vec![0.0, 0.5, 2.0, 20.0],
        t_total: 5.0,
        escape_barriers_kt: vec![1.0, 2.0],
        ..ExperimentConfig::default()
    }
}

fn determinism(seed: u64) -> Outcome {
    let mut mismatched = Vec::new();
    for exp in Experiment::ALL {
        let mut outputs = Vec::new();
        for workers in [1, 4, 8] {
            let table = exp.run(&determinism_config(seed, workers))?;
            if table.header() != exp.header() {
                mismatched.push(format!("{} header", exp.name()));
            }
            outputs.push(table.to_csv()?);
        }
        let first_line = outputs[0].lines().next().unwrap_or("");
        if first_line != exp.header().join(",") {
            mismatched.push(format!("{} schema", exp.name()));
        }
        if outputs.iter().any(|o| o != &outputs[0]) {
            mismatched.push(exp.name().to_string());
        }
    }
    Ok((
        mismatched.is_empty(),
        if mismatched.is_empty() {
            format!(
                "{} subcommands byte-identical at 1/4/8 workers",
                Experiment::ALL.len()
            )
        } else {
            format!("differs: {}", mismatched.join(", "))
        },
    ))
}

/// Random writes and erasures; bath heat plus stored-energy change must be
/// exactly zero on every one.
fn ledger_identity(seed: u64, workers: usize) -> Outcome {
    let cell = CellParams::reduced(1.0)?;
    let opts = WriteOptions::new(0.01, 1000.0);
    let residuals = run_parallel_ensemble(
        EnsembleSpec::new(N_CELL, seed ^ 0x5eed, workers),
        |i, rng| {
            let (start, end, heat) = if i % 2 == 0 {
                let u0 = 0.1 + 2.9 * rng.uniform();
                let bit = rng.bit();
                let w = write_bit(bit, u0, &cell, &opts, rng)?;
                (w.v_start, w.v_final, w.bath_heat)
            } else {
                let v0 = 3.0 * (2.0 * rng.uniform() - 1.0);
                let r = erase(v0, 5.0 * rng.uniform(), &cell, 0.01, rng)?;
                (r.v_start, r.v_final, r.bath_heat)
            };
            debug_assert_eq!(heat, bath_heat(&cell, start, end));
            Ok(heat + (cell.energy(end) - cell.energy(start)))
        },
    )?;
    let nonzero = residuals.iter().filter(|r| **r != 0.0).count();
    Ok((
        nonzero == 0,
        format!(
            "{nonzero} of {} trajectories with nonzero Q_env + dE_cap",
            residuals.len()
        ),
    ))
}
