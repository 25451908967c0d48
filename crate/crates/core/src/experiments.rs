//! Subcommand experiments: each turns a resolved [`ExperimentConfig`] into a
//! fixed-schema table plus a JSON summary.

use serde_json::{json, Value};

use crate::bounds::{
    anderson_bound, brillouin_min_dissipation, ice_cube_erasure_energy, IceCubeModel, SensibleHeat,
};
use crate::capacitor::{
    run_erasure_experiment, run_write_ensemble, ControlCostModel, ErasureConfig,
};
use crate::config::{EscapeGeometry, ExperimentConfig};
use crate::doublewell::{
    heated_erase, measure_escape_time, relax_ensemble, DoubleWellParams, EscapeConfig, RelaxConfig,
    RelaxationSeries,
};
use crate::error::{Error, Result};
use crate::info::{bit_information, memory_entropy, nats_to_bits};
use crate::sde::{CellParams, UnitSystem};

pub const WRITE_HEADER: &[&str] = &[
    "u0_sigma",
    "mean_Q_env_kT",
    "se_Q_env_kT",
    "theory_Q_env_kT",
    "mean_duration_tau",
    "mean_n_samples",
    "mean_control_cost_kT",
    "min_control_cost_kT",
];
pub const ERASE_HEADER: &[&str] = &[
    "u0_sigma",
    "duration_tau",
    "mean_Q_env_kT",
    "se_Q_env_kT",
    "theory_Q_env_kT",
    "p_e_hat",
    "ci_low",
    "ci_high",
    "info_bits",
];
pub const MI_CURVE_HEADER: &[&str] = &[
    "duration_tau",
    "p_e_hat",
    "ci_low",
    "ci_high",
    "info_bits",
    "mean_Q_env_kT",
    "se_Q_env_kT",
];
pub const RELAX_HEADER: &[&str] = &["t", "p1", "se_p1", "mean_U", "se_U"];
pub const ESCAPE_HEADER: &[&str] = &[
    "barrier_kT",
    "well_position",
    "dt",
    "mean_escape_time",
    "se_escape_time",
];
pub const BRILLOUIN_HEADER: &[&str] = &["p_e", "temperature_K", "E_joule", "E_kT"];
pub const ANDERSON_HEADER: &[&str] = &["delta_S_bits", "temperature_K", "bound_joule", "bound_kT"];
pub const ICECUBE_HEADER: &[&str] = &["Q_joule", "Q_kT", "bound_kT", "violation_factor"];
pub const INFO_HEADER: &[&str] = &["p_e", "info_bits", "p0", "entropy_nats", "entropy_bits"];

pub const DEFAULT_CELL_TRAJECTORIES: usize = 100_000;
pub const DEFAULT_WELL_TRAJECTORIES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    CapacitorWrite,
    CapacitorErase,
    CapacitorMiCurve,
    DoublewellRelax,
    DoublewellEscape,
    DoublewellHeated,
    BoundsBrillouin,
    BoundsAnderson,
    BoundsIcecube,
    InfoEval,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::CapacitorWrite,
        Experiment::CapacitorErase,
        Experiment::CapacitorMiCurve,
        Experiment::DoublewellRelax,
        Experiment::DoublewellEscape,
        Experiment::DoublewellHeated,
        Experiment::BoundsBrillouin,
        Experiment::BoundsAnderson,
        Experiment::BoundsIcecube,
        Experiment::InfoEval,
    ];

    /// Output file stem and command words.
    pub fn name(self) -> &'static str {
        match self {
            Experiment::CapacitorWrite => "capacitor-write",
            Experiment::CapacitorErase => "capacitor-erase",
            Experiment::CapacitorMiCurve => "capacitor-mi-curve",
            Experiment::DoublewellRelax => "doublewell-relax",
            Experiment::DoublewellEscape => "doublewell-escape",
            Experiment::DoublewellHeated => "doublewell-heated",
            Experiment::BoundsBrillouin => "bounds-brillouin",
            Experiment::BoundsAnderson => "bounds-anderson",
            Experiment::BoundsIcecube => "bounds-icecube",
            Experiment::InfoEval => "info-eval",
        }
    }

    pub fn header(self) -> &'static [&'static str] {
        match self {
            Experiment::CapacitorWrite => WRITE_HEADER,
            Experiment::CapacitorErase => ERASE_HEADER,
            Experiment::CapacitorMiCurve => MI_CURVE_HEADER,
            Experiment::DoublewellRelax | Experiment::DoublewellHeated => RELAX_HEADER,
            Experiment::DoublewellEscape => ESCAPE_HEADER,
            Experiment::BoundsBrillouin => BRILLOUIN_HEADER,
            Experiment::BoundsAnderson => ANDERSON_HEADER,
            Experiment::BoundsIcecube => ICECUBE_HEADER,
            Experiment::InfoEval => INFO_HEADER,
        }
    }

    pub fn run(self, cfg: &ExperimentConfig) -> Result<Table> {
        match self {
            Experiment::CapacitorWrite => capacitor_write(cfg),
            Experiment::CapacitorErase => capacitor_erase(cfg),
            Experiment::CapacitorMiCurve => capacitor_mi_curve(cfg),
            Experiment::DoublewellRelax => doublewell_relax(cfg),
            Experiment::DoublewellEscape => doublewell_escape(cfg),
            Experiment::DoublewellHeated => doublewell_heated(cfg),
            Experiment::BoundsBrillouin => bounds_brillouin(cfg),
            Experiment::BoundsAnderson => bounds_anderson(cfg),
            Experiment::BoundsIcecube => bounds_icecube(cfg),
            Experiment::InfoEval => info_eval(cfg),
        }
    }

    /// Ensemble size this experiment uses when the config leaves it on auto.
    pub fn default_trajectories(self) -> Option<usize> {
        match self {
            Experiment::CapacitorWrite
            | Experiment::CapacitorErase
            | Experiment::CapacitorMiCurve => Some(DEFAULT_CELL_TRAJECTORIES),
            Experiment::DoublewellRelax
            | Experiment::DoublewellEscape
            | Experiment::DoublewellHeated => Some(DEFAULT_WELL_TRAJECTORIES),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub experiment: Experiment,
    pub rows: Vec<Vec<f64>>,
    pub summary: Value,
}

/// Shortest round-trip decimal; scientific notation outside [1e-4, 1e15).
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl Table {
    pub fn header(&self) -> &'static [&'static str] {
        self.experiment.header()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(self.header()).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&x| format_number(x)))
                .map_err(io)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("csv of ASCII numbers"))
    }
}

pub fn cell_params(cfg: &ExperimentConfig) -> Result<CellParams> {
    match cfg.unit_mode {
        UnitSystem::Reduced => CellParams::reduced(1.0),
        UnitSystem::Si => CellParams::si(cfg.temperature_k, cfg.resistance_ohm, cfg.capacitance_f),
    }
}

fn ambient_temperature(cfg: &ExperimentConfig) -> f64 {
    match cfg.unit_mode {
        UnitSystem::Reduced => 1.0,
        UnitSystem::Si => cfg.temperature_k,
    }
}

fn well_params(cfg: &ExperimentConfig, barrier_kt: f64) -> Result<DoubleWellParams> {
    let t = ambient_temperature(cfg);
    let kt = cfg.unit_mode.boltzmann() * t;
    DoubleWellParams::new(
        barrier_kt * kt,
        cfg.well_position,
        cfg.damping,
        t,
        cfg.unit_mode,
    )
}

fn erasure_config(
    cfg: &ExperimentConfig,
    u0_sigma: f64,
    durations_tau: &[f64],
) -> Result<ErasureConfig> {
    let cell = cell_params(cfg)?;
    let tau = cell.tau();
    let mut ec = ErasureConfig::new(cell, u0_sigma * cell.sigma_st());
    ec.dt = cfg.dt_tau * tau;
    ec.durations = durations_tau.iter().map(|d| d * tau).collect();
    ec.n_trajectories = cfg.trajectories_or(DEFAULT_CELL_TRAJECTORIES);
    ec.master_seed = cfg.master_seed;
    ec.workers = cfg.worker_count;
    ec.max_write_duration = cfg.max_write_tau * tau;
    ec.control = ControlCostModel::new(cfg.decision_error_prob)?;
    Ok(ec)
}

fn capacitor_write(cfg: &ExperimentConfig) -> Result<Table> {
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for &u in &cfg.u0_sigma {
        let ec = erasure_config(cfg, u, &[])?;
        let kt = ec.cell.kt();
        let tau = ec.cell.tau();
        let (rep, _) = run_write_ensemble(&ec)?;
        rows.push(vec![
            u,
            rep.mean_q_env.mean / kt,
            rep.mean_q_env.std_error / kt,
            rep.theory_q_env / kt,
            rep.mean_duration.mean / tau,
            rep.mean_n_samples.mean,
            rep.mean_control_cost.mean / kt,
            rep.min_control_cost / kt,
        ]);
        summaries.push(json!({
            "u0_sigma": u,
            "n_trajectories": rep.n_trajectories,
            "mean_Q_env_kT": rep.mean_q_env.mean / kt,
            "se_Q_env_kT": rep.mean_q_env.std_error / kt,
            "theory_Q_env_kT": rep.theory_q_env / kt,
            "min_control_cost_kT": rep.min_control_cost / kt,
        }));
    }
    Ok(Table {
        experiment: Experiment::CapacitorWrite,
        rows,
        summary: json!({ "writes": summaries }),
    })
}

fn capacitor_erase(cfg: &ExperimentConfig) -> Result<Table> {
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for &u in &cfg.u0_sigma {
        let ec = erasure_config(cfg, u, &[cfg.erase_duration_tau])?;
        let kt = ec.cell.kt();
        let rep = run_erasure_experiment(&ec)?.remove(0);
        rows.push(vec![
            u,
            cfg.erase_duration_tau,
            rep.mean_q_env.mean / kt,
            rep.mean_q_env.std_error / kt,
            rep.theory_q_env / kt,
            rep.channel.p_e_hat,
            rep.channel.ci_low,
            rep.channel.ci_high,
            rep.remaining_information.bits,
        ]);
        summaries.push(json!({
            "u0_sigma": u,
            "duration_tau": cfg.erase_duration_tau,
            "n_trajectories": rep.n_trajectories,
            "mean_Q_env_kT": rep.mean_q_env.mean / kt,
            "se_Q_env_kT": rep.mean_q_env.std_error / kt,
            "theory_Q_env_kT": rep.theory_q_env / kt,
            "p_e_hat": rep.channel.p_e_hat,
            "info_bits": rep.remaining_information.bits,
        }));
    }
    Ok(Table {
        experiment: Experiment::CapacitorErase,
        rows,
        summary: json!({ "erasures": summaries }),
    })
}

fn capacitor_mi_curve(cfg: &ExperimentConfig) -> Result<Table> {
    let u = *cfg
        .u0_sigma
        .first()
        .ok_or_else(|| Error::Config("u0_sigma is empty".into()))?;
    let ec = erasure_config(cfg, u, &cfg.durations_tau)?;
    let kt = ec.cell.kt();
    let tau = ec.cell.tau();
    let reports = if cfg.durations_tau.is_empty() {
        Vec::new()
    } else {
        run_erasure_experiment(&ec)?
    };
    let rows: Vec<Vec<f64>> = reports
        .iter()
        .map(|r| {
            vec![
                r.duration / tau,
                r.channel.p_e_hat,
                r.channel.ci_low,
                r.channel.ci_high,
                r.remaining_information.bits,
                r.mean_q_env.mean / kt,
                r.mean_q_env.std_error / kt,
            ]
        })
        .collect();
    let bracketed = reports
        .iter()
        .filter(|r| r.channel.ci_low <= r.p_e_theory && r.p_e_theory <= r.channel.ci_high)
        .count();
    Ok(Table {
        experiment: Experiment::CapacitorMiCurve,
        rows,
        summary: json!({
            "u0_sigma": u,
            "n_trajectories": ec.n_trajectories,
            "grid_points": reports.len(),
            "analytic_p_e_inside_ci": bracketed,
            "final_info_bits": reports.last().map(|r| r.remaining_information.bits),
        }),
    })
}

fn relax_config(cfg: &ExperimentConfig, params: DoubleWellParams) -> RelaxConfig {
    let mut rc = RelaxConfig::new(
        params,
        cfg.side,
        cfg.t_total,
        cfg.trajectories_or(DEFAULT_WELL_TRAJECTORIES),
    );
    rc.dt = cfg.dt_fraction * params.stability_bound();
    rc.master_seed = cfg.master_seed;
    rc.workers = cfg.worker_count;
    rc
}

fn series_rows(series: &RelaxationSeries, kt: f64) -> Vec<Vec<f64>> {
    (0..series.times.len())
        .map(|j| {
            vec![
                series.times[j],
                series.p1[j],
                series.se_p1[j],
                series.mean_u[j].mean / kt,
                series.mean_u[j].std_error / kt,
            ]
        })
        .collect()
}

fn max_energy_drift(series: &RelaxationSeries, kt: f64) -> f64 {
    let u0 = series.mean_u[0].mean;
    series
        .mean_u
        .iter()
        .map(|m| (m.mean - u0).abs() / kt)
        .fold(0.0, f64::max)
}

fn doublewell_relax(cfg: &ExperimentConfig) -> Result<Table> {
    let params = well_params(cfg, cfg.barrier_kt)?;
    let rc = relax_config(cfg, params);
    let series = relax_ensemble(&rc)?;
    let kt = params.kt();
    Ok(Table {
        experiment: Experiment::DoublewellRelax,
        rows: series_rows(&series, kt),
        summary: json!({
            "barrier_kT": cfg.barrier_kt,
            "n_trajectories": rc.n_trajectories,
            "dt": rc.dt,
            "terminal_p1": series.terminal_p1(),
            "max_abs_mean_U_drift_kT": max_energy_drift(&series, kt),
        }),
    })
}

fn doublewell_heated(cfg: &ExperimentConfig) -> Result<Table> {
    let params = well_params(cfg, cfg.barrier_kt)?;
    let rc = relax_config(cfg, params);
    let ratio = cfg.hot_temperature_ratio.unwrap_or(cfg.barrier_kt);
    let heated = heated_erase(&rc, ratio * params.temperature())?;
    let kt = params.kt();
    Ok(Table {
        experiment: Experiment::DoublewellHeated,
        rows: series_rows(&heated.series, kt),
        summary: json!({
            "barrier_kT": cfg.barrier_kt,
            "hot_temperature_ratio": ratio,
            "n_trajectories": rc.n_trajectories,
            "terminal_p1": heated.series.terminal_p1(),
            "mean_absorbed_kT": heated.absorbed.mean / kt,
            "se_absorbed_kT": heated.absorbed.std_error / kt,
        }),
    })
}

fn doublewell_escape(cfg: &ExperimentConfig) -> Result<Table> {
    let t = ambient_temperature(cfg);
    let kt = cfg.unit_mode.boltzmann() * t;
    let mut rows = Vec::new();
    let mut means = Vec::new();
    for &b in &cfg.escape_barriers_kt {
        let params = match cfg.escape_geometry {
            EscapeGeometry::Position => well_params(cfg, b)?,
            EscapeGeometry::Curvature => DoubleWellParams::with_well_curvature(
                b * kt,
                cfg.well_curvature * kt,
                cfg.damping,
                t,
                cfg.unit_mode,
            )?,
        };
        let mut ec = EscapeConfig::new(params, cfg.trajectories_or(DEFAULT_WELL_TRAJECTORIES));
        ec.dt = cfg.dt_fraction * params.stability_bound();
        ec.master_seed = cfg.master_seed;
        ec.workers = cfg.worker_count;
        ec.max_total_steps = cfg.max_total_steps;
        let est = measure_escape_time(&ec)?;
        rows.push(vec![
            b,
            params.well_position(),
            ec.dt,
            est.mean,
            est.std_error,
        ]);
        means.push(est.mean);
    }
    let ratios: Vec<f64> = means.windows(2).map(|w| w[1] / w[0]).collect();
    Ok(Table {
        experiment: Experiment::DoublewellEscape,
        rows,
        summary: json!({
            "barriers_kT": cfg.escape_barriers_kt,
            "mean_escape_times": means,
            "successive_ratios": ratios,
        }),
    })
}

fn bounds_brillouin(cfg: &ExperimentConfig) -> Result<Table> {
    let e = brillouin_min_dissipation(cfg.p_e, cfg.temperature_k)?;
    Ok(Table {
        experiment: Experiment::BoundsBrillouin,
        rows: vec![vec![cfg.p_e, cfg.temperature_k, e.joules, e.kt_multiple]],
        summary: json!({ "p_e": cfg.p_e, "E_joule": e.joules, "E_kT": e.kt_multiple }),
    })
}

fn bounds_anderson(cfg: &ExperimentConfig) -> Result<Table> {
    let e = anderson_bound(cfg.delta_s_bits, cfg.temperature_k)?;
    Ok(Table {
        experiment: Experiment::BoundsAnderson,
        rows: vec![vec![
            cfg.delta_s_bits,
            cfg.temperature_k,
            e.joules,
            e.kt_multiple,
        ]],
        summary: json!({ "delta_S_bits": cfg.delta_s_bits, "bound_joule": e.joules, "bound_kT": e.kt_multiple }),
    })
}

pub fn ice_model(cfg: &ExperimentConfig) -> IceCubeModel {
    let mut model = IceCubeModel::new(cfg.volume_cm3, cfg.ambient_k);
    model.ice_density = cfg.ice_density;
    model.latent_heat_fusion = cfg.latent_heat;
    if cfg.sensible_heat {
        let mut s = SensibleHeat::for_ambient(cfg.ambient_k);
        s.ice_initial_c = cfg.ice_initial_c;
        if let Some(w) = cfg.water_final_c {
            s.water_final_c = w;
        }
        s.ice_specific_heat = cfg.ice_specific_heat;
        s.water_specific_heat = cfg.water_specific_heat;
        model = model.with_sensible_heat(s);
    }
    model
}

fn bounds_icecube(cfg: &ExperimentConfig) -> Result<Table> {
    let cmp = ice_cube_erasure_energy(&ice_model(cfg))?;
    Ok(Table {
        experiment: Experiment::BoundsIcecube,
        rows: vec![vec![
            cmp.computed_cooling.joules,
            cmp.computed_cooling.kt_multiple,
            cmp.anderson_limit.kt_multiple,
            cmp.violation_factor,
        ]],
        summary: json!({
            "volume_cm3": cfg.volume_cm3,
            "ambient_K": cfg.ambient_k,
            "Q_joule": cmp.computed_cooling.joules,
            "Q_kT": cmp.computed_cooling.kt_multiple,
            "bound_kT": cmp.anderson_limit.kt_multiple,
            "violation_factor": cmp.violation_factor,
        }),
    })
}

fn info_eval(cfg: &ExperimentConfig) -> Result<Table> {
    let info = bit_information(cfg.p_e)?;
    let s = memory_entropy(cfg.p0)?;
    Ok(Table {
        experiment: Experiment::InfoEval,
        rows: vec![vec![cfg.p_e, info, cfg.p0, s, nats_to_bits(s)]],
        summary: json!({
            "p_e": cfg.p_e,
            "info_bits": info,
            "p0": cfg.p0,
            "entropy_nats": s,
            "entropy_bits": nats_to_bits(s),
        }),
    })
}
