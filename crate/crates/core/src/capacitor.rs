//! Charge-based memory cell.
//!
//! A bit is written by connecting a resistor across the capacitor and
//! disconnecting it the moment the Johnson-noise voltage first reaches the
//! signed target level (`+u0` for 1, `-u0` for 0). It is read from the sign
//! of the voltage, and erased by reconnecting the resistor so that the
//! voltage thermalises again. No work is done on the cell while the resistor
//! is connected, so the heat delivered to the bath equals minus the change of
//! stored energy `C V^2 / 2` on every trajectory.

use serde::Serialize;

use crate::ensemble::{run_parallel_ensemble, EnsembleSpec};
use crate::error::{invalid, Error, Result};
use crate::info::{remaining_information, BitChannelStats, InformationContent};
use crate::rng::RngStream;
use crate::sde::{ou_sample_stationary, step_count, CellParams, OuPropagator};
use crate::stats::{normal_cdf, Accumulator, MeanEstimate};

/// Energy cost charged per measurement decision while writing:
/// `kT ln(1/p)` for a decision made with error probability `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ControlCostModel {
    decision_error_prob: f64,
}

impl Default for ControlCostModel {
    fn default() -> Self {
        Self {
            decision_error_prob: 0.5,
        }
    }
}

impl ControlCostModel {
    pub fn new(decision_error_prob: f64) -> Result<Self> {
        if !(decision_error_prob > 0.0 && decision_error_prob <= 0.5) {
            return Err(invalid(format!(
                "decision error probability must be in (0, 0.5], got {decision_error_prob}"
            )));
        }
        Ok(Self {
            decision_error_prob,
        })
    }

    pub fn decision_error_prob(&self) -> f64 {
        self.decision_error_prob
    }

    pub fn per_decision(&self, kt: f64) -> f64 {
        kt * (1.0 / self.decision_error_prob).ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WriteOptions {
    pub dt: f64,
    /// Abort the first-passage search after this much simulated time.
    pub max_duration: f64,
    pub control: ControlCostModel,
}

impl WriteOptions {
    pub fn new(dt: f64, max_duration: f64) -> Self {
        Self {
            dt,
            max_duration,
            control: ControlCostModel::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WriteRecord {
    pub bit_written: u8,
    /// Signed level: +u0 for a 1, -u0 for a 0.
    pub target_level: f64,
    pub duration: f64,
    pub v_start: f64,
    pub v_final: f64,
    pub n_samples: u64,
    pub bath_heat: f64,
    pub control_cost_lower_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EraseRecord {
    pub v_start: f64,
    pub v_final: f64,
    pub duration: f64,
    pub bath_heat: f64,
}

/// Heat released to the bath while the voltage moves from `v_start` to `v_final`
/// with no work done on the cell.
pub fn bath_heat(params: &CellParams, v_start: f64, v_final: f64) -> f64 {
    params.energy(v_start) - params.energy(v_final)
}

fn check_bit(bit: u8) -> Result<()> {
    if bit > 1 {
        Err(invalid(format!("bit must be 0 or 1, got {bit}")))
    } else {
        Ok(())
    }
}

pub fn signed_level(bit: u8, u0: f64) -> f64 {
    if bit == 1 {
        u0
    } else {
        -u0
    }
}

pub fn write_bit(
    bit: u8,
    u0: f64,
    params: &CellParams,
    opts: &WriteOptions,
    rng: &mut RngStream,
) -> Result<WriteRecord> {
    check_bit(bit)?;
    if !(u0.is_finite() && u0 > 0.0) {
        return Err(invalid(format!("u0 must be positive, got {u0}")));
    }
    if opts.max_duration.is_nan() || opts.max_duration <= 0.0 {
        return Err(invalid("max write duration must be positive"));
    }
    let prop = OuPropagator::new(opts.dt, params)?;
    let target = signed_level(bit, u0);
    let v_start = ou_sample_stationary(params, rng);
    let max_steps = (opts.max_duration / opts.dt).ceil() as u64;

    let mut v = v_start;
    let mut n_samples = 0u64;
    loop {
        if n_samples >= max_steps {
            return Err(Error::Timeout {
                target,
                max_duration: opts.max_duration,
            });
        }
        let next = prop.step(v, rng);
        n_samples += 1;
        // Consecutive samples straddle (or touch) the target: disconnect there.
        if (v - target) * (next - target) <= 0.0 {
            break;
        }
        v = next;
    }

    Ok(WriteRecord {
        bit_written: bit,
        target_level: target,
        duration: n_samples as f64 * opts.dt,
        v_start,
        v_final: target,
        n_samples,
        bath_heat: bath_heat(params, v_start, target),
        control_cost_lower_bound: n_samples as f64 * opts.control.per_decision(params.kt()),
    })
}

/// Sign read-out. Zero, a probability-zero event, reads as 1.
pub fn read_bit(v: f64) -> Result<u8> {
    if !v.is_finite() {
        return Err(invalid(format!("voltage must be finite, got {v}")));
    }
    Ok(u8::from(v >= 0.0))
}

/// Reconnect the resistor for `duration` and let the cell thermalise.
pub fn erase(
    v0: f64,
    duration: f64,
    params: &CellParams,
    dt: f64,
    rng: &mut RngStream,
) -> Result<EraseRecord> {
    if !v0.is_finite() {
        return Err(invalid(format!("voltage must be finite, got {v0}")));
    }
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(invalid(format!(
            "erase duration must be non-negative, got {duration}"
        )));
    }
    let full = OuPropagator::new(dt, params)?;
    let mut v = v0;
    if duration > 0.0 {
        let n = step_count(duration, dt);
        for _ in 1..n {
            v = full.step(v, rng);
        }
        let last = duration - (n - 1) as f64 * dt;
        v = OuPropagator::new(last, params)?.step(v, rng);
    }
    Ok(EraseRecord {
        v_start: v0,
        v_final: v,
        duration,
        bath_heat: bath_heat(params, v0, v),
    })
}

/// Mean bath heat of a complete erasure from `±u0`: `(C u0^2 - kT) / 2`.
pub fn erase_dissipation_theory(u0: f64, params: &CellParams) -> Result<f64> {
    if !(u0 >= 0.0 && u0.is_finite()) {
        return Err(invalid(format!("u0 must be non-negative, got {u0}")));
    }
    Ok(0.5 * (params.capacitance() * u0 * u0 - params.kt()))
}

/// Mean bath heat of a write to `±u0` from a thermalised cell.
pub fn write_dissipation_theory(u0: f64, params: &CellParams) -> Result<f64> {
    Ok(-erase_dissipation_theory(u0, params)?)
}

/// Probability that a bit stored at `±u0` reads wrong after erasing for `t`.
pub fn partial_erase_error_prob(u0: f64, t: f64, params: &CellParams) -> Result<f64> {
    if !(u0.is_finite() && u0 > 0.0) {
        return Err(invalid(format!("u0 must be positive, got {u0}")));
    }
    if t.is_nan() || t < 0.0 {
        return Err(invalid(format!("time must be non-negative, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let decay = (-t / params.tau()).exp();
    if decay == 0.0 {
        return Ok(0.5);
    }
    let spread = params.sigma_st() * (-(-2.0 * t / params.tau()).exp_m1()).sqrt();
    Ok(normal_cdf(-u0 * decay / spread))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErasureConfig {
    pub cell: CellParams,
    pub u0: f64,
    pub dt: f64,
    /// Erase durations in seconds, ascending.
    pub durations: Vec<f64>,
    pub n_trajectories: usize,
    pub master_seed: u64,
    pub workers: usize,
    pub max_write_duration: f64,
    pub control: ControlCostModel,
}

impl ErasureConfig {
    /// Reduced-unit defaults: dt = tau/100, a single complete (20 tau) erasure.
    pub fn new(cell: CellParams, u0: f64) -> Self {
        let tau = cell.tau();
        Self {
            cell,
            u0,
            dt: tau / 100.0,
            durations: vec![20.0 * tau],
            n_trajectories: 100_000,
            master_seed: 0,
            workers: 1,
            max_write_duration: 1000.0 * tau,
            control: ControlCostModel::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.u0.is_finite() && self.u0 > 0.0) {
            return Err(invalid(format!("u0 must be positive, got {}", self.u0)));
        }
        if !(self.dt > 0.0 && self.dt <= self.cell.tau() / 100.0 * (1.0 + 1e-12)) {
            return Err(invalid(format!(
                "dt must be in (0, tau/100] for experiments, got {} with tau = {}",
                self.dt,
                self.cell.tau()
            )));
        }
        if self.durations.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(invalid("erase durations must be non-negative"));
        }
        if self.durations.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("erase durations must be sorted ascending"));
        }
        if self.n_trajectories == 0 {
            return Err(invalid("need at least one trajectory"));
        }
        Ok(())
    }

    fn ensemble(&self) -> EnsembleSpec {
        EnsembleSpec::new(self.n_trajectories, self.master_seed, self.workers)
    }

    fn write_options(&self) -> WriteOptions {
        WriteOptions {
            dt: self.dt,
            max_duration: self.max_write_duration,
            control: self.control,
        }
    }
}

/// Ensemble statistics of one erase duration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErasureReport {
    pub duration: f64,
    pub n_trajectories: usize,
    pub mean_q_env: MeanEstimate,
    pub theory_q_env: f64,
    pub p_e_theory: f64,
    pub channel: BitChannelStats,
    pub remaining_information: InformationContent,
}

/// Write a random bit on every trajectory, erase it through each duration of
/// the grid in turn (the exact propagator makes one continued erasure
/// equivalent to independent erasures of each length), and read it back.
pub fn run_erasure_experiment(cfg: &ErasureConfig) -> Result<Vec<ErasureReport>> {
    cfg.validate()?;
    let params = cfg.cell;
    let opts = cfg.write_options();
    let per_traj = run_parallel_ensemble(cfg.ensemble(), |_, rng| {
        let bit = rng.bit();
        let written = write_bit(bit, cfg.u0, &params, &opts, rng)?;
        let mut v = written.v_final;
        let mut elapsed = 0.0;
        let mut out = Vec::with_capacity(cfg.durations.len());
        for &d in &cfg.durations {
            v = erase(v, d - elapsed, &params, cfg.dt, rng)?.v_final;
            elapsed = d;
            let wrong = read_bit(v)? != bit;
            out.push((bath_heat(&params, written.v_final, v), wrong));
        }
        Ok(out)
    })?;

    let n = cfg.n_trajectories;
    let theory_complete = erase_dissipation_theory(cfg.u0, &params)?;
    cfg.durations
        .iter()
        .enumerate()
        .map(|(k, &duration)| {
            let mut heat = Accumulator::default();
            let mut errors = 0u64;
            for traj in &per_traj {
                let (q, wrong) = traj[k];
                heat.push(q);
                errors += u64::from(wrong);
            }
            let channel = BitChannelStats::from_counts(errors, n as u64)?;
            let decay = (-duration / params.tau()).exp();
            Ok(ErasureReport {
                duration,
                n_trajectories: n,
                mean_q_env: heat.finish(),
                // Partial relaxation: <C V^2/2> = kT/2 + (C u0^2/2 - kT/2) e^{-2t/tau}.
                theory_q_env: theory_complete * (1.0 - decay * decay),
                p_e_theory: partial_erase_error_prob(cfg.u0, duration, &params)?,
                remaining_information: remaining_information(&channel),
                channel,
            })
        })
        .collect()
}

/// Ensemble statistics of writes only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WriteReport {
    pub n_trajectories: usize,
    pub mean_q_env: MeanEstimate,
    pub theory_q_env: f64,
    pub mean_duration: MeanEstimate,
    pub mean_n_samples: MeanEstimate,
    pub mean_control_cost: MeanEstimate,
    pub min_control_cost: f64,
}

pub fn run_write_ensemble(cfg: &ErasureConfig) -> Result<(WriteReport, Vec<WriteRecord>)> {
    cfg.validate()?;
    let params = cfg.cell;
    let opts = cfg.write_options();
    let records = run_parallel_ensemble(cfg.ensemble(), |_, rng| {
        let bit = rng.bit();
        write_bit(bit, cfg.u0, &params, &opts, rng)
    })?;
    let report = WriteReport {
        n_trajectories: records.len(),
        mean_q_env: MeanEstimate::from_values(records.iter().map(|r| r.bath_heat)),
        theory_q_env: write_dissipation_theory(cfg.u0, &params)?,
        mean_duration: MeanEstimate::from_values(records.iter().map(|r| r.duration)),
        mean_n_samples: MeanEstimate::from_values(records.iter().map(|r| r.n_samples as f64)),
        mean_control_cost: MeanEstimate::from_values(
            records.iter().map(|r| r.control_cost_lower_bound),
        ),
        min_control_cost: records
            .iter()
            .map(|r| r.control_cost_lower_bound)
            .fold(f64::INFINITY, f64::min),
    };
    Ok((report, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::make_stream;
    use std::f64::consts::LN_2;

    fn cell() -> CellParams {
        CellParams::reduced(1.0).unwrap()
    }

    #[test]
    fn write_lands_on_signed_target() {
        let p = cell();
        let opts = WriteOptions::new(0.01, 1000.0);
        let mut rng = make_stream(1, 0);
        for i in 0..200 {
            let bit = (i % 2) as u8;
            let r = write_bit(bit, 0.5, &p, &opts, &mut rng).unwrap();
            assert_eq!(r.v_final, signed_level(bit, 0.5));
            assert_eq!(read_bit(r.v_final).unwrap(), bit);
            assert!(r.n_samples >= 1);
            assert_eq!(r.control_cost_lower_bound, r.n_samples as f64 * LN_2);
            assert_eq!(
                r.bath_heat + (p.energy(r.v_final) - p.energy(r.v_start)),
                0.0
            );
        }
    }

    #[test]
    fn write_at_sigma_stores_equipartition_energy() {
        let p = cell();
        let mut rng = make_stream(2, 0);
        let r = write_bit(
            1,
            p.sigma_st(),
            &p,
            &WriteOptions::new(0.01, 1000.0),
            &mut rng,
        )
        .unwrap();
        assert_eq!(p.energy(r.v_final), p.kt() / 2.0);
    }

    #[test]
    fn write_rejects_bad_input() {
        let p = cell();
        let opts = WriteOptions::new(0.01, 1000.0);
        let mut rng = make_stream(2, 0);
        assert!(write_bit(1, 0.0, &p, &opts, &mut rng).is_err());
        assert!(write_bit(1, -1.0, &p, &opts, &mut rng).is_err());
        assert!(write_bit(2, 1.0, &p, &opts, &mut rng).is_err());
    }

    #[test]
    fn write_guard_times_out() {
        let p = cell();
        let mut rng = make_stream(2, 0);
        let err = write_bit(1, 30.0, &p, &WriteOptions::new(0.01, 5.0), &mut rng).unwrap_err();
        assert!(matches!(err, Error::Timeout { .. }), "{err:?}");
    }

    #[test]
    fn read_sign_convention() {
        assert_eq!(read_bit(0.3).unwrap(), 1);
        assert_eq!(read_bit(-0.3).unwrap(), 0);
        assert_eq!(read_bit(0.0).unwrap(), 1);
        assert!(read_bit(f64::INFINITY).is_err());
        assert!(read_bit(f64::NAN).is_err());
    }

    #[test]
    fn zero_length_erase_is_identity() {
        let mut rng = make_stream(3, 0);
        let r = erase(-0.4, 0.0, &cell(), 0.01, &mut rng).unwrap();
        assert_eq!(r.v_final, -0.4);
        assert_eq!(r.bath_heat, 0.0);
        assert!(erase(0.4, -1.0, &cell(), 0.01, &mut rng).is_err());
    }

    #[test]
    fn dissipation_theory_values() {
        let p = cell();
        let s = p.sigma_st();
        assert_eq!(erase_dissipation_theory(s, &p).unwrap(), 0.0);
        assert_eq!(erase_dissipation_theory(0.0, &p).unwrap(), -0.5);
        assert_eq!(erase_dissipation_theory(s / 2.0, &p).unwrap(), -0.375);
        assert_eq!(erase_dissipation_theory(2.0 * s, &p).unwrap(), 1.5);
        assert!(erase_dissipation_theory(-1.0, &p).is_err());
    }

    #[test]
    fn partial_erase_error_values() {
        let p = cell();
        assert_eq!(partial_erase_error_prob(1.0, 0.0, &p).unwrap(), 0.0);
        assert_eq!(
            partial_erase_error_prob(1.0, f64::INFINITY, &p).unwrap(),
            0.5
        );
        assert!((partial_erase_error_prob(1.0, 800.0, &p).unwrap() - 0.5).abs() < 1e-15);
        let at_tau = partial_erase_error_prob(1.0, 1.0, &p).unwrap();
        assert!((at_tau - 0.3462).abs() < 5e-5, "{at_tau}");
        assert!(partial_erase_error_prob(1.0, -0.1, &p).is_err());
        let mut prev = 0.0;
        for k in 1..200 {
            let pe = partial_erase_error_prob(0.5, k as f64 * 0.05, &p).unwrap();
            assert!(pe > prev);
            prev = pe;
        }
    }

    #[test]
    fn control_cost_model() {
        assert!((ControlCostModel::default().per_decision(2.0) - 2.0 * LN_2).abs() < 1e-15);
        assert!(ControlCostModel::new(0.0).is_err());
        assert!(ControlCostModel::new(0.6).is_err());
        let c = ControlCostModel::new(0.25).unwrap();
        assert!((c.per_decision(1.0) - 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn experiment_without_erasure_keeps_the_bit() {
        let mut cfg = ErasureConfig::new(cell(), 0.5);
        cfg.durations = vec![0.0];
        cfg.n_trajectories = 2000;
        let rep = run_erasure_experiment(&cfg).unwrap();
        assert_eq!(rep[0].channel.errors, 0);
        assert_eq!(rep[0].remaining_information.bits, 1.0);
        assert_eq!(rep[0].mean_q_env.mean, 0.0);
    }

    #[test]
    fn experiment_rejects_coarse_dt_and_unsorted_grid() {
        let mut cfg = ErasureConfig::new(cell(), 0.5);
        cfg.dt = 0.1;
        assert!(run_erasure_experiment(&cfg).is_err());
        let mut cfg = ErasureConfig::new(cell(), 0.5);
        cfg.durations = vec![2.0, 1.0];
        assert!(run_erasure_experiment(&cfg).is_err());
    }
}
