//! Stochastic stepping for the RC memory cell.
//!
//! The capacitor voltage of a parallel RC circuit driven by the resistor's
//! Johnson noise is an Ornstein-Uhlenbeck process with relaxation time
//! `tau = R C` and stationary variance `kT / C`. Its transition law is known
//! in closed form, so [`ou_step`] is exact in distribution for any `dt`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::RngStream;

/// Boltzmann constant, SI defining value (J/K).
pub const BOLTZMANN: f64 = 1.380_649e-23;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    /// k = 1, so kT equals the temperature value.
    Reduced,
    Si,
}

impl UnitSystem {
    pub fn boltzmann(self) -> f64 {
        match self {
            UnitSystem::Reduced => 1.0,
            UnitSystem::Si => BOLTZMANN,
        }
    }
}

/// Physical parameters of the capacitor memory cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellParams {
    temperature: f64,
    resistance: f64,
    capacitance: f64,
    units: UnitSystem,
    tau: f64,
    kt: f64,
    sigma_st: f64,
}

impl CellParams {
    pub fn new(
        temperature: f64,
        resistance: f64,
        capacitance: f64,
        units: UnitSystem,
    ) -> Result<Self> {
        for (name, value) in [
            ("temperature", temperature),
            ("resistance", resistance),
            ("capacitance", capacitance),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        let kt = units.boltzmann() * temperature;
        Ok(Self {
            temperature,
            resistance,
            capacitance,
            units,
            tau: resistance * capacitance,
            kt,
            sigma_st: (kt / capacitance).sqrt(),
        })
    }

    /// Reduced units: kT = 1, C = 1, so sigma_st = 1 and tau = R.
    pub fn reduced(tau: f64) -> Result<Self> {
        Self::new(1.0, tau, 1.0, UnitSystem::Reduced)
    }

    pub fn si(temperature: f64, resistance: f64, capacitance: f64) -> Result<Self> {
        Self::new(temperature, resistance, capacitance, UnitSystem::Si)
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }
    pub fn resistance(&self) -> f64 {
        self.resistance
    }
    pub fn capacitance(&self) -> f64 {
        self.capacitance
    }
    pub fn units(&self) -> UnitSystem {
        self.units
    }
    pub fn tau(&self) -> f64 {
        self.tau
    }
    pub fn kt(&self) -> f64 {
        self.kt
    }
    /// RMS Johnson-noise voltage, sqrt(kT/C).
    pub fn sigma_st(&self) -> f64 {
        self.sigma_st
    }

    /// Stored energy C V^2 / 2.
    pub fn energy(&self, v: f64) -> f64 {
        0.5 * self.capacitance * v * v
    }
}

/// Precomputed exact transition over a fixed interval.
#[derive(Debug, Clone, Copy)]
pub struct OuPropagator {
    decay: f64,
    noise: f64,
}

impl OuPropagator {
    pub fn new(dt: f64, params: &CellParams) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid(format!("dt must be positive and finite, got {dt}")));
        }
        let decay = (-dt / params.tau).exp();
        // 1 - e^{-2x} via expm1 keeps precision for dt << tau.
        let noise = params.sigma_st * (-(-2.0 * dt / params.tau).exp_m1()).sqrt();
        Ok(Self { decay, noise })
    }

    pub fn decay(&self) -> f64 {
        self.decay
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    #[inline]
    pub fn step(&self, v: f64, rng: &mut RngStream) -> f64 {
        v * self.decay + self.noise * rng.normal()
    }
}

pub fn ou_step(v: f64, dt: f64, params: &CellParams, rng: &mut RngStream) -> Result<f64> {
    if !v.is_finite() {
        return Err(invalid(format!("voltage must be finite, got {v}")));
    }
    Ok(OuPropagator::new(dt, params)?.step(v, rng))
}

pub fn ou_sample_stationary(params: &CellParams, rng: &mut RngStream) -> f64 {
    params.sigma_st * rng.normal()
}

/// Time-indexed realisation of a state variable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    times: Vec<f64>,
    values: Vec<f64>,
    stream_index: u64,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, values: Vec<f64>, stream_index: u64) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(invalid(
                "trajectory needs equal, non-zero numbers of times and values",
            ));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("trajectory times must be strictly increasing"));
        }
        Ok(Self {
            times,
            values,
            stream_index,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }
    pub fn len(&self) -> usize {
        self.times.len()
    }
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
    pub fn last_value(&self) -> f64 {
        *self.values.last().expect("non-empty by construction")
    }
}

/// Number of `dt` steps covering `t_total`, tolerant of ratios like 20/0.01
/// landing a hair above an integer.
pub(crate) fn step_count(t_total: f64, dt: f64) -> usize {
    let ratio = t_total / dt;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as usize
    } else {
        ratio.ceil() as usize
    }
}

/// Ceil(t_total/dt) exact OU steps from `v0`; the final step is shortened so
/// the path ends exactly at `t_total`.
pub fn simulate_ou_path(
    v0: f64,
    t_total: f64,
    dt: f64,
    params: &CellParams,
    rng: &mut RngStream,
) -> Result<Trajectory> {
    if !v0.is_finite() {
        return Err(invalid(format!("initial voltage must be finite, got {v0}")));
    }
    if !(t_total.is_finite() && t_total > 0.0) {
        return Err(invalid(format!("t_total must be positive, got {t_total}")));
    }
    let full = OuPropagator::new(dt, params)?;
    let n = step_count(t_total, dt);
    let mut times = Vec::with_capacity(n + 1);
    let mut values = Vec::with_capacity(n + 1);
    times.push(0.0);
    values.push(v0);
    let mut v = v0;
    for k in 1..=n {
        let (t, prop) = if k == n {
            let last = t_total - (n - 1) as f64 * dt;
            (t_total, OuPropagator::new(last, params)?)
        } else {
            (k as f64 * dt, full)
        };
        v = prop.step(v, rng);
        times.push(t);
        values.push(v);
    }
    Trajectory::new(times, values, rng.stream_index())
}
