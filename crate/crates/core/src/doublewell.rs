//! Bistable bit in the symmetric quartic well `U(x) = E ((x/x0)^2 - 1)^2`.
//!
//! Overdamped Langevin dynamics integrated with Euler-Maruyama. The bit value
//! is the residence side, `x >= 0` reading as 1. Left alone, thermal
//! activation over the barrier drives the occupation of both wells to 1/2.

use serde::Serialize;

use crate::ensemble::{run_parallel_ensemble, EnsembleSpec};
use crate::error::{invalid, Error, Result};
use crate::rng::RngStream;
use crate::sde::UnitSystem;
use crate::stats::{Accumulator, MeanEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoubleWellParams {
    barrier_height: f64,
    well_position: f64,
    damping: f64,
    temperature: f64,
    units: UnitSystem,
}

impl DoubleWellParams {
    pub fn new(
        barrier_height: f64,
        well_position: f64,
        damping: f64,
        temperature: f64,
        units: UnitSystem,
    ) -> Result<Self> {
        for (name, value) in [
            ("barrier height", barrier_height),
            ("well position", well_position),
            ("damping", damping),
            ("temperature", temperature),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        Ok(Self {
            barrier_height,
            well_position,
            damping,
            temperature,
            units,
        })
    }

    /// Reduced units: kT = 1, x0 = 1, damping 1; barrier given in kT.
    pub fn reduced(barrier_kt: f64) -> Result<Self> {
        Self::new(barrier_kt, 1.0, 1.0, 1.0, UnitSystem::Reduced)
    }

    /// Well placed so that the curvature at the minima, `U''(x0) = 8E/x0^2`,
    /// equals `curvature`. Barriers compared at fixed curvature share the
    /// Kramers attempt frequency, so their escape times differ by the
    /// Arrhenius factor alone.
    pub fn with_well_curvature(
        barrier_height: f64,
        curvature: f64,
        damping: f64,
        temperature: f64,
        units: UnitSystem,
    ) -> Result<Self> {
        if !(curvature.is_finite() && curvature > 0.0) {
            return Err(invalid(format!(
                "curvature must be positive, got {curvature}"
            )));
        }
        Self::new(
            barrier_height,
            (8.0 * barrier_height / curvature).sqrt(),
            damping,
            temperature,
            units,
        )
    }

    pub fn at_temperature(&self, temperature: f64) -> Result<Self> {
        Self::new(
            self.barrier_height,
            self.well_position,
            self.damping,
            temperature,
            self.units,
        )
    }

    pub fn barrier_height(&self) -> f64 {
        self.barrier_height
    }
    pub fn well_position(&self) -> f64 {
        self.well_position
    }
    pub fn damping(&self) -> f64 {
        self.damping
    }
    pub fn temperature(&self) -> f64 {
        self.temperature
    }
    pub fn units(&self) -> UnitSystem {
        self.units
    }
    pub fn kt(&self) -> f64 {
        self.units.boltzmann() * self.temperature
    }

    pub fn potential(&self, x: f64) -> f64 {
        let s = x / self.well_position;
        let w = s * s - 1.0;
        self.barrier_height * w * w
    }

    /// `-U'(x)`; odd in `x` bit for bit.
    pub fn force(&self, x: f64) -> f64 {
        let x0 = self.well_position;
        -4.0 * self.barrier_height * x * ((x / x0) * (x / x0) - 1.0) / (x0 * x0)
    }

    /// Largest Euler-Maruyama step accepted: a tenth of `gamma x0^2 / (8E)`.
    pub fn stability_bound(&self) -> f64 {
        0.1 * self.damping * self.well_position * self.well_position / (8.0 * self.barrier_height)
    }

    /// High-barrier Kramers estimate of the mean time to reach the barrier
    /// top from a well (half the well-to-well escape time).
    pub fn kramers_barrier_time(&self) -> f64 {
        let x0 = self.well_position;
        let omega = (32.0f64).sqrt() * self.barrier_height / (x0 * x0);
        0.5 * 2.0 * std::f64::consts::PI * self.damping / omega
            * (self.barrier_height / self.kt()).exp()
    }
}

/// Default step as a fraction of [`DoubleWellParams::stability_bound`]. At
/// the bound itself the Euler-Maruyama bias in the mean potential energy is
/// about 0.04 kT at E = 2 kT; a quarter of it brings the bias under the
/// statistical noise of a 10^4-trajectory ensemble.
pub const DEFAULT_STEP_FRACTION: f64 = 0.25;

/// Residence side; the tie at zero reads as 1.
pub fn side_of(x: f64) -> u8 {
    u8::from(x >= 0.0)
}

fn check_side(side: u8) -> Result<()> {
    if side > 1 {
        Err(invalid(format!("side must be 0 or 1, got {side}")))
    } else {
        Ok(())
    }
}

fn check_step(dt: f64, p: &DoubleWellParams) -> Result<()> {
    let bound = p.stability_bound();
    if !(dt.is_finite() && dt > 0.0) {
        return Err(invalid(format!("dt must be positive, got {dt}")));
    }
    if dt > bound * (1.0 + 1e-12) {
        return Err(invalid(format!(
            "dt = {dt} exceeds the stability bound {bound}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
struct EmStepper {
    drift_scale: f64,
    noise: f64,
}

impl EmStepper {
    fn new(dt: f64, p: &DoubleWellParams) -> Self {
        Self {
            drift_scale: dt / p.damping,
            noise: (2.0 * p.kt() * dt / p.damping).sqrt(),
        }
    }

    #[inline]
    fn step(&self, x: f64, p: &DoubleWellParams, z: f64) -> f64 {
        x + p.force(x) * self.drift_scale + self.noise * z
    }
}

pub fn em_step(x: f64, dt: f64, p: &DoubleWellParams, rng: &mut RngStream) -> Result<f64> {
    if !x.is_finite() {
        return Err(invalid(format!("position must be finite, got {x}")));
    }
    check_step(dt, p)?;
    Ok(EmStepper::new(dt, p).step(x, p, rng.normal()))
}

/// Inverse-CDF sampler for the Boltzmann law `exp(-U/kT)` tabulated on a
/// symmetric grid wide enough that the truncated tails carry `exp(-50)`
/// relative weight.
#[derive(Debug, Clone)]
pub struct BoltzmannSampler {
    grid: Vec<f64>,
    cdf: Vec<f64>,
}

const SAMPLER_POINTS: usize = 40_001;

impl BoltzmannSampler {
    pub fn new(p: &DoubleWellParams) -> Self {
        let x0 = p.well_position();
        let reach = (1.0 + (50.0 * p.kt() / p.barrier_height()).sqrt())
            .sqrt()
            .max(1.5);
        let half = reach * x0;
        let h = 2.0 * half / (SAMPLER_POINTS - 1) as f64;
        let grid: Vec<f64> = (0..SAMPLER_POINTS).map(|i| -half + i as f64 * h).collect();
        let density: Vec<f64> = grid
            .iter()
            .map(|&x| (-p.potential(x) / p.kt()).exp())
            .collect();
        let mut cdf = Vec::with_capacity(SAMPLER_POINTS);
        cdf.push(0.0);
        for w in density.windows(2) {
            let last = *cdf.last().unwrap();
            cdf.push(last + 0.5 * h * (w[0] + w[1]));
        }
        let total = *cdf.last().unwrap();
        cdf.iter_mut().for_each(|c| *c /= total);
        Self { grid, cdf }
    }

    /// One draw from the global equilibrium law.
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        let u = rng.uniform();
        let i = self
            .cdf
            .partition_point(|&c| c <= u)
            .clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        self.grid[i - 1] + frac * (self.grid[i] - self.grid[i - 1])
    }

    /// Equilibrium restricted to one well: propose from the global law and
    /// reject the wrong sign.
    pub fn sample_side(&self, side: u8, rng: &mut RngStream) -> f64 {
        loop {
            let x = self.sample(rng);
            if side_of(x) == side {
                return x;
            }
        }
    }
}

/// Equilibrated-within-one-well initial state.
pub fn sample_well(p: &DoubleWellParams, side: u8, rng: &mut RngStream) -> Result<f64> {
    check_side(side)?;
    Ok(BoltzmannSampler::new(p).sample_side(side, rng))
}

/// Step indices `0 = k_0 < k_1 < ... < k_n = ceil(t_total/dt)` spaced
/// logarithmically with `per_decade` points per decade above one step.
pub fn log_step_grid(t_total: f64, dt: f64, per_decade: usize) -> Vec<usize> {
    let last = crate::sde::step_count(t_total, dt).max(1);
    let decades = (last as f64).log10();
    let points = (decades * per_decade as f64).ceil() as usize;
    let mut steps = vec![0usize];
    for j in 0..=points {
        let k = (10f64.powf(decades * j as f64 / points.max(1) as f64)).round() as usize;
        let k = k.clamp(1, last);
        if k > *steps.last().unwrap() {
            steps.push(k);
        }
    }
    if *steps.last().unwrap() != last {
        steps.push(last);
    }
    steps
}

/// Occupation of the right well and mean potential energy versus time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelaxationSeries {
    pub times: Vec<f64>,
    pub p1: Vec<f64>,
    pub se_p1: Vec<f64>,
    pub mean_u: Vec<MeanEstimate>,
}

impl RelaxationSeries {
    /// First recorded time with `|p1 - 1/2| <= tol`.
    pub fn relaxation_time(&self, tol: f64) -> Option<f64> {
        self.times
            .iter()
            .zip(&self.p1)
            .find(|(_, p)| (*p - 0.5).abs() <= tol)
            .map(|(t, _)| *t)
    }

    pub fn terminal_p1(&self) -> f64 {
        *self.p1.last().expect("series is never empty")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelaxConfig {
    pub params: DoubleWellParams,
    pub side: u8,
    pub t_total: f64,
    pub dt: f64,
    pub n_trajectories: usize,
    pub master_seed: u64,
    pub workers: usize,
}

impl RelaxConfig {
    pub fn new(params: DoubleWellParams, side: u8, t_total: f64, n_trajectories: usize) -> Self {
        Self {
            params,
            side,
            t_total,
            dt: DEFAULT_STEP_FRACTION * params.stability_bound(),
            n_trajectories,
            master_seed: 0,
            workers: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        check_side(self.side)?;
        check_step(self.dt, &self.params)?;
        if !(self.t_total.is_finite() && self.t_total > 0.0) {
            return Err(invalid(format!(
                "t_total must be positive, got {}",
                self.t_total
            )));
        }
        if self.n_trajectories < 100 {
            return Err(invalid(format!(
                "need at least 100 trajectories, got {}",
                self.n_trajectories
            )));
        }
        Ok(())
    }
}

/// Per trajectory, positions at the grid steps. Trajectories are simulated in
/// the coordinate `y = +-x` that starts in the right well, so side 0 is the
/// exact mirror image of side 1 under the same streams.
fn sample_paths(
    cfg: &RelaxConfig,
    dynamics: &DoubleWellParams,
    grid: &[usize],
) -> Result<Vec<Vec<f64>>> {
    let sampler = BoltzmannSampler::new(&cfg.params);
    let stepper = EmStepper::new(cfg.dt, dynamics);
    let sign = if cfg.side == 1 { 1.0 } else { -1.0 };
    let spec = EnsembleSpec::new(cfg.n_trajectories, cfg.master_seed, cfg.workers);
    run_parallel_ensemble(spec, |_, rng| {
        let mut y = sampler.sample_side(1, rng);
        let mut out = Vec::with_capacity(grid.len());
        let mut k = 0usize;
        for &target in grid {
            while k < target {
                y = stepper.step(y, dynamics, rng.normal());
                k += 1;
            }
            if !y.is_finite() {
                return Err(Error::Infeasible("trajectory diverged".into()));
            }
            out.push(sign * y);
        }
        Ok(out)
    })
}

fn summarize(
    paths: &[Vec<f64>],
    grid: &[usize],
    dt: f64,
    p: &DoubleWellParams,
) -> RelaxationSeries {
    let n = paths.len() as f64;
    let mut series = RelaxationSeries {
        times: grid.iter().map(|&k| k as f64 * dt).collect(),
        p1: Vec::with_capacity(grid.len()),
        se_p1: Vec::with_capacity(grid.len()),
        mean_u: Vec::with_capacity(grid.len()),
    };
    for j in 0..grid.len() {
        let right = paths.iter().filter(|path| side_of(path[j]) == 1).count() as f64;
        let p1 = right / n;
        series.p1.push(p1);
        series.se_p1.push((p1 * (1.0 - p1) / n).sqrt());
        series.mean_u.push(MeanEstimate::from_values(
            paths.iter().map(|path| p.potential(path[j])),
        ));
    }
    series
}

pub fn relax_ensemble(cfg: &RelaxConfig) -> Result<RelaxationSeries> {
    cfg.validate()?;
    let grid = log_step_grid(cfg.t_total, cfg.dt, 20);
    let paths = sample_paths(cfg, &cfg.params, &grid)?;
    Ok(summarize(&paths, &grid, cfg.dt, &cfg.params))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatedErasure {
    pub t_hot: f64,
    pub series: RelaxationSeries,
    /// Per-trajectory `U(t_total) - U(0)`, the energy taken from the hot bath.
    pub absorbed: MeanEstimate,
}

/// Start equilibrated in one well at the ambient temperature, then evolve in
/// contact with a bath at `t_hot`.
pub fn heated_erase(cfg: &RelaxConfig, t_hot: f64) -> Result<HeatedErasure> {
    cfg.validate()?;
    if !(t_hot.is_finite() && t_hot >= cfg.params.temperature()) {
        return Err(invalid(format!(
            "hot temperature {t_hot} must not be below ambient {}",
            cfg.params.temperature()
        )));
    }
    let hot = cfg.params.at_temperature(t_hot)?;
    let grid = log_step_grid(cfg.t_total, cfg.dt, 20);
    let paths = sample_paths(cfg, &hot, &grid)?;
    let last = grid.len() - 1;
    let absorbed = MeanEstimate::from_values(
        paths
            .iter()
            .map(|path| cfg.params.potential(path[last]) - cfg.params.potential(path[0])),
    );
    Ok(HeatedErasure {
        t_hot,
        series: summarize(&paths, &grid, cfg.dt, &cfg.params),
        absorbed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EscapeConfig {
    pub params: DoubleWellParams,
    pub dt: f64,
    pub n_trajectories: usize,
    pub master_seed: u64,
    pub workers: usize,
    /// Budget on Euler-Maruyama steps summed over the ensemble.
    pub max_total_steps: u64,
}

impl EscapeConfig {
    pub fn new(params: DoubleWellParams, n_trajectories: usize) -> Self {
        Self {
            params,
            dt: DEFAULT_STEP_FRACTION * params.stability_bound(),
            n_trajectories,
            master_seed: 0,
            workers: 1,
            max_total_steps: 4_000_000_000,
        }
    }
}

/// Mean first time a trajectory started at `+x0` reaches `x < 0`.
pub fn measure_escape_time(cfg: &EscapeConfig) -> Result<MeanEstimate> {
    let p = &cfg.params;
    check_step(cfg.dt, p)?;
    if cfg.n_trajectories == 0 {
        return Err(invalid("need at least one trajectory"));
    }
    let per_traj_cap = cfg.max_total_steps / cfg.n_trajectories as u64;
    let expected_steps = p.kramers_barrier_time() / cfg.dt;
    // Exponential tails: a cap under ~50 mean escape times would truncate.
    if expected_steps.is_nan() || expected_steps * 50.0 > per_traj_cap as f64 {
        return Err(Error::Infeasible(format!(
            "barrier {:.3} kT needs ~{expected_steps:.3e} steps per escape; budget allows {per_traj_cap} per trajectory",
            p.barrier_height() / p.kt()
        )));
    }
    let stepper = EmStepper::new(cfg.dt, p);
    let spec = EnsembleSpec::new(cfg.n_trajectories, cfg.master_seed, cfg.workers);
    let times = run_parallel_ensemble(spec, |_, rng| {
        let mut x = p.well_position();
        let mut k = 0u64;
        while side_of(x) == 1 {
            if k >= per_traj_cap {
                return Err(Error::Infeasible(format!(
                    "no escape within {per_traj_cap} steps"
                )));
            }
            x = stepper.step(x, p, rng.normal());
            k += 1;
        }
        Ok(k as f64 * cfg.dt)
    })?;
    let mut acc = Accumulator::default();
    times.into_iter().for_each(|t| acc.push(t));
    Ok(acc.finish())
}
