//! Python bindings for the erasure simulator.
//!
//! The module is named `itesim`. Physical parameter sets and random streams
//! are classes. Single-trajectory operations, closed-form results and
//! ensemble runs are functions that return floats or plain dicts. Ensemble
//! runs release the GIL while they work.

use ite_core::bounds::{self, IceCubeModel, SensibleHeat};
use ite_core::capacitor::{self, ErasureConfig, WriteOptions};
use ite_core::config::ExperimentConfig;
use ite_core::doublewell::{self, EscapeConfig, RelaxConfig, RelaxationSeries};
use ite_core::experiments::Experiment;
use ite_core::info;
use ite_core::rng::RngStream;
use ite_core::sde::{self, UnitSystem};
use ite_core::stats::MeanEstimate;
use ite_core::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_) | Error::Config(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn units_from(name: &str) -> PyResult<UnitSystem> {
    match name {
        "reduced" => Ok(UnitSystem::Reduced),
        "si" => Ok(UnitSystem::Si),
        other => Err(PyValueError::new_err(format!(
            "unknown unit system {other:?} (expected \"reduced\" or \"si\")"
        ))),
    }
}

fn units_name(units: UnitSystem) -> &'static str {
    match units {
        UnitSystem::Reduced => "reduced",
        UnitSystem::Si => "si",
    }
}

/// Counter-based random stream: `Rng(seed, stream)` always yields the same
/// sequence, whichever thread or process draws from it.
#[pyclass(name = "Rng", module = "itesim")]
struct PyRng {
    inner: RngStream,
}

#[pymethods]
impl PyRng {
    #[new]
    #[pyo3(signature = (master_seed, stream_index = 0))]
    fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            inner: RngStream::new(master_seed, stream_index),
        }
    }

    fn normal(&mut self) -> f64 {
        self.inner.normal()
    }

    fn uniform(&mut self) -> f64 {
        self.inner.uniform()
    }

    fn bit(&mut self) -> u8 {
        self.inner.bit()
    }

    #[getter]
    fn master_seed(&self) -> u64 {
        self.inner.master_seed()
    }

    #[getter]
    fn stream_index(&self) -> u64 {
        self.inner.stream_index()
    }
}

/// RC memory cell. Reduced units set kT = C = 1 so that tau = R.
#[pyclass(name = "CellParams", module = "itesim", frozen)]
struct PyCellParams {
    inner: sde::CellParams,
}

#[pymethods]
impl PyCellParams {
    #[new]
    #[pyo3(signature = (temperature, resistance, capacitance, units = "si"))]
    fn new(temperature: f64, resistance: f64, capacitance: f64, units: &str) -> PyResult<Self> {
        let inner = sde::CellParams::new(temperature, resistance, capacitance, units_from(units)?)
            .map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (tau = 1.0))]
    fn reduced(tau: f64) -> PyResult<Self> {
        Ok(Self {
            inner: sde::CellParams::reduced(tau).map_err(to_py)?,
        })
    }

    #[getter]
    fn temperature(&self) -> f64 {
        self.inner.temperature()
    }

    #[getter]
    fn resistance(&self) -> f64 {
        self.inner.resistance()
    }

    #[getter]
    fn capacitance(&self) -> f64 {
        self.inner.capacitance()
    }

    #[getter]
    fn units(&self) -> &'static str {
        units_name(self.inner.units())
    }

    #[getter]
    fn tau(&self) -> f64 {
        self.inner.tau()
    }

    #[getter]
    fn kt(&self) -> f64 {
        self.inner.kt()
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma_st()
    }

    fn energy(&self, v: f64) -> f64 {
        self.inner.energy(v)
    }

    fn __repr__(&self) -> String {
        format!(
            "CellParams(temperature={}, resistance={}, capacitance={}, units={:?})",
            self.inner.temperature(),
            self.inner.resistance(),
            self.inner.capacitance(),
            units_name(self.inner.units())
        )
    }
}

/// Quartic double well `U = E((x/x0)^2 - 1)^2` with overdamped dynamics.
#[pyclass(name = "DoubleWellParams", module = "itesim", frozen)]
struct PyDoubleWellParams {
    inner: doublewell::DoubleWellParams,
}

#[pymethods]
impl PyDoubleWellParams {
    #[new]
    #[pyo3(signature = (barrier_height, well_position = 1.0, damping = 1.0, temperature = 1.0, units = "reduced"))]
    fn new(
        barrier_height: f64,
        well_position: f64,
        damping: f64,
        temperature: f64,
        units: &str,
    ) -> PyResult<Self> {
        let inner = doublewell::DoubleWellParams::new(
            barrier_height,
            well_position,
            damping,
            temperature,
            units_from(units)?,
        )
        .map_err(to_py)?;
        Ok(Self { inner })
    }

    /// Reduced units with unit well position and damping.
    #[staticmethod]
    fn reduced(barrier_kt: f64) -> PyResult<Self> {
        Ok(Self {
            inner: doublewell::DoubleWellParams::reduced(barrier_kt).map_err(to_py)?,
        })
    }

    /// Choose the well position so that `U''(x0)` equals `curvature`.
    #[staticmethod]
    #[pyo3(signature = (barrier_height, curvature, damping = 1.0, temperature = 1.0, units = "reduced"))]
    fn with_well_curvature(
        barrier_height: f64,
        curvature: f64,
        damping: f64,
        temperature: f64,
        units: &str,
    ) -> PyResult<Self> {
        let inner = doublewell::DoubleWellParams::with_well_curvature(
            barrier_height,
            curvature,
            damping,
            temperature,
            units_from(units)?,
        )
        .map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn barrier_height(&self) -> f64 {
        self.inner.barrier_height()
    }

    #[getter]
    fn well_position(&self) -> f64 {
        self.inner.well_position()
    }

    #[getter]
    fn damping(&self) -> f64 {
        self.inner.damping()
    }

    #[getter]
    fn temperature(&self) -> f64 {
        self.inner.temperature()
    }

    #[getter]
    fn kt(&self) -> f64 {
        self.inner.kt()
    }

    fn potential(&self, x: f64) -> f64 {
        self.inner.potential(x)
    }

    fn force(&self, x: f64) -> f64 {
        self.inner.force(x)
    }

    fn stability_bound(&self) -> f64 {
        self.inner.stability_bound()
    }

    fn kramers_barrier_time(&self) -> f64 {
        self.inner.kramers_barrier_time()
    }

    fn __repr__(&self) -> String {
        format!(
            "DoubleWellParams(barrier_height={}, well_position={}, damping={}, temperature={})",
            self.inner.barrier_height(),
            self.inner.well_position(),
            self.inner.damping(),
            self.inner.temperature()
        )
    }
}

fn mean_dict<'py>(py: Python<'py>, m: &MeanEstimate) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("mean", m.mean)?;
    d.set_item("std_error", m.std_error)?;
    d.set_item("n", m.n)?;
    Ok(d)
}

fn series_dict<'py>(py: Python<'py>, s: &RelaxationSeries) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("times", s.times.clone())?;
    d.set_item("p1", s.p1.clone())?;
    d.set_item("se_p1", s.se_p1.clone())?;
    d.set_item(
        "mean_u",
        s.mean_u.iter().map(|m| m.mean).collect::<Vec<_>>(),
    )?;
    d.set_item(
        "se_u",
        s.mean_u.iter().map(|m| m.std_error).collect::<Vec<_>>(),
    )?;
    Ok(d)
}

/// One exact step of the cell's Ornstein-Uhlenbeck voltage process.
#[pyfunction]
fn ou_step(v: f64, dt: f64, cell: &PyCellParams, rng: &mut PyRng) -> PyResult<f64> {
    sde::ou_step(v, dt, &cell.inner, &mut rng.inner).map_err(to_py)
}

/// A voltage drawn from the equilibrium distribution.
#[pyfunction]
fn ou_sample_stationary(cell: &PyCellParams, rng: &mut PyRng) -> f64 {
    sde::ou_sample_stationary(&cell.inner, &mut rng.inner)
}

/// Write `bit` by waiting for the voltage to reach `+-u0`.
#[pyfunction]
#[pyo3(signature = (bit, u0, cell, rng, dt = None, max_duration = None))]
fn write_bit<'py>(
    py: Python<'py>,
    bit: u8,
    u0: f64,
    cell: &PyCellParams,
    rng: &mut PyRng,
    dt: Option<f64>,
    max_duration: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let tau = cell.inner.tau();
    let opts = WriteOptions::new(
        dt.unwrap_or(tau / 100.0),
        max_duration.unwrap_or(1000.0 * tau),
    );
    let r = capacitor::write_bit(bit, u0, &cell.inner, &opts, &mut rng.inner).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("bit_written", r.bit_written)?;
    d.set_item("target_level", r.target_level)?;
    d.set_item("duration", r.duration)?;
    d.set_item("v_start", r.v_start)?;
    d.set_item("v_final", r.v_final)?;
    d.set_item("n_samples", r.n_samples)?;
    d.set_item("bath_heat", r.bath_heat)?;
    d.set_item("control_cost_lower_bound", r.control_cost_lower_bound)?;
    Ok(d)
}

/// Let the cell relax with no control for `duration`.
#[pyfunction]
#[pyo3(signature = (v0, duration, cell, rng, dt = None))]
fn erase<'py>(
    py: Python<'py>,
    v0: f64,
    duration: f64,
    cell: &PyCellParams,
    rng: &mut PyRng,
    dt: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let dt = dt.unwrap_or(cell.inner.tau() / 100.0);
    let r = capacitor::erase(v0, duration, &cell.inner, dt, &mut rng.inner).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("v_start", r.v_start)?;
    d.set_item("v_final", r.v_final)?;
    d.set_item("duration", r.duration)?;
    d.set_item("bath_heat", r.bath_heat)?;
    Ok(d)
}

/// Sign readout: non-negative voltages read as 1.
#[pyfunction]
fn read_bit(v: f64) -> PyResult<u8> {
    capacitor::read_bit(v).map_err(to_py)
}

#[pyfunction]
fn erase_dissipation_theory(u0: f64, cell: &PyCellParams) -> PyResult<f64> {
    capacitor::erase_dissipation_theory(u0, &cell.inner).map_err(to_py)
}

#[pyfunction]
fn write_dissipation_theory(u0: f64, cell: &PyCellParams) -> PyResult<f64> {
    capacitor::write_dissipation_theory(u0, &cell.inner).map_err(to_py)
}

/// Read-error probability after erasing a `+-u0` bit for time `t`.
#[pyfunction]
fn partial_erase_error_prob(u0: f64, t: f64, cell: &PyCellParams) -> PyResult<f64> {
    capacitor::partial_erase_error_prob(u0, t, &cell.inner).map_err(to_py)
}

/// Bits carried by a binary symmetric channel with error probability `p_e`.
#[pyfunction]
fn bit_information(p_e: f64) -> PyResult<f64> {
    info::bit_information(p_e).map_err(to_py)
}

/// Shannon entropy of a one-bit memory, in nats.
#[pyfunction]
fn memory_entropy(p0: f64) -> PyResult<f64> {
    info::memory_entropy(p0).map_err(to_py)
}

/// Error count and Wilson 95% interval for a sent/received bit pair.
#[pyfunction]
fn estimate_error_prob<'py>(
    py: Python<'py>,
    sent: Vec<u8>,
    received: Vec<u8>,
) -> PyResult<Bound<'py, PyDict>> {
    let s = info::estimate_error_prob(&sent, &received).map_err(to_py)?;
    let r = info::remaining_information(&s);
    let d = PyDict::new(py);
    d.set_item("trials", s.trials)?;
    d.set_item("errors", s.errors)?;
    d.set_item("p_e_hat", s.p_e_hat)?;
    d.set_item("ci_low", s.ci_low)?;
    d.set_item("ci_high", s.ci_high)?;
    d.set_item("info_bits", r.bits)?;
    d.set_item("info_low", r.low)?;
    d.set_item("info_high", r.high)?;
    Ok(d)
}

/// Minimum energy to make one decision with error probability `p_e`, as
/// `(joules, kT multiple)`.
#[pyfunction]
fn brillouin_min_dissipation(p_e: f64, temperature: f64) -> PyResult<(f64, f64)> {
    let e = bounds::brillouin_min_dissipation(p_e, temperature).map_err(to_py)?;
    Ok((e.joules, e.kt_multiple))
}

/// Lower bound on erasure dissipation for an entropy change in bits, as
/// `(joules, kT multiple)`.
#[pyfunction]
fn anderson_bound(delta_s_bits: f64, temperature: f64) -> PyResult<(f64, f64)> {
    let e = bounds::anderson_bound(delta_s_bits, temperature).map_err(to_py)?;
    Ok((e.joules, e.kt_multiple))
}

/// Heat drawn from the surroundings by melting an ice cube used as a memory.
#[pyfunction]
#[pyo3(signature = (volume_cm3, ambient_temperature, sensible_heat = false))]
fn ice_cube_erasure_energy<'py>(
    py: Python<'py>,
    volume_cm3: f64,
    ambient_temperature: f64,
    sensible_heat: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let mut model = IceCubeModel::new(volume_cm3, ambient_temperature);
    if sensible_heat {
        model = model.with_sensible_heat(SensibleHeat::for_ambient(ambient_temperature));
    }
    let c = bounds::ice_cube_erasure_energy(&model).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("Q_joule", c.computed_cooling.joules)?;
    d.set_item("Q_kT", c.computed_cooling.kt_multiple)?;
    d.set_item("bound_joule", c.anderson_limit.joules)?;
    d.set_item("bound_kT", c.anderson_limit.kt_multiple)?;
    d.set_item("violation_factor", c.violation_factor)?;
    Ok(d)
}

/// Write random bits and erase them through an ascending grid of durations.
/// Returns one dict per duration.
#[pyfunction]
#[pyo3(signature = (cell, u0, durations, n_trajectories = 100_000, master_seed = 2016, workers = 1, dt = None))]
#[allow(clippy::too_many_arguments)]
fn run_erasure_experiment<'py>(
    py: Python<'py>,
    cell: &PyCellParams,
    u0: f64,
    durations: Vec<f64>,
    n_trajectories: usize,
    master_seed: u64,
    workers: usize,
    dt: Option<f64>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let mut cfg = ErasureConfig::new(cell.inner, u0);
    cfg.durations = durations;
    cfg.n_trajectories = n_trajectories;
    cfg.master_seed = master_seed;
    cfg.workers = workers;
    if let Some(dt) = dt {
        cfg.dt = dt;
    }
    let reports = py
        .detach(|| capacitor::run_erasure_experiment(&cfg))
        .map_err(to_py)?;
    reports
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("duration", r.duration)?;
            d.set_item("n_trajectories", r.n_trajectories)?;
            d.set_item("mean_q_env", r.mean_q_env.mean)?;
            d.set_item("se_q_env", r.mean_q_env.std_error)?;
            d.set_item("theory_q_env", r.theory_q_env)?;
            d.set_item("p_e_theory", r.p_e_theory)?;
            d.set_item("p_e_hat", r.channel.p_e_hat)?;
            d.set_item("ci_low", r.channel.ci_low)?;
            d.set_item("ci_high", r.channel.ci_high)?;
            d.set_item("info_bits", r.remaining_information.bits)?;
            Ok(d)
        })
        .collect()
}

fn relax_config(
    params: &PyDoubleWellParams,
    side: u8,
    t_total: f64,
    n_trajectories: usize,
    master_seed: u64,
    workers: usize,
    dt: Option<f64>,
) -> RelaxConfig {
    let mut cfg = RelaxConfig::new(params.inner, side, t_total, n_trajectories);
    cfg.master_seed = master_seed;
    cfg.workers = workers;
    if let Some(dt) = dt {
        cfg.dt = dt;
    }
    cfg
}

/// Occupation and mean energy of an ensemble started in one well.
#[pyfunction]
#[pyo3(signature = (params, side = 1, t_total = 50.0, n_trajectories = 10_000, master_seed = 2016, workers = 1, dt = None))]
#[allow(clippy::too_many_arguments)]
fn relax_ensemble<'py>(
    py: Python<'py>,
    params: &PyDoubleWellParams,
    side: u8,
    t_total: f64,
    n_trajectories: usize,
    master_seed: u64,
    workers: usize,
    dt: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = relax_config(
        params,
        side,
        t_total,
        n_trajectories,
        master_seed,
        workers,
        dt,
    );
    let s = py
        .detach(|| doublewell::relax_ensemble(&cfg))
        .map_err(to_py)?;
    series_dict(py, &s)
}

/// Relaxation with the bath raised to `t_hot`. Adds the mean energy the
/// particle absorbs.
#[pyfunction]
#[pyo3(signature = (params, t_hot, side = 1, t_total = 50.0, n_trajectories = 10_000, master_seed = 2016, workers = 1, dt = None))]
#[allow(clippy::too_many_arguments)]
fn heated_erase<'py>(
    py: Python<'py>,
    params: &PyDoubleWellParams,
    t_hot: f64,
    side: u8,
    t_total: f64,
    n_trajectories: usize,
    master_seed: u64,
    workers: usize,
    dt: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = relax_config(
        params,
        side,
        t_total,
        n_trajectories,
        master_seed,
        workers,
        dt,
    );
    let h = py
        .detach(|| doublewell::heated_erase(&cfg, t_hot))
        .map_err(to_py)?;
    let d = series_dict(py, &h.series)?;
    d.set_item("t_hot", h.t_hot)?;
    d.set_item("absorbed", mean_dict(py, &h.absorbed)?)?;
    Ok(d)
}

/// Mean first-passage time from the bottom of a well to the barrier top.
#[pyfunction]
#[pyo3(signature = (params, n_trajectories = 10_000, master_seed = 2016, workers = 1, dt = None))]
fn measure_escape_time<'py>(
    py: Python<'py>,
    params: &PyDoubleWellParams,
    n_trajectories: usize,
    master_seed: u64,
    workers: usize,
    dt: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = EscapeConfig::new(params.inner, n_trajectories);
    cfg.master_seed = master_seed;
    cfg.workers = workers;
    if let Some(dt) = dt {
        cfg.dt = dt;
    }
    let m = py
        .detach(|| doublewell::measure_escape_time(&cfg))
        .map_err(to_py)?;
    mean_dict(py, &m)
}

/// Column names, data rows and the parsed JSON summary.
type ExperimentOutput<'py> = (Vec<String>, Vec<Vec<f64>>, Bound<'py, PyAny>);

/// Run a named experiment exactly as the command-line tool would. Config
/// keys are passed as keyword arguments, with string values in the same
/// syntax as a config file. Returns `(header, rows, summary)`.
#[pyfunction]
#[pyo3(signature = (name, **overrides))]
fn run_experiment<'py>(
    py: Python<'py>,
    name: &str,
    overrides: Option<&Bound<'py, PyDict>>,
) -> PyResult<ExperimentOutput<'py>> {
    let experiment = Experiment::ALL
        .iter()
        .copied()
        .find(|e| e.name() == name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown experiment {name:?}")))?;
    let mut cfg = ExperimentConfig::default();
    if let Some(kw) = overrides {
        for (k, v) in kw.iter() {
            let key: String = k.extract()?;
            let text = v.str()?.to_string();
            cfg.set(&key, &text).map_err(to_py)?;
        }
    }
    cfg.validate().map_err(to_py)?;
    let table = py.detach(|| experiment.run(&cfg)).map_err(to_py)?;
    let header = table.header().iter().map(|s| s.to_string()).collect();
    let summary = py
        .import("json")?
        .call_method1("loads", (table.summary.to_string(),))?;
    Ok((header, table.rows, summary))
}

/// Names accepted by `run_experiment`.
#[pyfunction]
fn experiment_names() -> Vec<&'static str> {
    Experiment::ALL.iter().map(|e| e.name()).collect()
}

#[pymodule]
pub fn itesim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("BOLTZMANN", sde::BOLTZMANN)?;
    m.add_class::<PyRng>()?;
    m.add_class::<PyCellParams>()?;
    m.add_class::<PyDoubleWellParams>()?;
    m.add_function(wrap_pyfunction!(ou_step, m)?)?;
    m.add_function(wrap_pyfunction!(ou_sample_stationary, m)?)?;
    m.add_function(wrap_pyfunction!(write_bit, m)?)?;
    m.add_function(wrap_pyfunction!(erase, m)?)?;
    m.add_function(wrap_pyfunction!(read_bit, m)?)?;
    m.add_function(wrap_pyfunction!(erase_dissipation_theory, m)?)?;
    m.add_function(wrap_pyfunction!(write_dissipation_theory, m)?)?;
    m.add_function(wrap_pyfunction!(partial_erase_error_prob, m)?)?;
    m.add_function(wrap_pyfunction!(bit_information, m)?)?;
    m.add_function(wrap_pyfunction!(memory_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_error_prob, m)?)?;
    m.add_function(wrap_pyfunction!(brillouin_min_dissipation, m)?)?;
    m.add_function(wrap_pyfunction!(anderson_bound, m)?)?;
    m.add_function(wrap_pyfunction!(ice_cube_erasure_energy, m)?)?;
    m.add_function(wrap_pyfunction!(run_erasure_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(relax_ensemble, m)?)?;
    m.add_function(wrap_pyfunction!(heated_erase, m)?)?;
    m.add_function(wrap_pyfunction!(measure_escape_time, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(experiment_names, m)?)?;
    Ok(())
}
