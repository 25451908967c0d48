//! Flat `key = value` experiment configuration.
//!
//! Every key can come from a config file (`#` starts a comment) or from the
//! matching command-line flag; flags win. The resolved configuration is
//! written back in the same format next to each run's outputs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::sde::UnitSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EscapeGeometry {
    /// Hold the well curvature fixed and move the minima with the barrier.
    Curvature,
    /// Hold the well position fixed.
    Position,
}

/// Conversion between config text and typed values. `Display` of `f64` is the
/// shortest string that parses back to the same value, so configs round-trip.
pub trait ConfigValue: Sized {
    fn parse_value(text: &str) -> std::result::Result<Self, String>;
    fn render(&self) -> String;
}

macro_rules! display_value {
    ($($t:ty),*) => {$(
        impl ConfigValue for $t {
            fn parse_value(text: &str) -> std::result::Result<Self, String> {
                text.parse().map_err(|e| format!("{e}"))
            }
            fn render(&self) -> String {
                self.to_string()
            }
        }
    )*};
}

display_value!(f64, u64, usize, u8, bool);

impl ConfigValue for String {
    fn parse_value(text: &str) -> std::result::Result<Self, String> {
        Ok(text.to_string())
    }
    fn render(&self) -> String {
        self.clone()
    }
}

impl ConfigValue for PathBuf {
    fn parse_value(text: &str) -> std::result::Result<Self, String> {
        Ok(PathBuf::from(text))
    }
    fn render(&self) -> String {
        self.display().to_string()
    }
}

impl ConfigValue for Vec<f64> {
    fn parse_value(text: &str) -> std::result::Result<Self, String> {
        text.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|e| format!("{s:?}: {e}")))
            .collect()
    }
    fn render(&self) -> String {
        self.iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl<T: ConfigValue> ConfigValue for Option<T> {
    fn parse_value(text: &str) -> std::result::Result<Self, String> {
        if text == "auto" {
            Ok(None)
        } else {
            T::parse_value(text).map(Some)
        }
    }
    fn render(&self) -> String {
        self.as_ref().map_or_else(|| "auto".to_string(), T::render)
    }
}

impl ConfigValue for UnitSystem {
    fn parse_value(text: &str) -> std::result::Result<Self, String> {
        match text.to_ascii_lowercase().as_str() {
            "reduced" => Ok(UnitSystem::Reduced),
            "si" => Ok(UnitSystem::Si),
            other => Err(format!("expected reduced or si, got {other:?}")),
        }
    }
    fn render(&self) -> String {
        match self {
            UnitSystem::Reduced => "reduced".into(),
            UnitSystem::Si => "si".into(),
        }
    }
}

impl ConfigValue for EscapeGeometry {
    fn parse_value(text: &str) -> std::result::Result<Self, String> {
        match text {
            "curvature" => Ok(EscapeGeometry::Curvature),
            "position" => Ok(EscapeGeometry::Position),
            other => Err(format!("expected curvature or position, got {other:?}")),
        }
    }
    fn render(&self) -> String {
        match self {
            EscapeGeometry::Curvature => "curvature".into(),
            EscapeGeometry::Position => "position".into(),
        }
    }
}

/// Logarithmic erase-duration grid in units of tau: 0, then 19 points from
/// 0.1 to 20.
pub fn default_duration_grid() -> Vec<f64> {
    let (lo, hi, n) = (0.1f64, 20.0f64, 19);
    std::iter::once(0.0)
        .chain((0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)))
        .collect()
}

macro_rules! experiment_config {
    ($( $field:ident : $ty:ty = $default:expr, $flag:literal, $help:literal; )*) => {
        #[derive(Debug, Clone, PartialEq)]
        pub struct ExperimentConfig {
            $( pub $field: $ty, )*
        }

        impl Default for ExperimentConfig {
            fn default() -> Self {
                Self { $( $field: $default, )* }
            }
        }

        impl ExperimentConfig {
            pub const KEYS: &'static [&'static str] = &[$( stringify!($field), )*];

            pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
                match key {
                    $( stringify!($field) => {
                        self.$field = <$ty as ConfigValue>::parse_value(value)
                            .map_err(|e| Error::Config(format!("{key} = {value:?}: {e}")))?;
                    } )*
                    other => return Err(Error::Config(format!("unknown key {other:?}"))),
                }
                Ok(())
            }

            /// Resolved `(key, value)` pairs in declaration order.
            pub fn entries(&self) -> Vec<(&'static str, String)> {
                vec![$( (stringify!($field), ConfigValue::render(&self.$field)), )*]
            }
        }

        /// Command-line overrides, one flag per config key.
        #[derive(Debug, Clone, Default, clap::Args)]
        pub struct ConfigFlags {
            /// Flat key = value config file; flags override its values.
            #[arg(long, global = true, value_name = "FILE")]
            pub config: Option<PathBuf>,
            $(
                #[arg(long = $flag, help = $help, global = true, value_name = "VALUE")]
                pub $field: Option<String>,
            )*
        }

        impl ConfigFlags {
            fn overrides(&self) -> Vec<(&'static str, &str)> {
                let mut out = Vec::new();
                $( if let Some(v) = &self.$field { out.push((stringify!($field), v.as_str())); } )*
                out
            }
        }
    };
}

experiment_config! {
    unit_mode: UnitSystem = UnitSystem::Reduced, "unit-mode", "reduced (kT = C = tau = 1) or si";
    master_seed: u64 = 2016, "seed", "master seed for all random streams";
    worker_count: usize = default_workers(), "workers", "number of worker threads";
    n_trajectories: Option<usize> = None, "trajectories", "ensemble size (auto: per-command default)";
    output_dir: PathBuf = PathBuf::from("."), "output-dir", "directory for CSV and manifest files";

    temperature_k: f64 = 300.0, "temperature-K", "ambient temperature in SI mode";
    resistance_ohm: f64 = 1.0e6, "resistance-ohm", "cell resistance in SI mode";
    capacitance_f: f64 = 1.0e-15, "capacitance-F", "cell capacitance in SI mode";
    u0_sigma: Vec<f64> = vec![0.5], "u0-sigma", "written level(s) as multiples of sigma";
    dt_tau: f64 = 0.01, "dt-tau", "capacitor time step as a fraction of tau (at most 0.01)";
    erase_duration_tau: f64 = 20.0, "erase-duration-tau", "erase duration in tau";
    durations_tau: Vec<f64> = default_duration_grid(), "durations-tau", "mi-curve erase durations in tau, ascending";
    max_write_tau: f64 = 1000.0, "max-write-tau", "abort a write after this many tau";
    decision_error_prob: f64 = 0.5, "decision-error-prob", "error probability of each write decision";

    barrier_kt: f64 = 2.0, "barrier-kT", "double-well barrier height in kT";
    well_position: f64 = 1.0, "well-position", "double-well minimum position";
    damping: f64 = 1.0, "damping", "double-well friction coefficient";
    side: u8 = 1, "side", "initial well (1: x > 0, 0: x < 0)";
    t_total: f64 = 50.0, "t-total", "double-well simulated time";
    dt_fraction: f64 = crate::doublewell::DEFAULT_STEP_FRACTION, "dt-fraction", "double-well step as a fraction of the stability bound";
    hot_temperature_ratio: Option<f64> = None, "hot-ratio", "heated erasure: T_hot / T (auto: barrier_kT, so kT_hot = E)";
    escape_barriers_kt: Vec<f64> = vec![1.0, 2.0, 3.0, 4.0], "escape-barriers-kT", "barriers for the escape-time scan";
    escape_geometry: EscapeGeometry = EscapeGeometry::Curvature, "escape-geometry", "curvature or position";
    well_curvature: f64 = 16.0, "well-curvature", "U''(x0) for the curvature geometry";
    max_total_steps: u64 = 4_000_000_000, "max-total-steps", "escape-time step budget";

    p_e: f64 = 0.5, "p-e", "error probability";
    p0: f64 = 0.5, "p0", "probability of bit value 0";
    delta_s_bits: f64 = 1.0, "delta-s-bits", "self-entropy change in bits";
    volume_cm3: f64 = 10.0, "volume-cm3", "ice cube volume";
    ambient_k: f64 = 300.0, "ambient-K", "ice cube ambient temperature";
    ice_density: f64 = 0.917, "ice-density", "g/cm^3";
    latent_heat: f64 = 333.55, "latent-heat", "J/g";
    sensible_heat: bool = false, "sensible-heat", "include sensible heat of ice and meltwater";
    ice_initial_c: f64 = -18.0, "ice-initial-C", "freezer temperature of the ice";
    water_final_c: Option<f64> = None, "water-final-C", "meltwater final temperature (auto: ambient)";
    ice_specific_heat: f64 = 2.1, "ice-specific-heat", "J/(g K)";
    water_specific_heat: f64 = 4.18, "water-specific-heat", "J/(g K)";
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Environment variable overriding the default output directory.
pub const OUTPUT_DIR_ENV: &str = "ITESIM_OUTPUT_DIR";

impl ExperimentConfig {
    pub fn parse_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn load_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        self.parse_text(&text)
    }

    /// Defaults, then the environment output-directory override, then the
    /// config file, then flags.
    pub fn resolve(flags: &ConfigFlags) -> Result<Self> {
        let mut cfg = Self::default();
        if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
            cfg.output_dir = PathBuf::from(dir);
        }
        if let Some(path) = &flags.config {
            cfg.load_file(path)?;
        }
        for (key, value) in flags.overrides() {
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("temperature_k", self.temperature_k),
            ("resistance_ohm", self.resistance_ohm),
            ("capacitance_f", self.capacitance_f),
            ("dt_tau", self.dt_tau),
            ("max_write_tau", self.max_write_tau),
            ("barrier_kt", self.barrier_kt),
            ("well_position", self.well_position),
            ("damping", self.damping),
            ("t_total", self.t_total),
            ("dt_fraction", self.dt_fraction),
            (
                "hot_temperature_ratio",
                self.hot_temperature_ratio.unwrap_or(1.0),
            ),
            ("well_curvature", self.well_curvature),
            ("volume_cm3", self.volume_cm3),
            ("ambient_k", self.ambient_k),
            ("ice_density", self.ice_density),
            ("latent_heat", self.latent_heat),
        ];
        for (key, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{key} must be positive, got {v}")));
            }
        }
        if self.dt_tau > 0.01 {
            return Err(Error::Config(format!(
                "dt_tau must be at most 0.01, got {}",
                self.dt_tau
            )));
        }
        if self.dt_fraction > 1.0 {
            return Err(Error::Config("dt_fraction must be at most 1".into()));
        }
        if !(self.erase_duration_tau.is_finite() && self.erase_duration_tau >= 0.0) {
            return Err(Error::Config(
                "erase_duration_tau must be non-negative".into(),
            ));
        }
        if self.u0_sigma.iter().any(|u| !(u.is_finite() && *u > 0.0)) {
            return Err(Error::Config("u0_sigma values must be positive".into()));
        }
        if self
            .durations_tau
            .iter()
            .any(|d| !(d.is_finite() && *d >= 0.0))
            || self.durations_tau.windows(2).any(|w| w[1] < w[0])
        {
            return Err(Error::Config(
                "durations_tau must be non-negative and sorted ascending".into(),
            ));
        }
        if self
            .escape_barriers_kt
            .iter()
            .any(|b| !(b.is_finite() && *b > 0.0))
        {
            return Err(Error::Config(
                "escape_barriers_kt values must be positive".into(),
            ));
        }
        if self.worker_count == 0 {
            return Err(Error::Config("worker_count must be at least 1".into()));
        }
        if self.n_trajectories == Some(0) {
            return Err(Error::Config("n_trajectories must be at least 1".into()));
        }
        if self.side > 1 {
            return Err(Error::Config("side must be 0 or 1".into()));
        }
        Ok(())
    }

    pub fn trajectories_or(&self, default: usize) -> usize {
        self.n_trajectories.unwrap_or(default)
    }
}
