//! Dissipation bounds and the ice-cube-tray memory.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::info::{memory_entropy, nats_to_bits};
use crate::sde::BOLTZMANN;

/// An energy in joules together with its multiple of kT.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Energy {
    pub joules: f64,
    pub kt_multiple: f64,
}

impl Energy {
    /// `multiple` kT at `temperature` (SI).
    pub fn from_kt(multiple: f64, temperature: f64) -> Self {
        Self {
            joules: multiple * BOLTZMANN * temperature,
            kt_multiple: multiple,
        }
    }

    pub fn from_joules(joules: f64, temperature: f64) -> Self {
        Self {
            joules,
            kt_multiple: joules / (BOLTZMANN * temperature),
        }
    }
}

fn check_temperature(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("temperature must be positive, got {t}")))
    }
}

/// Minimum energy dissipated by a bit flip performed with error probability
/// `p_e`: `kT ln(1/p_e)`, for `0 < p_e <= 0.5`.
pub fn brillouin_min_dissipation(p_e: f64, temperature: f64) -> Result<Energy> {
    check_temperature(temperature)?;
    if !(p_e > 0.0 && p_e <= 0.5) {
        return Err(invalid(format!("p_e must be in (0, 0.5], got {p_e}")));
    }
    Ok(Energy::from_kt((1.0 / p_e).ln(), temperature))
}

/// Lowest erasure dissipation permitted by the self-entropy bound,
/// `-kT ln2 dS` with `dS` in bits.
pub fn anderson_bound(delta_s_bits: f64, temperature: f64) -> Result<Energy> {
    check_temperature(temperature)?;
    if !(delta_s_bits.is_finite() && delta_s_bits >= 0.0) {
        return Err(invalid(format!(
            "entropy change must be non-negative, got {delta_s_bits}"
        )));
    }
    Ok(Energy::from_kt(
        -std::f64::consts::LN_2 * delta_s_bits,
        temperature,
    ))
}

pub const ZERO_CELSIUS: f64 = 273.15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensibleHeat {
    /// Freezer temperature of the ice before erasure, degrees C.
    pub ice_initial_c: f64,
    /// Temperature the meltwater reaches, degrees C.
    pub water_final_c: f64,
    /// J/(g K)
    pub ice_specific_heat: f64,
    /// J/(g K)
    pub water_specific_heat: f64,
}

impl SensibleHeat {
    /// Ice from a -18 C freezer, meltwater warmed to the ambient temperature.
    pub fn for_ambient(ambient_temperature: f64) -> Self {
        Self {
            ice_initial_c: -18.0,
            water_final_c: ambient_temperature - ZERO_CELSIUS,
            ice_specific_heat: 2.1,
            water_specific_heat: 4.18,
        }
    }
}

/// One cube of an ice-cube tray used as a bit: frozen is 1, water at ambient
/// is the erased state. Erasing a 1 melts the cube and draws the latent heat
/// from the surroundings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IceCubeModel {
    pub volume_cm3: f64,
    pub ambient_temperature: f64,
    /// g/cm^3
    pub ice_density: f64,
    /// J/g
    pub latent_heat_fusion: f64,
    pub sensible_heat: Option<SensibleHeat>,
}

impl IceCubeModel {
    pub fn new(volume_cm3: f64, ambient_temperature: f64) -> Self {
        Self {
            volume_cm3,
            ambient_temperature,
            ice_density: 0.917,
            latent_heat_fusion: 333.55,
            sensible_heat: None,
        }
    }

    pub fn with_sensible_heat(mut self, sensible: SensibleHeat) -> Self {
        self.sensible_heat = Some(sensible);
        self
    }

    pub fn mass_grams(&self) -> f64 {
        self.ice_density * self.volume_cm3
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("volume", self.volume_cm3),
            ("ice density", self.ice_density),
            ("latent heat", self.latent_heat_fusion),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        check_temperature(self.ambient_temperature)?;
        if self.ambient_temperature <= ZERO_CELSIUS {
            return Err(Error::Infeasible(format!(
                "ambient {} K is at or below freezing: the cube never melts, so erasure does not happen",
                self.ambient_temperature
            )));
        }
        if let Some(s) = self.sensible_heat {
            if s.ice_initial_c > 0.0 || s.water_final_c < 0.0 {
                return Err(invalid(
                    "sensible heat needs ice at or below 0 C and water at or above 0 C",
                ));
            }
            if s.ice_specific_heat < 0.0 || s.water_specific_heat < 0.0 {
                return Err(invalid("specific heats must be non-negative"));
            }
        }
        Ok(())
    }

    /// Heat drawn from the environment when the cube melts, joules.
    pub fn cooling_joules(&self) -> Result<f64> {
        self.validate()?;
        let m = self.mass_grams();
        let mut q = m * self.latent_heat_fusion;
        if let Some(s) = self.sensible_heat {
            q += m * s.ice_specific_heat * (0.0 - s.ice_initial_c);
            q += m * s.water_specific_heat * s.water_final_c;
        }
        Ok(q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundComparison {
    pub computed_cooling: Energy,
    pub anderson_limit: Energy,
    pub violation_factor: f64,
}

pub fn ice_cube_erasure_energy(model: &IceCubeModel) -> Result<BoundComparison> {
    let q = model.cooling_joules()?;
    let t = model.ambient_temperature;
    let computed_cooling = Energy::from_joules(q, t);
    let anderson_limit = anderson_bound(1.0, t)?;
    Ok(BoundComparison {
        computed_cooling,
        anderson_limit,
        violation_factor: computed_cooling.joules / anderson_limit.joules.abs(),
    })
}

/// Memory state at one step of a protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MemoryState {
    /// Bit value known exactly by the operator.
    Deterministic(u8),
    /// After information-theoretic erasure: p(0) = p(1) = 1/2.
    Erased,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyEntry {
    pub state: MemoryState,
    pub entropy_nats: f64,
    pub entropy_bits: f64,
}

pub fn memory_entropy_audit(states: &[MemoryState]) -> Result<Vec<EntropyEntry>> {
    states
        .iter()
        .map(|&state| {
            let p0 = match state {
                MemoryState::Deterministic(0) => 1.0,
                MemoryState::Deterministic(1) => 0.0,
                MemoryState::Deterministic(b) => return Err(invalid(format!("bit value {b}"))),
                MemoryState::Erased => 0.5,
            };
            let nats = memory_entropy(p0)?;
            Ok(EntropyEntry {
                state,
                entropy_nats: nats,
                entropy_bits: nats_to_bits(nats),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn brillouin_values() {
        let t = 300.0;
        let half = brillouin_min_dissipation(0.5, t).unwrap();
        assert!((half.kt_multiple - LN_2).abs() < 1e-15);
        let quarter = brillouin_min_dissipation(0.25, t).unwrap();
        assert!((quarter.kt_multiple - 2.0 * half.kt_multiple).abs() < 1e-15);
        assert!(brillouin_min_dissipation(1e-300, t).unwrap().kt_multiple > 690.0);
        assert!(brillouin_min_dissipation(0.0, t).is_err());
        assert!(brillouin_min_dissipation(0.6, t).is_err());
        assert!(brillouin_min_dissipation(0.5, 0.0).is_err());
    }

    #[test]
    fn brillouin_decreasing() {
        let mut prev = f64::INFINITY;
        for i in 1..=500 {
            let e = brillouin_min_dissipation(i as f64 / 1000.0, 1.0)
                .unwrap()
                .kt_multiple;
            assert!(e < prev);
            prev = e;
        }
    }

    #[test]
    fn anderson_values() {
        assert!((anderson_bound(1.0, 300.0).unwrap().kt_multiple + LN_2).abs() < 1e-15);
        assert_eq!(anderson_bound(0.0, 300.0).unwrap().joules, 0.0);
        assert_eq!(
            anderson_bound(2.0, 300.0).unwrap().kt_multiple,
            2.0 * anderson_bound(1.0, 300.0).unwrap().kt_multiple
        );
        assert!(anderson_bound(-1.0, 300.0).is_err());
    }

    #[test]
    fn energies_are_unit_coherent() {
        let cases = [
            (brillouin_min_dissipation(0.1, 290.0).unwrap(), 290.0),
            (anderson_bound(1.5, 310.0).unwrap(), 310.0),
            (
                ice_cube_erasure_energy(&IceCubeModel::new(10.0, 300.0))
                    .unwrap()
                    .computed_cooling,
                300.0,
            ),
        ];
        for (e, t) in cases {
            let rel = (e.kt_multiple * BOLTZMANN * t - e.joules).abs() / e.joules.abs();
            assert!(rel <= 4.0 * f64::EPSILON, "{e:?}");
        }
    }

    #[test]
    fn ice_cube_ten_cm3() {
        let cmp = ice_cube_erasure_energy(&IceCubeModel::new(10.0, 300.0)).unwrap();
        let oracle_j = 0.917 * 10.0 * 333.55;
        assert!((cmp.computed_cooling.joules - oracle_j).abs() < 1e-9);
        assert!((cmp.computed_cooling.kt_multiple / 7.4e23 - 1.0).abs() < 0.01);
        assert!(cmp.violation_factor > 1e24);
    }

    #[test]
    fn ice_cube_linear_in_volume() {
        let q = |v: f64| IceCubeModel::new(v, 300.0).cooling_joules().unwrap();
        assert!((q(1e-3) * 1e4 - q(10.0)).abs() < 1e-9 * q(10.0));
        // Smallest cube still beating the bound: kT ln2 / (rho L_f) ~ 1e-23 cm^3.
        let tiny = ice_cube_erasure_energy(&IceCubeModel::new(1e-21, 300.0)).unwrap();
        assert!(tiny.violation_factor > 1.0);
    }

    #[test]
    fn sub_freezing_ambient_is_rejected() {
        let err = ice_cube_erasure_energy(&IceCubeModel::new(10.0, 270.0)).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
        assert!(ice_cube_erasure_energy(&IceCubeModel::new(10.0, ZERO_CELSIUS)).is_err());
        assert!(ice_cube_erasure_energy(&IceCubeModel::new(0.0, 300.0)).is_err());
    }

    #[test]
    fn sensible_heat_only_adds() {
        let base = IceCubeModel::new(10.0, 300.0);
        let warm = base.with_sensible_heat(SensibleHeat::for_ambient(300.0));
        let a = ice_cube_erasure_energy(&base).unwrap();
        let b = ice_cube_erasure_energy(&warm).unwrap();
        assert!(b.computed_cooling.joules > a.computed_cooling.joules);
        assert!(b.violation_factor > a.violation_factor);
    }

    #[test]
    fn entropy_audit() {
        use MemoryState::*;
        let trace = [
            Deterministic(1),
            Deterministic(1),
            Deterministic(0),
            Deterministic(0),
        ];
        let audit = memory_entropy_audit(&trace).unwrap();
        assert!(audit.iter().all(|e| e.entropy_nats == 0.0));
        let erased = memory_entropy_audit(&[Erased]).unwrap();
        assert!((erased[0].entropy_bits - 1.0).abs() < 1e-15);
        assert!(memory_entropy_audit(&[]).unwrap().is_empty());
        assert!(memory_entropy_audit(&[Deterministic(3)]).is_err());
    }
}
