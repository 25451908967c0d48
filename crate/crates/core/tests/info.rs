use ite_core::bounds::{
    brillouin_min_dissipation, ice_cube_erasure_energy, IceCubeModel, SensibleHeat,
};
use ite_core::info::{bit_information, estimate_error_prob, memory_entropy, remaining_information};
use ite_core::rng::make_stream;
use proptest::prelude::*;

#[test]
fn wilson_coverage_on_a_synthetic_channel() {
    let q = 0.2;
    let reps = 1000;
    let mut covered = 0;
    let mut mean = 0.0;
    for r in 0..reps {
        let mut rng = make_stream(77, r);
        let sent: Vec<u8> = (0..1000).map(|_| rng.bit()).collect();
        let received: Vec<u8> = sent
            .iter()
            .map(|&b| if rng.uniform() < q { 1 - b } else { b })
            .collect();
        let s = estimate_error_prob(&sent, &received).unwrap();
        covered += usize::from(s.ci_low <= q && q <= s.ci_high);
        mean += s.p_e_hat / reps as f64;
    }
    let coverage = covered as f64 / reps as f64;
    assert!((0.93..=0.97).contains(&coverage), "coverage {coverage}");
    let se = (q * (1.0 - q) / (1000.0 * reps as f64)).sqrt();
    assert!((mean - q).abs() < 3.0 * se);
}

proptest! {
    #[test]
    fn information_is_symmetric_and_bounded(p in 0.0f64..=1.0) {
        let i = bit_information(p).unwrap();
        prop_assert!((0.0..=1.0).contains(&i));
        prop_assert!((i - bit_information(1.0 - p).unwrap()).abs() < 1e-15);
        if p > 0.0 && p < 1.0 && p != 0.5 {
            prop_assert!(i > 0.0 && i < 1.0);
        }
    }

    #[test]
    fn entropy_peaks_at_half(p in 0.0f64..=1.0) {
        let s = memory_entropy(p).unwrap();
        prop_assert!((0.0..=std::f64::consts::LN_2 + 1e-15).contains(&s));
        prop_assert!((s - memory_entropy(1.0 - p).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn remaining_information_interval_brackets_the_estimate(errors in 0u64..=500, extra in 1u64..500) {
        let trials = errors + extra;
        let stats = ite_core::info::BitChannelStats::from_counts(errors, trials).unwrap();
        let r = remaining_information(&stats);
        prop_assert!(r.low <= r.bits + 1e-15 && r.bits <= r.high + 1e-15);
    }

    #[test]
    fn brillouin_is_decreasing(a in 1e-9f64..0.5, b in 1e-9f64..0.5) {
        prop_assume!(a < b);
        let ea = brillouin_min_dissipation(a, 300.0).unwrap();
        let eb = brillouin_min_dissipation(b, 300.0).unwrap();
        prop_assert!(ea.kt_multiple > eb.kt_multiple);
    }

    #[test]
    fn any_physical_ice_cube_beats_the_bound(log_v in -21.0f64..6.0, ambient in 274.0f64..330.0) {
        let model = IceCubeModel::new(10f64.powf(log_v), ambient);
        let plain = ice_cube_erasure_energy(&model).unwrap();
        prop_assert!(plain.violation_factor > 1.0);
        let warm = ice_cube_erasure_energy(&model.with_sensible_heat(SensibleHeat::for_ambient(ambient))).unwrap();
        prop_assert!(warm.violation_factor >= plain.violation_factor);
        let rel = (plain.computed_cooling.kt_multiple * 1.380_649e-23 * ambient - plain.computed_cooling.joules).abs()
            / plain.computed_cooling.joules;
        prop_assert!(rel < 1e-15);
    }
}
