use ite_core::capacitor::{
    erase, erase_dissipation_theory, partial_erase_error_prob, read_bit, run_erasure_experiment,
    run_write_ensemble, write_bit, ErasureConfig, WriteOptions,
};
use ite_core::config::default_duration_grid;
use ite_core::ensemble::{run_parallel_ensemble, EnsembleSpec};
use ite_core::rng::make_stream;
use ite_core::sde::CellParams;
use ite_core::stats::{wilson_interval, MeanEstimate, Z_95};
use proptest::prelude::*;

const N: usize = 100_000;

fn cell() -> CellParams {
    CellParams::reduced(1.0).unwrap()
}

/// Complete erasures from a random-sign `u0`, bath heat per trajectory.
fn erase_heat(u0: f64, seed: u64) -> MeanEstimate {
    let p = cell();
    let heats = run_parallel_ensemble(EnsembleSpec::new(N, seed, 4), |_, rng| {
        let v0 = if rng.bit() == 1 { u0 } else { -u0 };
        Ok(erase(v0, 20.0, &p, 0.5, rng)?.bath_heat)
    })
    .unwrap();
    MeanEstimate::from_values(heats)
}

#[test]
fn complete_erasure_heat_matches_closed_form() {
    let p = cell();
    let s = p.sigma_st();
    for (k, u0) in [0.0, 0.5 * s, s, 2.0 * s].into_iter().enumerate() {
        let est = erase_heat(u0, 100 + k as u64);
        let theory = erase_dissipation_theory(u0, &p).unwrap();
        assert!(est.contains(theory, 3.0), "u0 = {u0}: {est:?} vs {theory}");
    }
    assert!(erase_heat(0.5 * s, 7).mean < 0.0);
}

#[test]
fn write_and_erase_heats_are_antisymmetric() {
    let p = cell();
    let u0 = 0.7;
    let mut cfg = ErasureConfig::new(p, u0);
    cfg.n_trajectories = N;
    cfg.master_seed = 12;
    cfg.workers = 4;
    let (write, records) = run_write_ensemble(&cfg).unwrap();
    let erased = erase_heat(u0, 13);
    let se = (write.mean_q_env.std_error.powi(2) + erased.std_error.powi(2)).sqrt();
    assert!((write.mean_q_env.mean + erased.mean).abs() < 3.0 * se);
    assert!(write.mean_q_env.contains(0.5 * (p.kt() - u0 * u0), 3.0));
    assert!(records
        .iter()
        .all(|r| r.control_cost_lower_bound >= std::f64::consts::LN_2));
    assert!(records.iter().all(|r| {
        let signed = if r.bit_written == 1 { u0 } else { -u0 };
        r.target_level == signed && r.v_final == signed
    }));
}

#[test]
fn monte_carlo_read_error_brackets_the_gaussian_oracle() {
    let p = cell();
    let flips = run_parallel_ensemble(EnsembleSpec::new(N, 44, 4), |_, rng| {
        let bit = rng.bit();
        let v0 = if bit == 1 { 1.0 } else { -1.0 };
        let v = erase(v0, 1.0, &p, 0.01, rng)?.v_final;
        Ok(u64::from(read_bit(v)? != bit))
    })
    .unwrap();
    let errors: u64 = flips.iter().sum();
    let (lo, hi) = wilson_interval(errors, N as u64, Z_95);
    let oracle = partial_erase_error_prob(1.0, 1.0, &p).unwrap();
    assert!(lo <= oracle && oracle <= hi, "[{lo}, {hi}] vs {oracle}");
}

#[test]
fn fully_erased_bit_carries_no_information() {
    let mut cfg = ErasureConfig::new(cell(), 0.5);
    cfg.n_trajectories = N;
    cfg.master_seed = 5;
    cfg.workers = 4;
    let rep = run_erasure_experiment(&cfg).unwrap().remove(0);
    assert!(rep.mean_q_env.contains(-0.375, 3.0), "{:?}", rep.mean_q_env);
    assert!(rep.channel.ci_low <= 0.5 && 0.5 <= rep.channel.ci_high);
    assert!(rep.remaining_information.bits < 1e-3);
    assert_eq!(rep.remaining_information.low, 0.0);
}

#[test]
fn information_decays_along_the_grid() {
    let mut cfg = ErasureConfig::new(cell(), 1.0);
    cfg.durations = default_duration_grid();
    cfg.n_trajectories = 20_000;
    cfg.master_seed = 9;
    cfg.workers = 4;
    let reps = run_erasure_experiment(&cfg).unwrap();
    assert_eq!(reps[0].remaining_information.bits, 1.0);
    for w in reps.windows(2) {
        assert!(w[1].p_e_theory > w[0].p_e_theory);
        assert!(
            w[1].remaining_information.bits <= w[0].remaining_information.bits + 0.01,
            "{} -> {}",
            w[0].remaining_information.bits,
            w[1].remaining_information.bits
        );
        // The analytic bath heat relaxes towards the complete-erasure value.
        assert!(w[1].theory_q_env <= w[0].theory_q_env);
    }
    for r in &reps {
        assert!(r.mean_q_env.contains(r.theory_q_env, 4.0), "{r:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ledger_balances_exactly_on_writes(u0 in 0.05f64..2.5, bit in 0u8..2, seed in any::<u64>()) {
        let p = cell();
        let mut rng = make_stream(seed, 0);
        let w = write_bit(bit, u0, &p, &WriteOptions::new(0.01, 1000.0), &mut rng).unwrap();
        prop_assert_eq!(w.bath_heat + (p.energy(w.v_final) - p.energy(w.v_start)), 0.0);
        prop_assert_eq!(w.v_final.abs(), u0);
        prop_assert_eq!(read_bit(w.v_final).unwrap(), bit);
    }

    #[test]
    fn ledger_balances_exactly_on_erasures(v0 in -4.0f64..4.0, duration in 0.0f64..10.0, seed in any::<u64>()) {
        let p = CellParams::si(290.0, 5e5, 2e-15).unwrap();
        let mut rng = make_stream(seed, 3);
        let r = erase(v0 * p.sigma_st(), duration * p.tau(), &p, 0.01 * p.tau(), &mut rng).unwrap();
        prop_assert_eq!(r.bath_heat + (p.energy(r.v_final) - p.energy(r.v_start)), 0.0);
    }
}
