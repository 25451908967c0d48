use ite_core::ensemble::{run_parallel_ensemble, EnsembleSpec};
use ite_core::rng::make_stream;
use ite_core::sde::{ou_sample_stationary, ou_step, simulate_ou_path, CellParams, OuPropagator};
use ite_core::stats::Accumulator;
use proptest::prelude::*;

const N: usize = 100_000;

fn moments(values: &[f64]) -> Accumulator {
    let mut acc = Accumulator::default();
    values.iter().for_each(|&v| acc.push(v));
    acc
}

#[test]
fn terminal_variance_after_twenty_tau() {
    let p = CellParams::reduced(1.0).unwrap();
    let finals = run_parallel_ensemble(EnsembleSpec::new(N, 21, 4), |_, rng| {
        Ok(simulate_ou_path(p.sigma_st(), 20.0, 0.1, &p, rng)?.last_value())
    })
    .unwrap();
    let var = moments(&finals).variance();
    let tol = 3.0 * (2.0 / N as f64).sqrt();
    assert!((var / p.kt() - 1.0).abs() < tol, "var = {var}");
}

#[test]
fn two_half_steps_match_one_full_step() {
    let p = CellParams::reduced(2.0).unwrap();
    let (v0, dt) = (1.5, 0.3);
    let mut a = make_stream(31, 0);
    let mut b = make_stream(31, 1);
    let halves: Vec<f64> = (0..N)
        .map(|_| {
            let mid = ou_step(v0, dt, &p, &mut a).unwrap();
            ou_step(mid, dt, &p, &mut a).unwrap()
        })
        .collect();
    let whole: Vec<f64> = (0..N)
        .map(|_| ou_step(v0, 2.0 * dt, &p, &mut b).unwrap())
        .collect();
    let (h, w) = (moments(&halves), moments(&whole));
    let (mh, mw) = (h.finish(), w.finish());
    let se_mean = (mh.std_error.powi(2) + mw.std_error.powi(2)).sqrt();
    assert!((mh.mean - mw.mean).abs() < 3.0 * se_mean);
    // Analytic law of the full step.
    let decay = (-2.0 * dt / p.tau()).exp();
    assert!((mw.mean - v0 * decay).abs() < 3.0 * mw.std_error);
    let var_exact = p.kt() / p.capacitance() * (1.0 - decay * decay);
    let se_var = var_exact * (2.0 / N as f64).sqrt();
    assert!((h.variance() - var_exact).abs() < 3.0 * se_var);
    assert!((w.variance() - var_exact).abs() < 3.0 * se_var);
}

#[test]
fn stationary_start_stays_stationary() {
    let p = CellParams::reduced(1.0).unwrap();
    let paths = run_parallel_ensemble(EnsembleSpec::new(N, 8, 4), |_, rng| {
        let v0 = ou_sample_stationary(&p, rng);
        Ok(simulate_ou_path(v0, 5.0, 0.5, &p, rng)?.values().to_vec())
    })
    .unwrap();
    let se = p.kt() * (2.0 / N as f64).sqrt();
    for j in 0..paths[0].len() {
        let col: Vec<f64> = paths.iter().map(|path| path[j]).collect();
        let var = moments(&col).variance();
        assert!((var - p.kt()).abs() < 3.0 * se, "sample {j}: {var}");
    }
}

#[test]
fn trajectories_reproduce_bit_for_bit() {
    let p = CellParams::si(300.0, 1e3, 1e-12).unwrap();
    let run = |workers| {
        run_parallel_ensemble(EnsembleSpec::new(64, 99, workers), |_, rng| {
            simulate_ou_path(0.0, 10.0 * p.tau(), 0.01 * p.tau(), &p, rng)
        })
        .unwrap()
    };
    let one = run(1);
    assert_eq!(one, run(8));
    assert_eq!(one[5].stream_index(), 5);
}

proptest! {
    #[test]
    fn propagator_has_the_exact_transition_variance(dt in 1e-6f64..50.0, tau in 1e-3f64..10.0) {
        let p = CellParams::reduced(tau).unwrap();
        let prop = OuPropagator::new(dt, &p).unwrap();
        prop_assert!(prop.decay() > 0.0 && prop.decay() < 1.0);
        let want = p.sigma_st().powi(2) * (1.0 - prop.decay().powi(2));
        prop_assert!((prop.noise().powi(2) - want).abs() <= 1e-12 * want.max(1e-300) + 1e-15);
    }
}
