use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module<F: FnOnce(Python<'_>, &Bound<'_, PyDict>)>(f: F) {
    Python::initialize();
    Python::attach(|py| {
        let module = pyo3::wrap_pymodule!(itesim::itesim)(py);
        let globals = PyDict::new(py);
        globals.set_item("itesim", module).unwrap();
        globals
            .set_item("math", py.import("math").unwrap())
            .unwrap();
        f(py, &globals);
    });
}

fn run(code: &std::ffi::CStr) {
    with_module(|py, g| {
        if let Err(e) = py.run(code, Some(g), None) {
            e.display(py);
            panic!("python code failed");
        }
    });
}

#[test]
fn cell_operations_round_trip() {
    run(c"
cell = itesim.CellParams.reduced()
rng = itesim.Rng(3)
w = itesim.write_bit(0, 1.5, cell, rng)
assert w['v_final'] == -1.5 and w['target_level'] == -1.5
e = itesim.erase(w['v_final'], 20.0, cell, rng, dt=0.01)
assert e['bath_heat'] == cell.energy(e['v_start']) - cell.energy(e['v_final'])
assert itesim.erase_dissipation_theory(2.0, cell) == 1.5
assert abs(itesim.write_dissipation_theory(2.0, cell) + 1.5) < 1e-15
");
}

#[test]
fn streams_are_reproducible() {
    run(c"
a = itesim.Rng(11, 4)
b = itesim.Rng(11, 4)
assert [a.normal() for _ in range(5)] == [b.normal() for _ in range(5)]
assert a.stream_index == 4 and a.master_seed == 11
");
}

#[test]
fn closed_forms_match_the_core() {
    let p_e = ite_core::capacitor::partial_erase_error_prob(
        1.0,
        1.0,
        &ite_core::sde::CellParams::reduced(1.0).unwrap(),
    )
    .unwrap();
    with_module(|py, g| {
        let got: f64 = py
            .eval(
                c"itesim.partial_erase_error_prob(1.0, 1.0, itesim.CellParams.reduced())",
                Some(g),
                None,
            )
            .unwrap()
            .extract()
            .unwrap();
        assert_eq!(got, p_e);
    });
    run(c"
assert itesim.bit_information(0.5) == 0.0
assert itesim.memory_entropy(1.0) == 0.0
j, kt = itesim.brillouin_min_dissipation(0.5, 300.0)
assert abs(kt - math.log(2.0)) < 1e-15
ice = itesim.ice_cube_erasure_energy(10.0, 300.0, sensible_heat=True)
assert ice['violation_factor'] > 1e23
s = itesim.estimate_error_prob([0, 1, 1, 0], [0, 1, 0, 0])
assert s['errors'] == 1 and s['trials'] == 4
");
}

#[test]
fn errors_become_python_exceptions() {
    run(c"
for call, exc in [
    (lambda: itesim.CellParams.reduced(0.0), ValueError),
    (lambda: itesim.bit_information(1.5), ValueError),
    (lambda: itesim.ice_cube_erasure_energy(1.0, 250.0), RuntimeError),
    (lambda: itesim.run_experiment('no-such-thing'), ValueError),
    (lambda: itesim.run_experiment('info-eval', bogus='1'), ValueError),
    (lambda: itesim.measure_escape_time(itesim.DoubleWellParams.reduced(60.0), n_trajectories=10), RuntimeError),
]:
    try:
        call()
    except exc:
        pass
    else:
        raise AssertionError('no exception')
");
}

#[test]
fn ensembles_run_through_the_bindings() {
    run(c"
cell = itesim.CellParams.reduced()
r = itesim.run_erasure_experiment(cell, 1.0, [0.0, 20.0], n_trajectories=2000, workers=2)
assert r[0]['p_e_hat'] == 0.0 and r[0]['mean_q_env'] == 0.0
well = itesim.DoubleWellParams.with_well_curvature(2.0, 16.0)
assert abs(well.well_position - 1.0) < 1e-15
s = itesim.relax_ensemble(well, t_total=5.0, n_trajectories=200)
assert len(s['times']) == len(s['p1']) == len(s['mean_u'])
h = itesim.heated_erase(well, 2.0, t_total=5.0, n_trajectories=200)
assert h['t_hot'] == 2.0 and h['absorbed']['n'] == 200
header, rows, summary = itesim.run_experiment('capacitor-mi-curve', durations_tau='0,1', n_trajectories='500')
assert header[0] == 'duration_tau' and len(rows) == 2
assert summary['grid_points'] == 2
");
}
