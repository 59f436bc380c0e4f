use pyo3::prelude::*;
use pyo3::types::PyDict;
use pyo3::wrap_pymodule;

fn run(code: &str) {
    Python::initialize();
    Python::attach(|py| {
        let module = wrap_pymodule!(awgn_exponent_py::awgn_exponent_py)(py);
        let locals = PyDict::new(py);
        locals.set_item("m", module).unwrap();
        let code = std::ffi::CString::new(code).unwrap();
        py.run(&code, None, Some(&locals))
            .map_err(|e| e.display(py))
            .unwrap();
    });
}

#[test]
fn capacity_and_worked_point() {
    run(r#"
ch, pb = m.Channel(1.0), m.PowerBudget(1.0)
assert abs(m.capacity(pb, ch) - 0.34657359027997264) < 1e-15
rate, g, rho = m.parametric_point(0.3, pb, ch)
assert abs(m.exponent_at_rate(rate, pb, ch) - g) < 1e-12
assert abs(m.g_dk(rate, pb, ch) - g) < 1e-5
"#);
}

#[test]
fn domain_errors_become_value_errors() {
    run(r#"
try:
    m.Channel(-1.0)
    raise AssertionError("accepted")
except ValueError as e:
    assert "noise_variance" in str(e)
try:
    m.parametric_point(0.7, m.PowerBudget(1.0), m.Channel(1.0))
    raise AssertionError("accepted")
except ValueError:
    pass
"#);
}

#[test]
fn simulation_round_trip() {
    run(r#"
pb, ch = m.PowerBudget(1.0), m.Channel(1.0)
cb = m.Codebook.random(4, 0.5, 1.0, pb, 1)
r = m.simulate_correct_probability(cb, ch, 500, 2)
assert r.trials == 500 and r.n == 4 and r.seed == 2
assert r.correct == round(r.p_c_hat * 500)
"#);
}
