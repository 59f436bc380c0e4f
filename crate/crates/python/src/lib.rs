//! Python bindings for the exponent routes, the parametric curve and the
//! random-coding simulator.

use awgn_exponent as core;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: core::Error) -> PyErr {
    match e {
        core::Error::Domain { .. }
        | core::Error::CodebookTooLarge { .. }
        | core::Error::Parse(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn json<T: serde::Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Scalar Gaussian noise channel `Y = X + N`, `N ~ N(0, noise_variance)`.
#[pyclass(name = "Channel", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyChannel(core::Channel);

#[pymethods]
impl PyChannel {
    #[new]
    fn new(noise_variance: f64) -> PyResult<Self> {
        core::Channel::new(noise_variance).map(Self).map_err(to_py)
    }

    #[getter]
    fn noise_variance(&self) -> f64 {
        self.0.noise_variance()
    }

    fn log_density(&self, y: f64, x: f64) -> f64 {
        self.0.log_density(y, x)
    }

    fn __repr__(&self) -> String {
        format!("Channel(noise_variance={})", self.0.noise_variance())
    }
}

/// Average power budget `Γ` per channel use.
#[pyclass(name = "PowerBudget", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyPowerBudget(core::PowerBudget);

#[pymethods]
impl PyPowerBudget {
    #[new]
    fn new(gamma: f64) -> PyResult<Self> {
        core::PowerBudget::new(gamma).map(Self).map_err(to_py)
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma()
    }

    fn snr(&self, channel: &PyChannel) -> f64 {
        self.0.snr(&channel.0)
    }

    fn __repr__(&self) -> String {
        format!("PowerBudget(gamma={})", self.0.gamma())
    }
}

/// Exponent at a rate with the optimal `(ν*, ρ*)`.
#[pyclass(name = "ExponentSolution", frozen, get_all)]
struct PyExponentSolution {
    rate: f64,
    exponent: f64,
    nu: f64,
    rho: f64,
    below_capacity: bool,
}

#[pymethods]
impl PyExponentSolution {
    fn __repr__(&self) -> String {
        format!(
            "ExponentSolution(rate={}, exponent={}, nu={}, rho={}, below_capacity={})",
            self.rate, self.exponent, self.nu, self.rho, self.below_capacity
        )
    }
}

/// Random Gaussian codebook under a per-codeword power constraint.
#[pyclass(name = "Codebook", frozen)]
struct PyCodebook(core::Codebook);

#[pymethods]
impl PyCodebook {
    #[staticmethod]
    #[pyo3(signature = (n, rate, theta, power, seed))]
    fn random(n: usize, rate: f64, theta: f64, power: &PyPowerBudget, seed: u64) -> PyResult<Self> {
        core::generate_random_codebook(n, rate, theta, &power.0, seed)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn block_length(&self) -> usize {
        self.0.block_length()
    }

    #[getter]
    fn rate(&self) -> f64 {
        self.0.rate()
    }

    #[getter]
    fn rescaled_count(&self) -> usize {
        self.0.rescaled_count()
    }

    #[getter]
    fn mean_energy(&self) -> f64 {
        self.0.mean_energy()
    }

    fn codeword(&self, k: usize) -> PyResult<Vec<f64>> {
        if k >= self.0.len() {
            return Err(PyValueError::new_err(format!(
                "codeword index {k} out of range"
            )));
        }
        Ok(self.0.codeword(k).to_vec())
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

/// Monte Carlo estimate of the correct-decoding probability.
#[pyclass(name = "SimResult", frozen)]
struct PySimResult(core::SimResult);

#[pymethods]
impl PySimResult {
    #[getter]
    fn n(&self) -> usize {
        self.0.n
    }

    #[getter]
    fn rate_nats(&self) -> f64 {
        self.0.rate_nats
    }

    #[getter]
    fn trials(&self) -> u64 {
        self.0.trials
    }

    #[getter]
    fn correct(&self) -> u64 {
        self.0.correct
    }

    #[getter]
    fn p_c_hat(&self) -> f64 {
        self.0.p_c_hat
    }

    #[getter]
    fn std_err(&self) -> f64 {
        self.0.std_err
    }

    #[getter]
    fn measured_exponent(&self) -> Option<f64> {
        self.0.measured_exponent
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.0.seed
    }

    fn to_json(&self) -> PyResult<String> {
        json(&self.0)
    }
}

#[pyfunction]
fn capacity(power: &PyPowerBudget, channel: &PyChannel) -> f64 {
    core::capacity(&channel.0, &power.0)
}

#[pyfunction]
fn nu_zero(power: &PyPowerBudget, channel: &PyChannel) -> f64 {
    core::nu_zero(&power.0, &channel.0)
}

/// `(rate, exponent, rho_star)` on the parametric curve at `nu`.
#[pyfunction]
fn parametric_point(
    nu: f64,
    power: &PyPowerBudget,
    channel: &PyChannel,
) -> PyResult<(f64, f64, f64)> {
    let p = core::parametric_point(nu, &power.0, &channel.0).map_err(to_py)?;
    Ok((p.rate, p.exponent, core::rho_star(nu, &power.0, &channel.0)))
}

#[pyfunction]
fn exponent_solution(
    rate: f64,
    power: &PyPowerBudget,
    channel: &PyChannel,
) -> PyResult<PyExponentSolution> {
    let s = core::exponent_solution(rate, &power.0, &channel.0).map_err(to_py)?;
    Ok(PyExponentSolution {
        rate: s.rate,
        exponent: s.exponent,
        nu: s.nu,
        rho: s.rho,
        below_capacity: s.regime == core::RateRegime::BelowCapacity,
    })
}

#[pyfunction]
fn exponent_at_rate(rate: f64, power: &PyPowerBudget, channel: &PyChannel) -> PyResult<f64> {
    core::exponent_at_rate(rate, &power.0, &channel.0).map_err(to_py)
}

/// Exponent by numerical maximization over `(ρ, ν)`.
#[pyfunction]
fn optimize_rho_nu(rate: f64, power: &PyPowerBudget, channel: &PyChannel) -> PyResult<f64> {
    core::optimize_rho_nu(rate, &power.0, &channel.0).map_err(to_py)
}

/// Exponent by minimization over Gaussian test channels.
#[pyfunction]
fn g_dk(rate: f64, power: &PyPowerBudget, channel: &PyChannel) -> PyResult<f64> {
    core::g_dk(rate, &power.0, &channel.0).map_err(to_py)
}

/// Exponent by the variational max-min route.
#[pyfunction]
fn g_oh_numeric(rate: f64, power: &PyPowerBudget, channel: &PyChannel) -> PyResult<f64> {
    core::g_oh_numeric(rate, &power.0, &channel.0, &core::GohGrid::default())
        .map(|r| r.value)
        .map_err(to_py)
}

#[pyfunction]
fn big_l_rho_nu(
    rho: f64,
    nu: f64,
    rate: f64,
    power: &PyPowerBudget,
    channel: &PyChannel,
) -> PyResult<f64> {
    let rn = core::RhoNuParams::new(rho, nu).map_err(to_py)?;
    core::big_l_rho_nu(&rn, rate, &power.0, &channel.0).map_err(to_py)
}

#[pyfunction]
fn zeta(mu: f64, lambda: f64, eta: f64, channel: &PyChannel) -> PyResult<f64> {
    let tp = core::TiltParams::new(mu, lambda).map_err(to_py)?;
    core::zeta(&tp, eta, &channel.0).map_err(to_py)
}

#[pyfunction]
fn simulate_correct_probability(
    codebook: &PyCodebook,
    channel: &PyChannel,
    trials: u64,
    seed: u64,
) -> PyResult<PySimResult> {
    core::simulate_correct_probability(&codebook.0, &channel.0, trials, seed)
        .map(PySimResult)
        .map_err(to_py)
}

/// Runs the identity suite and returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (ratios=None, rates_per_ratio=None, samples=None, seed=None))]
fn run_crosscheck(
    ratios: Option<Vec<f64>>,
    rates_per_ratio: Option<usize>,
    samples: Option<usize>,
    seed: Option<u64>,
) -> PyResult<String> {
    let d = core::CrosscheckConfig::default();
    let cfg = core::CrosscheckConfig {
        snr_ratios: ratios.unwrap_or(d.snr_ratios.clone()),
        rates_per_ratio: rates_per_ratio.unwrap_or(d.rates_per_ratio),
        samples: samples.unwrap_or(d.samples),
        seed: seed.unwrap_or(d.seed),
        ..d
    };
    json(&core::run_crosscheck(&cfg).map_err(to_py)?)
}

#[pymodule]
pub fn awgn_exponent_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyChannel>()?;
    m.add_class::<PyPowerBudget>()?;
    m.add_class::<PyExponentSolution>()?;
    m.add_class::<PyCodebook>()?;
    m.add_class::<PySimResult>()?;
    m.add_function(wrap_pyfunction!(capacity, m)?)?;
    m.add_function(wrap_pyfunction!(nu_zero, m)?)?;
    m.add_function(wrap_pyfunction!(parametric_point, m)?)?;
    m.add_function(wrap_pyfunction!(exponent_solution, m)?)?;
    m.add_function(wrap_pyfunction!(exponent_at_rate, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_rho_nu, m)?)?;
    m.add_function(wrap_pyfunction!(g_dk, m)?)?;
    m.add_function(wrap_pyfunction!(g_oh_numeric, m)?)?;
    m.add_function(wrap_pyfunction!(big_l_rho_nu, m)?)?;
    m.add_function(wrap_pyfunction!(zeta, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_correct_probability, m)?)?;
    m.add_function(wrap_pyfunction!(run_crosscheck, m)?)?;
    Ok(())
}
