//! Python bindings for the ucjt toolkit: network configuration, the
//! closed-form building blocks, and both throughput engines.
//!
//! The module mirrors the CLI's user-facing units (km, km^-2, dBm, MHz);
//! everything is converted to SI internally by the same code path the CLI
//! uses, so Python results are bit-identical to `ucjt` runs.

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ucjt::analytic::{self, AnalyticParams, QuadratureSpec};
use ucjt::simulator;
use ucjt::{Error, ExperimentConfig, NetworkConfig, Scheme};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::Parse(_) => PyValueError::new_err(e.to_string()),
        Error::Numerical(_) => PyRuntimeError::new_err(e.to_string()),
        Error::Io(_) => PyOSError::new_err(e.to_string()),
    }
}

fn parse_schemes(names: &[String]) -> PyResult<Vec<Scheme>> {
    names
        .iter()
        .map(|n| n.parse::<Scheme>().map_err(to_py))
        .collect()
}

fn quad(rtol: f64, atol: f64) -> QuadratureSpec {
    QuadratureSpec { rtol, atol, ..QuadratureSpec::default() }
}

/// A network operating point. Constructed in the CLI's units and held
/// internally in SI; the getters report SI values.
#[pyclass(module = "ucjt_py", frozen)]
struct Network {
    inner: NetworkConfig,
}

#[pymethods]
impl Network {
    #[new]
    #[pyo3(signature = (
        lambda_r_km2 = 50.0,
        lambda_u_km2 = 20.0,
        c_km = 0.2,
        d_km = 0.4,
        alpha = 3.6,
        d0_m = 10.0,
        tx_power_dbm = 24.0,
        bandwidth_mhz = 10.0,
        noise_psd_dbm_hz = -174.0,
        window_km = 10.0,
        toroidal = true,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        lambda_r_km2: f64,
        lambda_u_km2: f64,
        c_km: f64,
        d_km: f64,
        alpha: f64,
        d0_m: f64,
        tx_power_dbm: f64,
        bandwidth_mhz: f64,
        noise_psd_dbm_hz: f64,
        window_km: f64,
        toroidal: bool,
    ) -> PyResult<Self> {
        let cfg = ExperimentConfig {
            lambda_r_km2,
            lambda_u_km2,
            c_km,
            d_km,
            alpha,
            d0_m,
            tx_power_dbm,
            bandwidth_mhz,
            noise_psd_dbm_hz,
            window_km,
            toroidal,
            ..ExperimentConfig::default()
        };
        let inner = cfg.network();
        inner.validate().map_err(to_py)?;
        Ok(Network { inner })
    }

    #[getter]
    fn lambda_r_per_m2(&self) -> f64 {
        self.inner.lambda_r_per_m2
    }

    #[getter]
    fn lambda_u_per_m2(&self) -> f64 {
        self.inner.lambda_u_per_m2
    }

    #[getter]
    fn cell_radius_m(&self) -> f64 {
        self.inner.cell_radius_m
    }

    #[getter]
    fn min_separation_m(&self) -> f64 {
        self.inner.min_separation_m
    }

    #[getter]
    fn tx_power_w(&self) -> f64 {
        self.inner.tx_power_w
    }

    #[getter]
    fn bandwidth_hz(&self) -> f64 {
        self.inner.bandwidth_hz
    }

    #[getter]
    fn noise_w(&self) -> f64 {
        self.inner.noise_w
    }

    /// Path-loss gain l(d) = max(d, d0)^-alpha.
    fn path_gain(&self, distance_m: f64) -> f64 {
        self.inner.path_loss.gain(distance_m)
    }

    /// Probability that a contending user wins channel access.
    fn scheduling_probability(&self) -> f64 {
        ucjt::geometry::scheduling_probability(
            self.inner.lambda_u_per_m2,
            self.inner.min_separation_m,
        )
    }

    fn __repr__(&self) -> String {
        format!(
            "Network(lambda_r={:e} m^-2, lambda_u={:e} m^-2, C={} m, D={} m)",
            self.inner.lambda_r_per_m2,
            self.inner.lambda_u_per_m2,
            self.inner.cell_radius_m,
            self.inner.min_separation_m,
        )
    }
}

/// Probability that a contending user at density `lambda_u_per_m2` wins
/// channel access under the exclusion rule with separation `d_m`.
#[pyfunction]
fn scheduling_probability(lambda_u_per_m2: f64, d_m: f64) -> f64 {
    ucjt::geometry::scheduling_probability(lambda_u_per_m2, d_m)
}

/// Mean received signal power E[S] (in units of transmit power) for
/// maximum ratio transmission over the serving cell.
#[pyfunction]
fn mean_signal_power(net: &Network) -> f64 {
    analytic::mean_signal_power(&net.inner)
}

/// Laplace transform of the received signal power at `t`.
#[pyfunction]
#[pyo3(signature = (net, t, rtol = 1e-6, atol = 1e-10))]
fn laplace_signal(net: &Network, t: f64, rtol: f64, atol: f64) -> PyResult<f64> {
    let p = AnalyticParams::new(net.inner);
    analytic::laplace_s(t, &p, &quad(rtol, atol)).map_err(to_py)
}

/// First-order moment of the power weight an access point at distance
/// `r_m` receives under maximum ratio transmission.
#[pyfunction]
#[pyo3(signature = (net, r_m, rtol = 1e-6, atol = 1e-10))]
fn weight_moment(net: &Network, r_m: f64, rtol: f64, atol: f64) -> PyResult<f64> {
    let p = AnalyticParams::new(net.inner);
    analytic::weight_moment(r_m, &p, &quad(rtol, atol)).map_err(to_py)
}

/// Mean user throughput in bit/s from the transform engine.
#[pyfunction]
#[pyo3(signature = (net, rtol = 1e-6, atol = 1e-10))]
fn tau_analytic(net: &Network, rtol: f64, atol: f64) -> PyResult<f64> {
    let p = AnalyticParams::new(net.inner);
    analytic::tau_analytic(&p, &quad(rtol, atol)).map_err(to_py)
}

/// Mean user throughput with every interfering cell reduced to a single
/// transmitter at its center (upper bound on `tau_analytic`).
#[pyfunction]
#[pyo3(signature = (net, rtol = 1e-6, atol = 1e-10))]
fn tau_farfield(net: &Network, rtol: f64, atol: f64) -> PyResult<f64> {
    let p = AnalyticParams::new(net.inner);
    analytic::tau_farfield_only(&p, &quad(rtol, atol)).map_err(to_py)
}

/// Spatial throughput in bit/s per m^2 from the transform engine.
#[pyfunction]
#[pyo3(signature = (net, rtol = 1e-6, atol = 1e-10))]
fn eta_analytic(net: &Network, rtol: f64, atol: f64) -> PyResult<f64> {
    let p = AnalyticParams::new(net.inner);
    analytic::eta_analytic(&p, &quad(rtol, atol)).map_err(to_py)
}

/// Seeded Monte Carlo throughput estimates. Returns one
/// `(scheme, mean_bit_s, ci95_halfwidth)` tuple per requested scheme,
/// evaluated on common random numbers.
#[pyfunction]
#[pyo3(signature = (net, schemes, drops = 400, fadings = 50, seed = 12345))]
fn simulate_throughput(
    net: &Network,
    schemes: Vec<String>,
    drops: usize,
    fadings: usize,
    seed: u64,
) -> PyResult<Vec<(String, f64, f64)>> {
    let parsed = parse_schemes(&schemes)?;
    let estimates = simulator::simulate_throughput(&net.inner, &parsed, drops, fadings, seed)
        .map_err(to_py)?;
    Ok(parsed
        .iter()
        .zip(estimates)
        .map(|(s, e)| (s.name().to_string(), e.mean, e.ci95_halfwidth))
        .collect())
}

/// Names accepted by `simulate_throughput`.
#[pyfunction]
fn scheme_names() -> Vec<&'static str> {
    Scheme::ALL.iter().map(|s| s.name()).collect()
}

#[pymodule]
fn ucjt_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Network>()?;
    m.add_function(wrap_pyfunction!(scheduling_probability, m)?)?;
    m.add_function(wrap_pyfunction!(mean_signal_power, m)?)?;
    m.add_function(wrap_pyfunction!(laplace_signal, m)?)?;
    m.add_function(wrap_pyfunction!(weight_moment, m)?)?;
    m.add_function(wrap_pyfunction!(tau_analytic, m)?)?;
    m.add_function(wrap_pyfunction!(tau_farfield, m)?)?;
    m.add_function(wrap_pyfunction!(eta_analytic, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_throughput, m)?)?;
    m.add_function(wrap_pyfunction!(scheme_names, m)?)?;
    Ok(())
}
