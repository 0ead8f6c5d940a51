//! Python bindings for the qnet-energy simulator.
//!
//! Exposes the component catalog, the channel/rate primitives, the CV key
//! rates and the full protocol-to-energy-report pipeline. Build with
//! `cargo build -p qnet-energy-python --release`; the resulting cdylib
//! imports as `_qnet_energy` (see `python/smoke_test.py`).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use qnet_energy::catalog::{Catalog as CoreCatalog, ValueMode};
use qnet_energy::channel;
use qnet_energy::cv;
use qnet_energy::dv;
use qnet_energy::energy;
use qnet_energy::protocols;
use qnet_energy::reproduce;
use qnet_energy::scenario;

fn err(e: qnet_energy::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_to_py<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Py<PyAny>> {
    Ok(match value {
        serde_json::Value::Null => py.None(),
        serde_json::Value::Bool(b) => b.into_pyobject(py)?.to_owned().unbind().into_any(),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.unbind().into_any()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.unbind().into_any()
            }
        }
        serde_json::Value::String(s) => s.into_pyobject(py)?.unbind().into_any(),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.unbind().into_any()
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, v) in map {
                dict.set_item(k, json_to_py(py, v)?)?;
            }
            dict.unbind().into_any()
        }
    })
}

fn to_py<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let json = serde_json::to_value(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    json_to_py(py, &json)
}

fn detection_from(s: &str) -> PyResult<cv::Detection> {
    match s {
        "homodyne" | "hom" => Ok(cv::Detection::Homodyne),
        "heterodyne" | "het" => Ok(cv::Detection::Heterodyne),
        other => Err(PyValueError::new_err(format!(
            "detection must be homodyne or heterodyne, got `{other}`"
        ))),
    }
}

/// The hardware component registry.
#[pyclass]
struct Catalog {
    inner: CoreCatalog,
}

#[pymethods]
impl Catalog {
    /// The builtin component set.
    #[staticmethod]
    fn builtin() -> Catalog {
        Catalog {
            inner: CoreCatalog::builtin(),
        }
    }

    /// Load a catalog from a TOML file (or `"builtin"`).
    #[staticmethod]
    fn load(path: &str) -> PyResult<Catalog> {
        Ok(Catalog {
            inner: CoreCatalog::load(path).map_err(err)?,
        })
    }

    /// Prefer measured values over datasheet ratings.
    fn measured(&self) -> Catalog {
        Catalog {
            inner: self.inner.clone().with_value_mode(ValueMode::MeasuredPreferred),
        }
    }

    fn component_ids(&self) -> Vec<String> {
        self.inner.components().map(|c| c.id.clone()).collect()
    }

    fn component(&self, py: Python<'_>, id: &str) -> PyResult<Py<PyAny>> {
        to_py(py, self.inner.component(id).map_err(err)?)
    }

    fn power_w(&self, id: &str) -> PyResult<f64> {
        self.inner.power_of(id).map_err(err)
    }

    fn startup_j(&self, id: &str) -> PyResult<f64> {
        self.inner.startup_of(id).map_err(err)
    }

    fn fiber_loss_db_per_km(&self, wavelength_nm: f64) -> PyResult<f64> {
        self.inner.fiber_loss_db_per_km(wavelength_nm).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Catalog({} components)", self.inner.components().count())
    }
}

/// Fiber transmission probability for a length in km and a loss in dB/km.
#[pyfunction]
fn transmittance(length_km: f64, loss_coeff_db_per_km: f64) -> f64 {
    channel::transmittance(length_km, loss_coeff_db_per_km)
}

/// Binary entropy in bits.
#[pyfunction]
fn binary_entropy(p: f64) -> PyResult<f64> {
    dv::binary_entropy(p).map_err(err)
}

/// Bosonic entropy kernel G(x).
#[pyfunction]
fn g_function(x: f64) -> PyResult<f64> {
    cv::g_function(x).map_err(err)
}

fn link(
    mu: f64,
    p_coupling: f64,
    p_det: f64,
    length_km: f64,
    loss_db_per_km: f64,
    r_source_hz: f64,
    p_bsm: f64,
) -> PyResult<dv::DvLinkParams> {
    let ch = channel::FiberChannel::new(length_km, loss_db_per_km, 1550.0).map_err(err)?;
    let p = dv::DvLinkParams {
        mu,
        p_coupling,
        p_det,
        r_source_hz,
        p_bsm,
        channels: vec![ch],
    };
    p.validate().map_err(err)?;
    Ok(p)
}

/// Raw rate of a prepare-and-measure link.
#[pyfunction]
#[pyo3(signature = (mu, p_coupling, p_det, length_km, loss_db_per_km))]
fn bb84_raw_rate(mu: f64, p_coupling: f64, p_det: f64, length_km: f64, loss_db_per_km: f64) -> PyResult<f64> {
    Ok(dv::bb84_raw_rate(&link(mu, p_coupling, p_det, length_km, loss_db_per_km, 1.0, 0.5)?))
}

/// Raw rate of an entanglement-based link.
#[pyfunction]
#[pyo3(signature = (mu, p_coupling, p_det, length_km, loss_db_per_km))]
fn e91_raw_rate(mu: f64, p_coupling: f64, p_det: f64, length_km: f64, loss_db_per_km: f64) -> PyResult<f64> {
    Ok(dv::e91_raw_rate(&link(mu, p_coupling, p_det, length_km, loss_db_per_km, 1.0, 0.5)?))
}

/// Raw rate of a relay-measurement link.
#[pyfunction]
#[pyo3(signature = (mu, p_coupling, p_det, p_bsm, length_km, loss_db_per_km))]
fn mdi_raw_rate(mu: f64, p_coupling: f64, p_det: f64, p_bsm: f64, length_km: f64, loss_db_per_km: f64) -> PyResult<f64> {
    Ok(dv::mdi_raw_rate(&link(mu, p_coupling, p_det, length_km, loss_db_per_km, 1.0, p_bsm)?))
}

/// Secret rate from a raw rate and the error rate: (per use, bits per second).
#[pyfunction]
fn dv_secret_rate(py: Python<'_>, raw_per_use: f64, qber: f64, r_source_hz: f64) -> PyResult<Py<PyAny>> {
    let noise = dv::DvNoise::new(qber).map_err(err)?;
    to_py(py, &dv::dv_secret_rate(raw_per_use, noise, r_source_hz))
}

/// Gaussian-modulation secret key rate.
#[pyfunction]
#[pyo3(signature = (v_a, transmittance, excess_noise, p_det, v_el, beta, detection, r_source_hz=100e6))]
#[allow(clippy::too_many_arguments)]
fn gaussian_skr(
    py: Python<'_>,
    v_a: f64,
    transmittance: f64,
    excess_noise: f64,
    p_det: f64,
    v_el: f64,
    beta: f64,
    detection: &str,
    r_source_hz: f64,
) -> PyResult<Py<PyAny>> {
    let p = cv::CvParams {
        v_a,
        transmittance,
        excess_noise,
        p_det,
        v_el,
        beta,
        detection: detection_from(detection)?,
        r_source_hz,
    };
    to_py(py, &cv::gaussian_skr(&p).map_err(err)?)
}

/// M-PSK secret key rate (`m = 4` is the QPSK scheme).
#[pyfunction]
#[pyo3(signature = (m, v_a, transmittance, excess_noise, p_det, v_el, beta, detection, r_source_hz=100e6))]
#[allow(clippy::too_many_arguments)]
fn psk_skr(
    py: Python<'_>,
    m: u32,
    v_a: f64,
    transmittance: f64,
    excess_noise: f64,
    p_det: f64,
    v_el: f64,
    beta: f64,
    detection: &str,
    r_source_hz: f64,
) -> PyResult<Py<PyAny>> {
    let base = cv::CvParams {
        v_a,
        transmittance,
        excess_noise,
        p_det,
        v_el,
        beta,
        detection: detection_from(detection)?,
        r_source_hz,
    };
    let p = cv::PskParams::new(base, m).map_err(err)?;
    to_py(py, &cv::psk_skr(&p).map_err(err)?)
}

/// Multipartite CV conference key rate.
#[pyfunction]
#[pyo3(signature = (m_mod, n, transmittance, p_det, v_el, beta, r_source_hz=100e6))]
#[allow(clippy::too_many_arguments)]
fn cv_cka_skr(
    py: Python<'_>,
    m_mod: f64,
    n: u32,
    transmittance: f64,
    p_det: f64,
    v_el: f64,
    beta: f64,
    r_source_hz: f64,
) -> PyResult<Py<PyAny>> {
    let p = cv::CkaCvParams {
        m_mod,
        n,
        transmittance,
        p_det,
        v_el,
        beta,
        r_source_hz,
    };
    to_py(py, &cv::cv_cka_skr(&p).map_err(err)?)
}

/// Optimize the Gaussian modulation variance; returns (v_a, k, boundary).
#[pyfunction]
#[pyo3(signature = (transmittance, excess_noise, p_det, v_el, beta, detection, lo=0.05, hi=500.0))]
#[allow(clippy::too_many_arguments)]
fn optimize_gaussian_va(
    transmittance: f64,
    excess_noise: f64,
    p_det: f64,
    v_el: f64,
    beta: f64,
    detection: &str,
    lo: f64,
    hi: f64,
) -> PyResult<(f64, f64, bool)> {
    let p = cv::CvParams {
        v_a: 1.0,
        transmittance,
        excess_noise,
        p_det,
        v_el,
        beta,
        detection: detection_from(detection)?,
        r_source_hz: 1.0,
    };
    let (v_a, rate, boundary) = cv::gaussian_skr_optimized(&p, lo, hi).map_err(err)?;
    Ok((v_a, rate.secret_per_use, boundary))
}

/// Build a protocol and return its full energy report as a dict.
#[pyfunction]
#[pyo3(signature = (family, distance_km, target_bits, detector="snspd", preset="table4_repro",
                    encoding="polarization", wavelength_nm=1550.0, detection_variant=None,
                    n_parties=None, qber=None, mu=None, tau_dsp=None, catalog=None))]
#[allow(clippy::too_many_arguments)]
fn protocol_report(
    py: Python<'_>,
    family: &str,
    distance_km: f64,
    target_bits: f64,
    detector: &str,
    preset: &str,
    encoding: &str,
    wavelength_nm: f64,
    detection_variant: Option<&str>,
    n_parties: Option<u32>,
    qber: Option<f64>,
    mu: Option<f64>,
    tau_dsp: Option<f64>,
    catalog: Option<&Catalog>,
) -> PyResult<Py<PyAny>> {
    let parse = |what: &str, json: String| -> PyResult<serde_json::Value> {
        serde_json::from_str(&json)
            .map_err(|_| PyValueError::new_err(format!("unknown {what} `{json}`")))
    };
    let spec_json = serde_json::json!({
        "family": parse("family", format!("\"{family}\""))?,
        "encoding": parse("encoding", format!("\"{encoding}\""))?,
        "wavelength_nm": wavelength_nm,
        "detector": parse("detector", format!("\"{detector}\""))?,
        "detection_variant": detection_variant,
        "n_parties": n_parties,
        "distance_km": distance_km,
        "preset": parse("preset", format!("\"{preset}\""))?,
        "overrides": { "qber": qber, "mu": mu, "tau_dsp": tau_dsp },
    });
    let spec: protocols::ProtocolSpec = serde_json::from_value(spec_json)
        .map_err(|e| PyValueError::new_err(format!("invalid protocol spec: {e}")))?;
    let builtin;
    let cat = match catalog {
        Some(c) => &c.inner,
        None => {
            builtin = CoreCatalog::builtin();
            &builtin
        }
    };
    let setup = protocols::build(&spec, cat).map_err(err)?;
    let report = energy::energy_for_target(&setup, cat, target_bits).map_err(err)?;
    let dict = PyDict::new(py);
    dict.set_item("name", &setup.name)?;
    dict.set_item("rate", to_py(py, &setup.rate)?)?;
    dict.set_item("report", to_py(py, &report)?)?;
    Ok(dict.unbind().into_any())
}

/// The published 40 km reference rows with pass/fail flags.
#[pyfunction]
#[pyo3(signature = (catalog=None))]
fn table4_rows(py: Python<'_>, catalog: Option<&Catalog>) -> PyResult<Py<PyAny>> {
    let builtin;
    let cat = match catalog {
        Some(c) => &c.inner,
        None => {
            builtin = CoreCatalog::builtin();
            &builtin
        }
    };
    let rows = reproduce::table4_rows(cat).map_err(err)?;
    let list = PyList::empty(py);
    for r in rows {
        let dict = PyDict::new(py);
        dict.set_item("protocol", r.protocol)?;
        dict.set_item("power_W", r.power_w)?;
        dict.set_item("secret_kbit_per_s", r.secret_kbps)?;
        dict.set_item("expected_power_W", r.expected_power_w)?;
        dict.set_item("expected_kbit_per_s", r.expected_kbps)?;
        dict.set_item("pass", r.pass)?;
        list.append(dict)?;
    }
    Ok(list.unbind().into_any())
}

/// Run a scenario given as TOML text; returns the CSV table.
#[pyfunction]
#[pyo3(signature = (scenario_toml, catalog=None))]
fn run_scenario(scenario_toml: &str, catalog: Option<&Catalog>) -> PyResult<String> {
    let sc = scenario::Scenario::from_toml_str(scenario_toml).map_err(err)?;
    let builtin;
    let cat = match catalog {
        Some(c) => &c.inner,
        None => {
            builtin = CoreCatalog::builtin();
            &builtin
        }
    };
    let rows = scenario::run_scenario(&sc, cat).map_err(err)?;
    let column = sc
        .sweep
        .map(|s| s.parameter.column_name())
        .unwrap_or("distance_km");
    Ok(scenario::rows_to_csv(column, &rows))
}

#[pymodule]
fn _qnet_energy(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Catalog>()?;
    m.add_function(wrap_pyfunction!(transmittance, m)?)?;
    m.add_function(wrap_pyfunction!(binary_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(g_function, m)?)?;
    m.add_function(wrap_pyfunction!(bb84_raw_rate, m)?)?;
    m.add_function(wrap_pyfunction!(e91_raw_rate, m)?)?;
    m.add_function(wrap_pyfunction!(mdi_raw_rate, m)?)?;
    m.add_function(wrap_pyfunction!(dv_secret_rate, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_skr, m)?)?;
    m.add_function(wrap_pyfunction!(psk_skr, m)?)?;
    m.add_function(wrap_pyfunction!(cv_cka_skr, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_gaussian_va, m)?)?;
    m.add_function(wrap_pyfunction!(protocol_report, m)?)?;
    m.add_function(wrap_pyfunction!(table4_rows, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
