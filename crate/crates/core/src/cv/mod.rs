//! Continuous-variable secret-key rates.
//!
//! Covers Gaussian-modulated coherent states with homodyne or heterodyne
//! detection, discrete M-PSK constellations, a multipartite
//! conference-key rate, and a one-dimensional optimizer over the
//! modulation strength. All noise quantities are in shot-noise units with
//! the excess noise referenced at the channel input.

mod cka;
mod gaussian;
mod optimize;
mod psk;

pub use cka::{cv_cka_information, cv_cka_skr, CkaCvParams};
pub use gaussian::{gaussian_holevo_bound, gaussian_skr, gaussian_skr_optimized, CvHolevoIntermediates};
pub use optimize::{optimize_modulation, ModulationOptimum};
pub use psk::{psk_holevo_bound, psk_skr, psk_skr_optimized, PskParams};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coherent detection scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detection {
    /// One quadrature measured per symbol.
    Homodyne,
    /// Both quadratures measured per symbol.
    Heterodyne,
}

/// Parameters of a bipartite CV link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvParams {
    /// Modulation variance `V_A = 2<n>` in shot-noise units.
    pub v_a: f64,
    /// Channel transmittance in (0, 1].
    pub transmittance: f64,
    /// Excess noise at the channel input, SNU.
    pub excess_noise: f64,
    /// Detector efficiency in (0, 1].
    pub p_det: f64,
    /// Electronic noise per balanced detector, SNU.
    pub v_el: f64,
    /// Reconciliation efficiency in (0, 1].
    pub beta: f64,
    pub detection: Detection,
    /// Symbol rate in Hz.
    pub r_source_hz: f64,
}

impl CvParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.v_a >= 0.0) {
            return Err(Error::Validation(format!("v_a must be >= 0, got {}", self.v_a)));
        }
        if !(self.transmittance > 0.0 && self.transmittance <= 1.0) {
            return Err(Error::Validation(format!(
                "transmittance must lie in (0, 1], got {}",
                self.transmittance
            )));
        }
        if !(self.excess_noise >= 0.0) {
            return Err(Error::Validation(format!(
                "excess_noise must be >= 0, got {}",
                self.excess_noise
            )));
        }
        if !(self.p_det > 0.0 && self.p_det <= 1.0) {
            return Err(Error::Validation(format!(
                "p_det must lie in (0, 1], got {}",
                self.p_det
            )));
        }
        if !(self.v_el >= 0.0) {
            return Err(Error::Validation(format!("v_el must be >= 0, got {}", self.v_el)));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::Validation(format!(
                "beta must lie in (0, 1], got {}",
                self.beta
            )));
        }
        if !(self.r_source_hz > 0.0) {
            return Err(Error::Validation(format!(
                "r_source_hz must be positive, got {}",
                self.r_source_hz
            )));
        }
        Ok(())
    }

    /// Same link with a different modulation variance.
    pub fn with_v_a(mut self, v_a: f64) -> Self {
        self.v_a = v_a;
        self
    }
}

/// `G(x) = (x+1) log2(x+1) - x log2(x)`, the bosonic entropy kernel.
/// Continuous at zero: `G(0) = 0`.
pub fn g_function(x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain(format!("G argument {x} is negative")));
    }
    Ok(g0(x))
}

/// `G` with sub-zero inputs (rounding noise on `(lambda-1)/2`) clamped to 0.
pub(crate) fn g0(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (x + 1.0) * (x + 1.0).log2() - x * x.log2()
    }
}

/// Mutual information between the two link ends, bits per symbol.
pub fn mutual_information(p: &CvParams) -> f64 {
    let signal = p.p_det * p.transmittance * p.v_a;
    match p.detection {
        Detection::Homodyne => {
            let noise = 1.0 + p.v_el + p.p_det * p.transmittance * p.excess_noise;
            0.5 * (1.0 + signal / noise).log2()
        }
        Detection::Heterodyne => {
            let noise = 2.0 + 2.0 * p.v_el + p.p_det * p.transmittance * p.excess_noise;
            (1.0 + signal / noise).log2()
        }
    }
}

/// Square root that tolerates rounding-level negatives (relative to
/// `scale`) and rejects anything worse as a numerical-domain error.
pub(crate) fn checked_sqrt(x: f64, scale: f64, context: &str) -> Result<f64> {
    if x >= 0.0 {
        return Ok(x.sqrt());
    }
    if x >= -1e-9 * scale.abs().max(1.0) {
        return Ok(0.0);
    }
    Err(Error::NumericalDomain(format!(
        "{context}: negative value {x} under square root"
    )))
}
