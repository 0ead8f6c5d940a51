//! Optical fiber loss model.
//!
//! A fiber of length `L` km with loss coefficient `eta` dB/km transmits a
//! photon with probability `10^(-eta * L / 10)`. Loss is always applied as
//! attenuation (negative exponent): a transmission probability above one is
//! unphysical, so a positive exponent is never produced regardless of how a
//! link is assembled.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A span of optical fiber between two stations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberChannel {
    pub length_km: f64,
    pub loss_coeff_db_per_km: f64,
    pub wavelength_nm: f64,
}

impl FiberChannel {
    pub fn new(length_km: f64, loss_coeff_db_per_km: f64, wavelength_nm: f64) -> Result<Self> {
        if !(length_km >= 0.0) {
            return Err(Error::Domain(format!(
                "fiber length must be non-negative, got {length_km}"
            )));
        }
        if !(loss_coeff_db_per_km > 0.0) {
            return Err(Error::Domain(format!(
                "loss coefficient must be positive, got {loss_coeff_db_per_km}"
            )));
        }
        Ok(Self {
            length_km,
            loss_coeff_db_per_km,
            wavelength_nm,
        })
    }

    /// Probability that a photon survives the full span.
    ///
    /// Equals 1 at zero length and decreases strictly with length and with
    /// the loss coefficient.
    pub fn transmittance(&self) -> f64 {
        transmittance(self.length_km, self.loss_coeff_db_per_km)
    }
}

/// `10^(-length * loss / 10)` for a length in km and a loss in dB/km.
pub fn transmittance(length_km: f64, loss_coeff_db_per_km: f64) -> f64 {
    10f64.powf(-length_km * loss_coeff_db_per_km / 10.0)
}
