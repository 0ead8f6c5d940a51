//! Multipartite conference-key rate for Gaussian-modulated states measured
//! at an untrusted relay.
//!
//! Each of the n users sends a coherent state of variance `m_mod` through a
//! link of transmittance T to the relay; the detector thermal noise enters
//! through `delta = (1 - p_det + V_el) / p_det` and `omega = 2 delta + 1`.
//! The post-measurement two-user covariance matrix is diagonal, so the
//! conditional state after one user's first-quadrature homodyne follows
//! from the standard Gaussian update with a pseudo-inverse projector.

use serde::{Deserialize, Serialize};

use super::{checked_sqrt, g0};
use crate::dv::RateResult;
use crate::error::{Error, Result};

/// Parameters of the multipartite CV conference-key protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CkaCvParams {
    /// Modulation parameter of the prepared states; strictly above 1
    /// (variance 1 is the vacuum).
    pub m_mod: f64,
    /// Number of users, at least 2.
    pub n: u32,
    /// User-to-relay channel transmittance in (0, 1].
    pub transmittance: f64,
    /// Relay detector efficiency in (0, 1].
    pub p_det: f64,
    /// Electronic noise per balanced detector, SNU.
    pub v_el: f64,
    /// Reconciliation efficiency in (0, 1].
    pub beta: f64,
    /// Symbol rate in Hz.
    pub r_source_hz: f64,
}

impl CkaCvParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.m_mod > 1.0) {
            return Err(Error::Validation(format!(
                "m_mod must exceed 1, got {}",
                self.m_mod
            )));
        }
        if self.n < 2 {
            return Err(Error::Validation(format!(
                "conference needs at least 2 users, got {}",
                self.n
            )));
        }
        if !(self.transmittance > 0.0 && self.transmittance <= 1.0) {
            return Err(Error::Validation(format!(
                "transmittance must lie in (0, 1], got {}",
                self.transmittance
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

    /// Detector thermal-noise parameter `delta`.
    pub fn delta(&self) -> f64 {
        (1.0 - self.p_det + self.v_el) / self.p_det
    }

    /// `omega = 2 delta + 1`.
    pub fn omega(&self) -> f64 {
        2.0 * self.delta() + 1.0
    }

    pub fn with_m_mod(mut self, m_mod: f64) -> Self {
        self.m_mod = m_mod;
        self
    }
}

/// Mutual information and Holevo bound of the conference protocol,
/// bits per symbol.
pub fn cv_cka_information(p: &CkaCvParams) -> Result<(f64, f64)> {
    p.validate()?;
    let mu = p.m_mod;
    let n = p.n as f64;
    let t = p.transmittance;
    let omega = p.omega();

    let x = t * mu + (1.0 - t) * omega;
    let z_sq = t * (mu * mu - 1.0);

    // Reduced single-user matrix diag(d1, d2) and cross block diag(th1, -th1).
    let d1 = mu - (n - 1.0) * z_sq / (n * x);
    let d2 = mu - z_sq / (n * x);
    let th1 = z_sq / (n * x);
    if !(d1 > 0.0 && d2 > 0.0) {
        return Err(Error::NumericalDomain(format!(
            "conditional covariance not positive (d1 = {d1}, d2 = {d2})"
        )));
    }
    let d1_cond = d1 - th1 * th1 / d1;
    let before = 1.0 + d1 * d2 + d1 + d2;
    let after = 1.0 + d1_cond * d2 + d1_cond + d2;
    let iab = 0.5 * (before / after).log2();

    let nu = checked_sqrt(mu * (mu - z_sq / x), mu * mu, "cka nu")?;
    let lam = n * omega * mu + t * (1.0 + (n - 1.0 - n * omega) * mu);
    let lam_bar = n * omega * mu + t * (n - 1.0 - (n * omega - 1.0) * mu);
    let tau = n * omega * (1.0 - t) + t * (n - 1.0 + mu);
    let tau_bar = n * omega * (1.0 - t) + t * ((n - 1.0) * mu + 1.0);
    if !(tau > 0.0 && tau_bar > 0.0) {
        return Err(Error::NumericalDomain(format!(
            "relay eigenvalue denominators not positive (tau = {tau}, tau_bar = {tau_bar})"
        )));
    }
    let nu_n = checked_sqrt(lam * lam_bar / (tau * tau_bar), 1.0, "cka nu_n")?;
    let chi = 2.0 * g0((nu - 1.0) / 2.0) - g0((nu_n - 1.0) / 2.0);
    Ok((iab, chi))
}

/// Conference secret-key rate shared by every pair of users.
pub fn cv_cka_skr(p: &CkaCvParams) -> Result<RateResult> {
    let (iab, chi) = cv_cka_information(p)?;
    let k = (p.beta * iab - chi).max(0.0);
    Ok(RateResult {
        raw_per_use: iab,
        secret_per_use: k,
        secret_bps: k * p.r_source_hz,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn baseline(m_mod: f64, n: u32, d_km: f64) -> CkaCvParams {
        CkaCvParams {
            m_mod,
            n,
            transmittance: 10f64.powf(-0.018 * d_km),
            p_det: 0.7,
            v_el: 0.005,
            beta: 0.95,
            r_source_hz: 100e6,
        }
    }

    #[test]
    fn lossless_noiseless_has_zero_holevo() {
        let p = CkaCvParams {
            m_mod: 20.0,
            n: 5,
            transmittance: 1.0,
            p_det: 1.0,
            v_el: 0.0,
            beta: 1.0,
            r_source_hz: 100e6,
        };
        let r = cv_cka_skr(&p).unwrap();
        // frozen from the 60-digit reference evaluation
        assert!((r.secret_per_use - 1.0983660177328194).abs() < 1e-11);
        assert!((r.secret_per_use - p.beta * r.raw_per_use).abs() < 1e-11, "chi must vanish");
    }

    #[test]
    fn baseline_hundred_meters_reference_point() {
        let r = cv_cka_skr(&baseline(20.0, 5, 0.1)).unwrap();
        assert!((r.secret_per_use - 0.65119418597225267).abs() < 1e-11);
        assert!((r.raw_per_use - 1.0892865516634818).abs() < 1e-11);
    }

    #[test]
    fn modulation_at_unity_gives_no_key() {
        let r = cv_cka_skr(&baseline(1.0 + 1e-9, 5, 0.1)).unwrap();
        assert!(r.secret_per_use < 1e-9);
        assert!(cv_cka_skr(&baseline(1.0, 5, 0.1)).is_err());
    }

    #[test]
    fn rate_non_increasing_in_party_count() {
        let mut prev = f64::INFINITY;
        for n in 2..10 {
            let k = cv_cka_skr(&baseline(12.0, n, 0.2)).unwrap().secret_per_use;
            assert!(k <= prev + 1e-12, "n={n}: {k} > {prev}");
            prev = k;
        }
    }

    #[test]
    fn omega_identity_holds() {
        let p = baseline(8.0, 4, 0.1);
        assert!((p.omega() - (2.0 * p.delta() + 1.0)).abs() < 1e-15);
    }
}
