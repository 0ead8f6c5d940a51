//! Gaussian-modulation key rate (trusted detector noise model).
//!
//! The eavesdropper bound comes from the symplectic eigenvalues of the
//! two-mode covariance matrix before and after the coherent measurement,
//! `chi_BE = G((l1-1)/2) + G((l2-1)/2) - sum_{i=3..5} G((li-1)/2)` with
//! `l5 = 1`.
//!
//! Note on the heterodyne branch: the conditional-eigenvalue coefficient
//! `C` uses the denominator `(T (V + chi_tot))^2`. The transposed variant
//! `(V (T + chi_tot))^2` that sometimes appears in print produces complex
//! eigenvalues already for ideal channels and is unphysical.

use serde::{Deserialize, Serialize};

use super::{checked_sqrt, g0, mutual_information, CvParams, Detection};
use crate::dv::RateResult;
use crate::error::Result;

/// Intermediate quantities of the Holevo-bound computation, exposed for
/// inspection and testing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvHolevoIntermediates {
    pub chi_line: f64,
    pub chi_det: f64,
    pub chi_tot: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Symplectic eigenvalues; the fifth is 1 by construction.
    pub lambda: [f64; 5],
    /// `V = V_A + 1`.
    pub v: f64,
    /// Covariance entries of the discrete-modulation path; unused here.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
}

/// Holevo bound on the eavesdropper information, bits per symbol.
pub fn gaussian_holevo_bound(p: &CvParams) -> Result<(f64, CvHolevoIntermediates)> {
    p.validate()?;
    let t = p.transmittance;
    let v = p.v_a + 1.0;
    let chi_line = 1.0 / t - 1.0 + p.excess_noise;
    let chi_det = match p.detection {
        Detection::Homodyne => (1.0 - p.p_det + p.v_el) / p.p_det,
        Detection::Heterodyne => (2.0 - p.p_det + 2.0 * p.v_el) / p.p_det,
    };
    let chi_tot = chi_line + chi_det / t;

    let a = v * v * (1.0 - 2.0 * t) + 2.0 * t + t * t * (v + chi_line).powi(2);
    let b = (t * (v * chi_line + 1.0)).powi(2);
    let sq_b = b.sqrt();
    let disc12 = checked_sqrt(a * a - 4.0 * b, a * a, "lambda_12 discriminant")?;
    let l1 = checked_sqrt((a + disc12) / 2.0, a, "lambda_1")?;
    let l2 = checked_sqrt((a - disc12) / 2.0, a, "lambda_2")?;

    let denom = t * (v + chi_tot);
    let (c, d) = match p.detection {
        Detection::Homodyne => (
            (a * chi_det + v * sq_b + t * (v + chi_line)) / denom,
            sq_b * (v + sq_b * chi_det) / denom,
        ),
        Detection::Heterodyne => (
            (a * chi_det * chi_det
                + b
                + 1.0
                + 2.0 * chi_det * (v * sq_b + t * (v + chi_line))
                + 2.0 * t * (v * v - 1.0))
                / (denom * denom),
            ((v + sq_b * chi_det) / denom).powi(2),
        ),
    };
    let disc34 = checked_sqrt(c * c - 4.0 * d, c * c, "lambda_34 discriminant")?;
    let l3 = checked_sqrt((c + disc34) / 2.0, c, "lambda_3")?;
    let l4 = checked_sqrt((c - disc34) / 2.0, c, "lambda_4")?;

    let chi = g0((l1 - 1.0) / 2.0) + g0((l2 - 1.0) / 2.0)
        - g0((l3 - 1.0) / 2.0)
        - g0((l4 - 1.0) / 2.0);
    let inter = CvHolevoIntermediates {
        chi_line,
        chi_det,
        chi_tot,
        a,
        b,
        c,
        d,
        lambda: [l1, l2, l3, l4, 1.0],
        v,
        w: None,
        z: None,
    };
    Ok((chi, inter))
}

/// Secret key rate `K = max(0, beta I_AB - chi_BE)` and the derived bit/s.
pub fn gaussian_skr(p: &CvParams) -> Result<RateResult> {
    let iab = mutual_information(p);
    let (chi, _) = gaussian_holevo_bound(p)?;
    let k = (p.beta * iab - chi).max(0.0);
    Ok(RateResult {
        raw_per_use: iab,
        secret_per_use: k,
        secret_bps: k * p.r_source_hz,
    })
}

/// Key rate with the modulation variance optimized over `[v_lo, v_hi]`.
/// Returns the optimizer choice, the rate at the optimum and whether the
/// optimum sat on the bracket edge.
pub fn gaussian_skr_optimized(p: &CvParams, v_lo: f64, v_hi: f64) -> Result<(f64, RateResult, bool)> {
    let opt = super::optimize_modulation(
        |v_a| Ok(gaussian_skr(&p.with_v_a(v_a))?.secret_per_use),
        v_lo,
        v_hi,
    )?;
    let rate = gaussian_skr(&p.with_v_a(opt.v_a))?;
    Ok((opt.v_a, rate, opt.boundary))
}
