//! Shared fixture plumbing for the integration tests.

use serde::Deserialize;

use qnet_energy::cv::{
    cv_cka_information, gaussian_holevo_bound, mutual_information, psk_holevo_bound, CkaCvParams,
    CvParams, Detection, PskParams,
};

#[derive(Deserialize)]
pub struct Fixtures {
    pub gaussian: Vec<GaussianCase>,
    pub psk: Vec<PskCase>,
    pub cka: Vec<CkaCase>,
}

#[derive(Deserialize)]
pub struct GaussianCase {
    pub v_a: String,
    pub t: String,
    pub xi: String,
    pub p_det: String,
    pub v_el: String,
    pub beta: String,
    pub detection: String,
    pub iab: String,
    pub chi: String,
    pub k: String,
}

#[derive(Deserialize)]
pub struct PskCase {
    pub m: u32,
    pub alpha_sq: String,
    pub t: String,
    pub xi: String,
    pub p_det: String,
    pub v_el: String,
    pub beta: String,
    pub detection: String,
    pub iab: String,
    pub chi: String,
    pub k: String,
}

#[derive(Deserialize)]
pub struct CkaCase {
    pub m_mod: String,
    pub n: u32,
    pub t: String,
    pub p_det: String,
    pub v_el: String,
    pub beta: String,
    pub iab: String,
    pub chi: String,
    pub k: String,
}

pub fn f(s: &str) -> f64 {
    s.parse().expect("fixture number")
}

pub fn detection(s: &str) -> Detection {
    match s {
        "hom" => Detection::Homodyne,
        "het" => Detection::Heterodyne,
        other => panic!("unknown detection `{other}`"),
    }
}

pub fn load_fixtures() -> Fixtures {
    serde_json::from_str(include_str!("../fixtures/cv_oracle.json")).expect("fixtures parse")
}

/// Evaluate every fixture case; returns labelled (actual, expected) pairs
/// for iab, chi and k of each case.
pub fn evaluate_fixtures(fx: &Fixtures) -> Vec<(String, f64, f64)> {
    let mut out = Vec::new();
    for (i, c) in fx.gaussian.iter().enumerate() {
        let p = CvParams {
            v_a: f(&c.v_a),
            transmittance: f(&c.t),
            excess_noise: f(&c.xi),
            p_det: f(&c.p_det),
            v_el: f(&c.v_el),
            beta: f(&c.beta),
            detection: detection(&c.detection),
            r_source_hz: 1.0,
        };
        let iab = mutual_information(&p);
        let (chi, _) = gaussian_holevo_bound(&p).unwrap();
        let k = (p.beta * iab - chi).max(0.0);
        out.push((format!("gaussian[{i}].iab"), iab, f(&c.iab)));
        out.push((format!("gaussian[{i}].chi"), chi, f(&c.chi)));
        out.push((format!("gaussian[{i}].k"), k, f(&c.k)));
    }
    for (i, c) in fx.psk.iter().enumerate() {
        let base = CvParams {
            v_a: 2.0 * f(&c.alpha_sq),
            transmittance: f(&c.t),
            excess_noise: f(&c.xi),
            p_det: f(&c.p_det),
            v_el: f(&c.v_el),
            beta: f(&c.beta),
            detection: detection(&c.detection),
            r_source_hz: 1.0,
        };
        let p = PskParams::new(base, c.m).unwrap();
        let iab = mutual_information(&base);
        let chi = psk_holevo_bound(&p).unwrap();
        let k = (base.beta * iab - chi).max(0.0);
        out.push((format!("psk[{i}].iab"), iab, f(&c.iab)));
        out.push((format!("psk[{i}].chi"), chi, f(&c.chi)));
        out.push((format!("psk[{i}].k"), k, f(&c.k)));
    }
    for (i, c) in fx.cka.iter().enumerate() {
        let p = CkaCvParams {
            m_mod: f(&c.m_mod),
            n: c.n,
            transmittance: f(&c.t),
            p_det: f(&c.p_det),
            v_el: f(&c.v_el),
            beta: f(&c.beta),
            r_source_hz: 1.0,
        };
        let (iab, chi) = cv_cka_information(&p).unwrap();
        let k = (p.beta * iab - chi).max(0.0);
        out.push((format!("cka[{i}].iab"), iab, f(&c.iab)));
        out.push((format!("cka[{i}].chi"), chi, f(&c.chi)));
        out.push((format!("cka[{i}].k"), k, f(&c.k)));
    }
    out
}
