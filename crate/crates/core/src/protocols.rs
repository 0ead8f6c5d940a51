//! Builders binding catalog components and rate formulas into concrete
//! protocol instances.
//!
//! Component conventions, fixed by the published per-protocol power sums:
//! - a weak-pulse source is a telecom/NIR/visible laser plus an amplitude
//!   modulator; polarization encoding adds motorized waveplate stations on
//!   the manipulation side (one per encoding/measurement station);
//! - a photon-pair source is a pump laser plus a crystal oven (plus source
//!   waveplates outside the table-reproduction preset);
//! - every protocol node runs a computer, and every single-photon
//!   detection station a time tagger. The table-reproduction preset for
//!   the relay-measurement link omits the classical components, matching
//!   the published 4070 W sum.

use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::channel::{transmittance, FiberChannel};
use crate::cv::{
    cv_cka_skr, gaussian_skr, gaussian_skr_optimized, optimize_modulation, psk_skr,
    psk_skr_optimized, CkaCvParams, CvParams, Detection, PskParams,
};
use crate::dv::{
    bb84_raw_rate, dv_secret_rate, e91_raw_rate, ghz_cka_raw_rate, mdi_raw_rate, DvLinkParams,
    DvNoise, DvPreset, FusionMode, RateResult, DEFAULT_FUSION_PROBABILITY,
};
use crate::energy::{ClassicalCostParams, ComponentCount, ProtocolSetup};
use crate::error::{Error, Result};

/// Default modulation-variance bracket for the CV optimizer.
pub const VA_BRACKET: (f64, f64) = (0.05, 500.0);
/// Narrower default for discrete modulation, whose bound holds only at
/// moderate amplitudes.
pub const PSK_VA_BRACKET: (f64, f64) = (0.05, 50.0);
/// Modulation bracket for the multipartite CV protocol.
pub const M_MOD_BRACKET: (f64, f64) = (1.0 + 1e-4, 100.0);
/// ADC channels per unit in the multipartite CV relay.
pub const ADC_CHANNELS: u32 = 4;

/// Protocol family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Bb84,
    E91,
    Mdi,
    CvGaussian,
    CvPsk,
    GhzCka,
    BellCka,
    Bb84Cka,
    CvCka,
    NcvQkd,
    AlltoallPairs,
    AlltoallGhz,
}

impl Family {
    pub fn is_multiparty(self) -> bool {
        matches!(
            self,
            Family::GhzCka
                | Family::BellCka
                | Family::Bb84Cka
                | Family::CvCka
                | Family::NcvQkd
                | Family::AlltoallPairs
                | Family::AlltoallGhz
        )
    }

    pub fn is_cv(self) -> bool {
        matches!(
            self,
            Family::CvGaussian | Family::CvPsk | Family::CvCka | Family::NcvQkd
        )
    }
}

/// Qubit encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    #[default]
    Polarization,
    TimeBin,
    Quadrature,
}

/// Detector class; the concrete catalog component follows from the
/// wavelength band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detector {
    #[default]
    Snspd,
    IngaasApd,
    SiApd,
    Bhd,
}

/// CV detection variant: homodyne/heterodyne, single/double polarization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetectionVariant {
    #[serde(rename = "hom_1p")]
    Hom1p,
    #[serde(rename = "hom_2p")]
    Hom2p,
    #[serde(rename = "het_1p")]
    Het1p,
    #[serde(rename = "het_2p")]
    Het2p,
}

impl DetectionVariant {
    pub fn detection(self) -> Detection {
        match self {
            DetectionVariant::Hom1p | DetectionVariant::Hom2p => Detection::Homodyne,
            DetectionVariant::Het1p | DetectionVariant::Het2p => Detection::Heterodyne,
        }
    }

    /// Number of independent polarization channels.
    pub fn polarizations(self) -> u32 {
        match self {
            DetectionVariant::Hom1p | DetectionVariant::Het1p => 1,
            DetectionVariant::Hom2p | DetectionVariant::Het2p => 2,
        }
    }

    fn bhd_count(self) -> u32 {
        match self {
            DetectionVariant::Hom1p => 1,
            DetectionVariant::Hom2p | DetectionVariant::Het1p => 2,
            DetectionVariant::Het2p => 4,
        }
    }

    fn needs_phase_modulator(self) -> bool {
        matches!(self, DetectionVariant::Hom1p | DetectionVariant::Hom2p)
    }
}

/// Optional per-spec parameter overrides.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Overrides {
    pub mu: Option<f64>,
    pub qber: Option<f64>,
    pub p_fusion: Option<f64>,
    pub fusion_mode: Option<FusionMode>,
    /// Fix the CV modulation variance instead of optimizing it.
    pub v_a: Option<f64>,
    /// Fix the multipartite CV modulation instead of optimizing it.
    pub m_mod: Option<f64>,
    /// PSK constellation size (default 4).
    pub m_psk: Option<u32>,
    /// Per-symbol signal-processing cost; enables the DSP term (CV only).
    pub tau_dsp: Option<f64>,
    /// Add the IQ-modulator draw to each multipartite CV source.
    pub include_iq_modulator: bool,
}

/// A protocol instance to build.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSpec {
    pub family: Family,
    #[serde(default)]
    pub encoding: Encoding,
    #[serde(default = "default_wavelength")]
    pub wavelength_nm: f64,
    #[serde(default)]
    pub detector: Detector,
    #[serde(default)]
    pub detection_variant: Option<DetectionVariant>,
    #[serde(default)]
    pub n_parties: Option<u32>,
    pub distance_km: f64,
    #[serde(default)]
    pub preset: DvPreset,
    #[serde(default)]
    pub overrides: Overrides,
}

fn default_wavelength() -> f64 {
    1550.0
}

impl ProtocolSpec {
    /// A bipartite DV link with the standard component set for the band.
    pub fn bipartite(family: Family, detector: Detector, distance_km: f64, preset: DvPreset) -> Self {
        Self {
            family,
            encoding: Encoding::Polarization,
            wavelength_nm: 1550.0,
            detector,
            detection_variant: None,
            n_parties: None,
            distance_km,
            preset,
            overrides: Overrides::default(),
        }
    }

    /// A bipartite CV link.
    pub fn cv(family: Family, variant: DetectionVariant, distance_km: f64) -> Self {
        Self {
            family,
            encoding: Encoding::Quadrature,
            wavelength_nm: 1550.0,
            detector: Detector::Bhd,
            detection_variant: Some(variant),
            n_parties: None,
            distance_km,
            preset: DvPreset::BaselineTable2,
            overrides: Overrides::default(),
        }
    }

    /// A multipartite protocol over a star (or all-to-all) of `n` parties.
    pub fn multiparty(family: Family, n: u32, distance_km: f64, preset: DvPreset) -> Self {
        Self {
            family,
            encoding: Encoding::Polarization,
            wavelength_nm: 1550.0,
            detector: Detector::Snspd,
            detection_variant: if matches!(family, Family::NcvQkd) {
                Some(DetectionVariant::Hom2p)
            } else {
                None
            },
            n_parties: Some(n),
            distance_km,
            preset,
            overrides: Overrides::default(),
        }
    }

    fn qber(&self) -> f64 {
        self.overrides.qber.unwrap_or(self.preset.qber())
    }

    fn fusion(&self) -> (FusionMode, f64) {
        (
            self.overrides.fusion_mode.unwrap_or_default(),
            self.overrides.p_fusion.unwrap_or(DEFAULT_FUSION_PROBABILITY),
        )
    }
}

/// Distances of a star network: each party sits `star_distance_km` from
/// the central node; any two parties are `pairwise_distance_km` apart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkTopology {
    pub n: u32,
    pub star_distance_km: f64,
    pub pairwise_distance_km: f64,
}

impl NetworkTopology {
    pub fn new(n: u32, star_distance_km: f64, pairwise_distance_km: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Validation(format!("topology needs n >= 2, got {n}")));
        }
        if !(star_distance_km >= 0.0) || !(pairwise_distance_km >= 0.0) {
            return Err(Error::Validation("topology distances must be non-negative".into()));
        }
        Ok(Self {
            n,
            star_distance_km,
            pairwise_distance_km,
        })
    }
}

/// Wavelength band of the builtin fiber table.
fn band(wavelength_nm: f64) -> u32 {
    let bands = [532u32, 780, 1550];
    *bands
        .iter()
        .min_by(|a, b| {
            (**a as f64 - wavelength_nm)
                .abs()
                .total_cmp(&(**b as f64 - wavelength_nm).abs())
        })
        .unwrap()
}

/// Weak-coherent-pulse laser for a band.
fn pulse_laser(wavelength_nm: f64) -> &'static str {
    match band(wavelength_nm) {
        532 => "laser_verdi_c_532",
        780 => "laser_dlc_ta_pro_795",
        _ => "laser_koheras_x15_1550",
    }
}

/// Photon-pair pump laser (the pair source is band-independent here; the
/// published setups pump at 780 nm).
const SPDC_LASER: &str = "laser_mira_hp_f_780";

/// Concrete detector component for a class at a wavelength.
fn detector_id(detector: Detector, wavelength_nm: f64) -> Result<&'static str> {
    let b = band(wavelength_nm);
    match (detector, b) {
        (Detector::Snspd, 1550) => Ok("snspd_1550"),
        (Detector::Snspd, 780) => Ok("snspd_780"),
        (Detector::IngaasApd, 1550) => Ok("ingaas_apd_1550"),
        (Detector::SiApd, 780) => Ok("si_apd_780"),
        (Detector::SiApd, 532) => Ok("si_apd_523"),
        (Detector::Bhd, 1550) => Ok("bhd_1550"),
        _ => Err(Error::Validation(format!(
            "detector {detector:?} is not available in the {b} nm band"
        ))),
    }
}

fn link_params(spec: &ProtocolSpec, cat: &Catalog, length_km: f64) -> Result<DvLinkParams> {
    let loss = cat.fiber_loss_db_per_km(spec.wavelength_nm)?;
    let p_det = cat.efficiency_of(detector_id(spec.detector, spec.wavelength_nm)?)?;
    let mut p = spec
        .preset
        .link(p_det, FiberChannel::new(length_km, loss, spec.wavelength_nm)?);
    if let Some(mu) = spec.overrides.mu {
        p.mu = mu;
    }
    p.validate()?;
    Ok(p)
}

fn counts(items: &[(&str, u32)]) -> Vec<ComponentCount> {
    items
        .iter()
        .filter(|(_, n)| *n > 0)
        .map(|(id, n)| ComponentCount::new(id, *n))
        .collect()
}

fn forbid_dsp(spec: &ProtocolSpec) -> Result<()> {
    if spec.overrides.tau_dsp.is_some() {
        return Err(Error::Validation(
            "signal-processing cost applies to CV protocols only".into(),
        ));
    }
    Ok(())
}

/// Prepare-and-measure link over one fiber span.
pub fn build_bb84(spec: &ProtocolSpec, cat: &Catalog) -> Result<ProtocolSetup> {
    forbid_dsp(spec)?;
    let params = link_params(spec, cat, spec.distance_km)?;
    let rate = dv_secret_rate(
        bb84_raw_rate(&params),
        DvNoise::new(spec.qber())?,
        params.r_source_hz,
    );
    let det = detector_id(spec.detector, spec.wavelength_nm)?;
    let laser = pulse_laser(spec.wavelength_nm);
    let (source, manipulation) = match spec.encoding {
        Encoding::Polarization => (
            counts(&[(laser, 1), ("modulator_am", 1)]),
            counts(&[("waveplates", 2)]),
        ),
        Encoding::TimeBin => (
            counts(&[(laser, 1), ("modulator_am", 1), ("interferometry", 1)]),
            counts(&[("interferometry", 2)]),
        ),
        Encoding::Quadrature => {
            return Err(Error::Validation("quadrature encoding is a CV family".into()))
        }
    };
    Ok(ProtocolSetup {
        name: "bb84".into(),
        source_components: source,
        manipulation_components: manipulation,
        detection_components: counts(&[(det, 1)]),
        classical_components: counts(&[("computer", 2), ("time_tagger", 1)]),
        rate,
        dsp: None,
    })
}

/// Entanglement-based link: a central pair source, both photons measured.
pub fn build_e91(spec: &ProtocolSpec, cat: &Catalog) -> Result<ProtocolSetup> {
    forbid_dsp(spec)?;
    let params = link_params(spec, cat, spec.distance_km)?;
    let rate = dv_secret_rate(
        e91_raw_rate(&params),
        DvNoise::new(spec.qber())?,
        params.r_source_hz,
    );
    let det = detector_id(spec.detector, spec.wavelength_nm)?;
    // Source waveplates belong to the pair source but are absent from the
    // published power sum; only the baseline preset carries them.
    let source_wp = match (spec.preset, spec.encoding) {
        (DvPreset::Table4Repro, _) => 0,
        (_, Encoding::Polarization) => 1,
        _ => 0,
    };
    let (source, manipulation) = match spec.encoding {
        Encoding::Polarization => (
            counts(&[(SPDC_LASER, 1), ("oven", 1), ("waveplates", source_wp)]),
            counts(&[("waveplates", 2)]),
        ),
        Encoding::TimeBin => (
            counts(&[(SPDC_LASER, 1), ("oven", 1), ("modulator_am", 1)]),
            counts(&[("interferometry", 2)]),
        ),
        Encoding::Quadrature => {
            return Err(Error::Validation("quadrature encoding is a CV family".into()))
        }
    };
    Ok(ProtocolSetup {
        name: "e91".into(),
        source_components: source,
        manipulation_components: manipulation,
        detection_components: counts(&[(det, 2)]),
        classical_components: counts(&[("computer", 2), ("time_tagger", 2)]),
        rate,
        dsp: None,
    })
}

/// Relay-measurement link: both parties send weak pulses to a central
/// Bell-state measurement.
pub fn build_mdi(spec: &ProtocolSpec, cat: &Catalog) -> Result<ProtocolSetup> {
    forbid_dsp(spec)?;
    let params = link_params(spec, cat, spec.distance_km)?;
    let rate = dv_secret_rate(
        mdi_raw_rate(&params),
        DvNoise::new(spec.qber())?,
        params.r_source_hz,
    );
    let det = detector_id(spec.detector, spec.wavelength_nm)?;
    let laser = pulse_laser(spec.wavelength_nm);
    // Two complete encoding sources; the polarization Bell measurement is
    // passive, the time-bin one needs two interferometers.
    let source = counts(&[(laser, 2), ("modulator_am", 2), ("waveplates", 2)]);
    let manipulation = match spec.encoding {
        Encoding::Polarization => vec![],
        Encoding::TimeBin => counts(&[("interferometry", 2)]),
        Encoding::Quadrature => {
            return Err(Error::Validation("quadrature encoding is a CV family".into()))
        }
    };
    // The published power sum for this protocol carries no classical
    // components; the default set is one computer per node (two senders
    // plus the relay) and a time tagger at the detection station.
    let classical = match spec.preset {
        DvPreset::Table4Repro => vec![],
        _ => counts(&[("computer", 3), ("time_tagger", 1)]),
    };
    Ok(ProtocolSetup {
        name: "mdi".into(),
        source_components: source,
        manipulation_components: manipulation,
        detection_components: counts(&[(det, 1)]),
        classical_components: classical,
        rate,
        dsp: None,
    })
}

/// CV source components shared by the bipartite and multipartite families.
fn cv_source() -> Vec<ComponentCount> {
    counts(&[
        ("laser_koheras_x15_1550", 1),
        ("modulator_iq", 1),
        ("dac", 1),
        ("photodiode", 1),
    ])
}

fn cv_detection(variant: DetectionVariant) -> Vec<ComponentCount> {
    counts(&[
        ("adc", 1),
        ("laser_koheras_x15_1550", 1),
        ("bhd_1550", variant.bhd_count()),
        ("polarization_controller", 1),
        ("phase_modulator", if variant.needs_phase_modulator() { 1 } else { 0 }),
    ])
}

/// Table-2 CV link parameters at a given distance.
fn cv_params(spec: &ProtocolSpec, cat: &Catalog, variant: DetectionVariant) -> Result<CvParams> {
    let loss = cat.fiber_loss_db_per_km(spec.wavelength_nm)?;
    let p_det = cat.efficiency_of("bhd_1550")?;
    Ok(CvParams {
        v_a: spec.overrides.v_a.unwrap_or(1.0),
        transmittance: transmittance(spec.distance_km, loss),
        excess_noise: 0.01,
        p_det,
        v_el: 0.005,
        beta: 0.95,
        detection: variant.detection(),
        // double polarization doubles the symbol throughput
        r_source_hz: 100e6 * variant.polarizations() as f64,
    })
}

fn cv_rate(spec: &ProtocolSpec, params: &CvParams) -> Result<RateResult> {
    match spec.family {
        Family::CvPsk => {
            let m = spec.overrides.m_psk.unwrap_or(4);
            if spec.overrides.v_a.is_some() {
                psk_skr(&PskParams::new(*params, m)?)
            } else {
                let (_, rate, _) = psk_skr_optimized(
                    &PskParams::new(*params, m)?,
                    PSK_VA_BRACKET.0,
                    PSK_VA_BRACKET.1,
                )?;
                Ok(rate)
            }
        }
        _ => {
            if spec.overrides.v_a.is_some() {
                gaussian_skr(params)
            } else {
                let (_, rate, _) = gaussian_skr_optimized(params, VA_BRACKET.0, VA_BRACKET.1)?;
                Ok(rate)
            }
        }
    }
}

fn dsp_from(spec: &ProtocolSpec) -> Result<Option<ClassicalCostParams>> {
    spec.overrides
        .tau_dsp
        .map(ClassicalCostParams::new)
        .transpose()
}

/// Bipartite CV link (Gaussian or PSK modulation).
pub fn build_cv_qkd(spec: &ProtocolSpec, cat: &Catalog) -> Result<ProtocolSetup> {
    let variant = spec.detection_variant.ok_or_else(|| {
        Error::Validation("CV families need a detection_variant (hom/het, 1p/2p)".into())
    })?;
    let params = cv_params(spec, cat, variant)?;
    let rate = cv_rate(spec, &params)?;
    Ok(ProtocolSetup {
        name: match spec.family {
            Family::CvPsk => "cv_psk".into(),
            _ => "cv_gaussian".into(),
        },
        source_components: cv_source(),
        manipulation_components: vec![],
        detection_components: cv_detection(variant),
        classical_components: counts(&[("computer", 2)]),
        rate,
        dsp: dsp_from(spec)?,
    })
}

/// Multipartite architectures over a star topology.
pub fn build_multiparty(
    spec: &ProtocolSpec,
    topo: &NetworkTopology,
    cat: &Catalog,
) -> Result<ProtocolSetup> {
    let n = topo.n;
    match spec.family {
        Family::GhzCka | Family::AlltoallGhz => {
            forbid_dsp(spec)?;
            if n < 3 {
                return Err(Error::Validation(format!(
                    "GHZ distribution needs at least 3 parties, got {n}"
                )));
            }
            let params = link_params(spec, cat, 0.0)?;
            let loss = cat.fiber_loss_db_per_km(spec.wavelength_nm)?;
            let (mode, p_fusion) = spec.fusion();
            let raw = ghz_cka_raw_rate(&params, n, topo.star_distance_km, loss, mode, p_fusion)?;
            let rate = if spec.family == Family::GhzCka {
                dv_secret_rate(raw, DvNoise::new(spec.qber())?, params.r_source_hz)
            } else {
                // entanglement distribution: the target counts raw states
                RateResult {
                    raw_per_use: raw,
                    secret_per_use: raw,
                    secret_bps: raw * params.r_source_hz,
                }
            };
            let n_sources = n.div_ceil(2);
            let n_fusions = (n - 1) / 2;
            let source_wp = match (spec.preset, spec.encoding) {
                (DvPreset::Table4Repro, _) => 0,
                (_, Encoding::Polarization) => n_sources,
                _ => 0,
            };
            let det = detector_id(spec.detector, spec.wavelength_nm)?;
            let (source, manipulation) = match spec.encoding {
                Encoding::TimeBin => (
                    counts(&[(SPDC_LASER, n_sources), ("oven", n_sources), ("modulator_am", n_sources)]),
                    counts(&[("modulator_am", n_fusions)]),
                ),
                _ => (
                    counts(&[(SPDC_LASER, n_sources), ("oven", n_sources), ("waveplates", source_wp)]),
                    counts(&[("waveplates", n_fusions)]),
                ),
            };
            Ok(ProtocolSetup {
                name: if spec.family == Family::GhzCka {
                    "ghz_cka".into()
                } else {
                    "alltoall_ghz".into()
                },
                source_components: source,
                manipulation_components: manipulation,
                detection_components: counts(&[(det, n)]),
                classical_components: counts(&[("computer", n), ("time_tagger", n)]),
                rate,
                dsp: None,
            })
        }
        Family::AlltoallPairs => {
            forbid_dsp(spec)?;
            if n < 3 {
                return Err(Error::Validation(format!(
                    "all-to-all distribution needs at least 3 parties, got {n}"
                )));
            }
            // One midway pair source per pair; a pair link spans the full
            // pairwise distance. All pairs run in parallel, so the rate of
            // a single pair sets the runtime.
            let params = link_params(spec, cat, topo.pairwise_distance_km)?;
            let raw = e91_raw_rate(&params);
            let rate = RateResult {
                raw_per_use: raw,
                secret_per_use: raw,
                secret_bps: raw * params.r_source_hz,
            };
            let pairs = n * (n - 1) / 2;
            let det = detector_id(spec.detector, spec.wavelength_nm)?;
            Ok(ProtocolSetup {
                name: "alltoall_pairs".into(),
                source_components: counts(&[(SPDC_LASER, pairs), ("oven", pairs)]),
                manipulation_components: counts(&[("waveplates", n * (n - 1))]),
                detection_components: counts(&[(det, n)]),
                classical_components: counts(&[("computer", n), ("time_tagger", n)]),
                rate,
                dsp: None,
            })
        }
        Family::Bb84Cka | Family::BellCka => {
            forbid_dsp(spec)?;
            if n < 3 {
                return Err(Error::Validation(format!(
                    "conference key agreement needs at least 3 parties, got {n}"
                )));
            }
            // n - 1 bipartite links run in parallel; hardware scales with
            // the link count, runtime equals a single link's.
            let links = n - 1;
            let link_spec = ProtocolSpec {
                family: if spec.family == Family::Bb84Cka {
                    Family::Bb84
                } else {
                    Family::E91
                },
                n_parties: None,
                distance_km: topo.star_distance_km,
                ..*spec
            };
            let single = if spec.family == Family::Bb84Cka {
                build_bb84(&link_spec, cat)?
            } else {
                build_e91(&link_spec, cat)?
            };
            let scale = |items: &[ComponentCount]| {
                items
                    .iter()
                    .map(|c| ComponentCount::new(&c.id, c.count * links))
                    .collect::<Vec<_>>()
            };
            Ok(ProtocolSetup {
                name: if spec.family == Family::Bb84Cka {
                    "bb84_cka".into()
                } else {
                    "bell_cka".into()
                },
                source_components: scale(&single.source_components),
                manipulation_components: scale(&single.manipulation_components),
                detection_components: scale(&single.detection_components),
                classical_components: scale(&single.classical_components),
                rate: single.rate,
                dsp: None,
            })
        }
        Family::CvCka => {
            let loss = cat.fiber_loss_db_per_km(spec.wavelength_nm)?;
            let p_det = cat.efficiency_of("bhd_1550")?;
            let base = CkaCvParams {
                m_mod: spec.overrides.m_mod.unwrap_or(2.0),
                n,
                transmittance: transmittance(topo.star_distance_km, loss),
                p_det,
                v_el: 0.005,
                beta: 0.95,
                r_source_hz: 100e6,
            };
            let rate = if spec.overrides.m_mod.is_some() {
                cv_cka_skr(&base)?
            } else {
                let opt = optimize_modulation(
                    |m| Ok(cv_cka_skr(&base.with_m_mod(m))?.secret_per_use),
                    M_MOD_BRACKET.0,
                    M_MOD_BRACKET.1,
                )?;
                cv_cka_skr(&base.with_m_mod(opt.v_a))?
            };
            // Per-user source: laser, bias controller, DAC, computer. The
            // IQ modulator itself is absent from the published source sum;
            // a flag adds it.
            let iq_extra = if spec.overrides.include_iq_modulator { n } else { 0 };
            Ok(ProtocolSetup {
                name: "cv_cka".into(),
                source_components: counts(&[
                    ("laser_koheras_x15_1550", n),
                    ("modulator_iq", n + iq_extra),
                    ("dac", n),
                    ("computer", n),
                ]),
                manipulation_components: vec![],
                detection_components: counts(&[
                    ("bhd_1550", n),
                    ("adc", n.div_ceil(ADC_CHANNELS)),
                    ("computer", 1),
                    ("laser_koheras_x15_1550", n),
                ]),
                classical_components: vec![],
                rate,
                dsp: dsp_from(spec)?,
            })
        }
        Family::NcvQkd => {
            if n < 2 {
                return Err(Error::Validation(format!(
                    "parallel CV conference needs at least 2 parties, got {n}"
                )));
            }
            let links = n - 1;
            let variant = spec.detection_variant.unwrap_or(DetectionVariant::Hom2p);
            let link_spec = ProtocolSpec {
                family: Family::CvGaussian,
                detection_variant: Some(variant),
                n_parties: None,
                distance_km: topo.star_distance_km,
                ..*spec
            };
            let single = build_cv_qkd(&link_spec, cat)?;
            let scale = |items: &[ComponentCount]| {
                items
                    .iter()
                    .map(|c| ComponentCount::new(&c.id, c.count * links))
                    .collect::<Vec<_>>()
            };
            Ok(ProtocolSetup {
                name: "ncv_qkd".into(),
                source_components: scale(&single.source_components),
                manipulation_components: scale(&single.manipulation_components),
                detection_components: scale(&single.detection_components),
                classical_components: scale(&single.classical_components),
                rate: single.rate,
                dsp: single.dsp,
            })
        }
        _ => Err(Error::Validation(format!(
            "{:?} is not a multiparty family",
            spec.family
        ))),
    }
}

/// Build any protocol instance from its spec.
pub fn build(spec: &ProtocolSpec, cat: &Catalog) -> Result<ProtocolSetup> {
    if spec.family.is_multiparty() {
        let n = spec.n_parties.ok_or_else(|| {
            Error::Validation(format!("{:?} needs n_parties", spec.family))
        })?;
        let topo = NetworkTopology::new(n, spec.distance_km, spec.distance_km)?;
        build_multiparty(spec, &topo, cat)
    } else {
        match spec.family {
            Family::Bb84 => build_bb84(spec, cat),
            Family::E91 => build_e91(spec, cat),
            Family::Mdi => build_mdi(spec, cat),
            Family::CvGaussian | Family::CvPsk => build_cv_qkd(spec, cat),
            _ => unreachable!("multiparty families handled above"),
        }
    }
}
