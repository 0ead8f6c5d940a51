//! Hardware component registry and baseline fiber data.
//!
//! The catalog is an immutable map of lab components (lasers, detectors,
//! modulators, classical electronics) with their rated power draw, one-time
//! startup energy and, where available, directly measured values. A catalog
//! is loaded once, validated, and then shared read-only by every sweep
//! worker.
//!
//! File format is TOML: one `[component.<id>]` table per component with
//! energies in kJ (converted to J at load), plus a `[fiber]` table mapping a
//! wavelength in nm to a loss coefficient in dB/km.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Functional class of a hardware component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Laser,
    Detector,
    ModulatorAm,
    ModulatorIq,
    Oven,
    Waveplates,
    Interferometry,
    PolarizationController,
    Powermeter,
    OpticalSwitch,
    Adc,
    Dac,
    Computer,
    TimeTagger,
    Bhd,
    Photodiode,
    Custom,
}

impl Category {
    fn is_detector_like(self) -> bool {
        matches!(self, Category::Detector | Category::Bhd)
    }
}

/// Which column of the catalog feeds the energy model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueMode {
    /// Manufacturer datasheet numbers.
    #[default]
    Datasheet,
    /// Lab-measured numbers where present, datasheet otherwise.
    MeasuredPreferred,
}

/// One hardware element. Energies in Joule, powers in Watt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub id: String,
    pub category: Category,
    pub wavelength_nm: Option<f64>,
    pub startup_energy_j: f64,
    pub power_w: f64,
    pub measured_startup_j: Option<f64>,
    pub measured_power_w: Option<f64>,
    /// Present exactly for detectors and balanced homodyne detectors.
    pub detection_efficiency: Option<f64>,
    /// Startup energy was measured by integrating a live power trace.
    pub startup_integrated: bool,
    /// Entry is an assumption, not a catalogued device; override as needed.
    pub assumed: bool,
}

impl ComponentSpec {
    /// Power under the given value mode. Measured-preferred falls back to
    /// the datasheet value when no measurement exists.
    pub fn effective_power(&self, mode: ValueMode) -> f64 {
        match mode {
            ValueMode::Datasheet => self.power_w,
            ValueMode::MeasuredPreferred => self.measured_power_w.unwrap_or(self.power_w),
        }
    }

    /// Startup energy under the given value mode, same fallback rule as
    /// [`effective_power`](Self::effective_power).
    pub fn effective_startup_energy(&self, mode: ValueMode) -> f64 {
        match mode {
            ValueMode::Datasheet => self.startup_energy_j,
            ValueMode::MeasuredPreferred => self.measured_startup_j.unwrap_or(self.startup_energy_j),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| {
            Err(Error::Validation(format!(
                "component `{}`: {what} must be non-negative, got {v}",
                self.id
            )))
        };
        if !(self.power_w >= 0.0) {
            return bad("power_W", self.power_w);
        }
        if !(self.startup_energy_j >= 0.0) {
            return bad("startup energy", self.startup_energy_j);
        }
        if let Some(p) = self.measured_power_w {
            if !(p >= 0.0) {
                return bad("measured_power_W", p);
            }
        }
        if let Some(e) = self.measured_startup_j {
            if !(e >= 0.0) {
                return bad("measured startup energy", e);
            }
        }
        match (self.detection_efficiency, self.category.is_detector_like()) {
            (Some(eff), true) => {
                if !(0.0..=1.0).contains(&eff) {
                    return Err(Error::Validation(format!(
                        "component `{}`: detection_efficiency {eff} outside [0, 1]",
                        self.id
                    )));
                }
            }
            (None, true) => {
                return Err(Error::Validation(format!(
                    "component `{}`: detectors require detection_efficiency",
                    self.id
                )))
            }
            (Some(_), false) => {
                return Err(Error::Validation(format!(
                    "component `{}`: detection_efficiency only valid for detector/bhd",
                    self.id
                )))
            }
            (None, false) => {}
        }
        Ok(())
    }
}

/// Immutable registry of components and fiber loss coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    components: BTreeMap<String, ComponentSpec>,
    fibers: BTreeMap<u32, f64>,
    value_mode: ValueMode,
}

impl Catalog {
    /// Load a catalog from a TOML file, or the builtin one for `"builtin"`.
    pub fn load(path: &str) -> Result<Catalog> {
        if path == "builtin" {
            return Ok(Catalog::builtin());
        }
        let text = std::fs::read_to_string(Path::new(path))?;
        Catalog::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Catalog> {
        let file: CatalogFile =
            toml::from_str(text).map_err(|e| Error::Parse(format!("catalog: {e}")))?;
        let mut components = BTreeMap::new();
        for (id, raw) in file.component {
            let spec = raw.into_spec(&id)?;
            spec.validate()?;
            components.insert(id, spec);
        }
        let mut fibers = BTreeMap::new();
        for (wl, loss) in file.fiber {
            let nm: u32 = wl
                .parse()
                .map_err(|_| Error::Parse(format!("fiber wavelength `{wl}` is not an integer")))?;
            if !(loss > 0.0) {
                return Err(Error::Validation(format!(
                    "fiber loss at {nm} nm must be positive, got {loss}"
                )));
            }
            fibers.insert(nm, loss);
        }
        Ok(Catalog {
            components,
            fibers,
            value_mode: ValueMode::Datasheet,
        })
    }

    /// Serialize back to the TOML file schema (energies in kJ).
    pub fn to_toml_string(&self) -> String {
        let file = CatalogFile {
            component: self
                .components
                .values()
                .map(|c| (c.id.clone(), ComponentFile::from_spec(c)))
                .collect(),
            fiber: self.fibers.iter().map(|(wl, l)| (wl.to_string(), *l)).collect(),
        };
        toml::to_string(&file).expect("catalog serialization cannot fail")
    }

    pub fn with_value_mode(mut self, mode: ValueMode) -> Self {
        self.value_mode = mode;
        self
    }

    pub fn value_mode(&self) -> ValueMode {
        self.value_mode
    }

    pub fn component(&self, id: &str) -> Result<&ComponentSpec> {
        self.components
            .get(id)
            .ok_or_else(|| Error::UnknownComponent(id.to_string()))
    }

    pub fn components(&self) -> impl Iterator<Item = &ComponentSpec> {
        self.components.values()
    }

    pub fn fibers(&self) -> &BTreeMap<u32, f64> {
        &self.fibers
    }

    /// Loss coefficient for the fiber band nearest to `wavelength_nm`.
    pub fn fiber_loss_db_per_km(&self, wavelength_nm: f64) -> Result<f64> {
        self.fibers
            .iter()
            .min_by(|a, b| {
                let da = (*a.0 as f64 - wavelength_nm).abs();
                let db = (*b.0 as f64 - wavelength_nm).abs();
                da.total_cmp(&db)
            })
            .map(|(_, loss)| *loss)
            .ok_or_else(|| Error::Validation("catalog has no fiber entries".into()))
    }

    /// Effective power of component `id` under the catalog's value mode.
    pub fn power_of(&self, id: &str) -> Result<f64> {
        Ok(self.component(id)?.effective_power(self.value_mode))
    }

    /// Effective startup energy of component `id` under the catalog's value mode.
    pub fn startup_of(&self, id: &str) -> Result<f64> {
        Ok(self.component(id)?.effective_startup_energy(self.value_mode))
    }

    /// Detection efficiency of a detector component.
    pub fn efficiency_of(&self, id: &str) -> Result<f64> {
        let c = self.component(id)?;
        c.detection_efficiency.ok_or_else(|| {
            Error::Validation(format!("component `{id}` has no detection efficiency"))
        })
    }

    /// The builtin catalog: rated lab components plus the standard fiber
    /// bands at 532, 780 and 1550 nm.
    pub fn builtin() -> Catalog {
        use Category::*;
        // (id, category, wavelength, E0 kJ, measured E0 kJ, P W, measured P W,
        //  efficiency, startup-integrated, assumed)
        type Row = (
            &'static str,
            Category,
            Option<f64>,
            f64,
            Option<f64>,
            f64,
            Option<f64>,
            Option<f64>,
            bool,
            bool,
        );
        const ROWS: &[Row] = &[
            // Lasers
            ("laser_verdi_c_532", Laser, Some(532.0), 648.0, None, 360.0, None, None, false, false),
            ("laser_verdi_v_532", Laser, Some(532.0), 1620.0, Some(864.0), 900.0, Some(480.0), None, false, false),
            ("laser_dlc_ta_pro_795", Laser, Some(795.0), 0.0, None, 70.0, None, None, false, false),
            ("laser_d2547p_1550", Laser, Some(1532.0), 0.0, None, 3.0, None, None, false, false),
            ("laser_koheras_x15_1550", Laser, Some(1550.0), 0.12, Some(0.126), 4.0, Some(4.2), None, false, false),
            ("laser_mira_hp_f_780", Laser, Some(780.0), 3240.0, None, 1800.0, None, None, false, false),
            ("laser_scw_1532_500r", Laser, Some(1550.0), 0.0, Some(2.4), 0.0, None, None, false, false),
            // Single-photon and coherent detectors
            ("si_apd_523", Detector, Some(523.0), 0.0, None, 45.0, None, Some(0.5), false, false),
            ("si_apd_780", Detector, Some(780.0), 0.0, None, 15.0, None, Some(0.75), false, false),
            ("ingaas_apd_single_1550", Detector, Some(1550.0), 48.3, Some(5.04), 161.0, Some(14.0), Some(0.25), true, false),
            ("ingaas_apd_1550", Detector, Some(1550.0), 1159.0, Some(125.7), 644.0, Some(64.0), Some(0.25), true, false),
            ("snspd_780", Detector, Some(780.0), 259_200.0, None, 3000.0, None, Some(0.95), false, false),
            ("snspd_1550", Detector, Some(1550.0), 259_200.0, Some(117_639.0), 3000.0, Some(2735.0), Some(0.95), true, false),
            ("bhd_1550", Bhd, Some(1550.0), 0.0, None, 3.0, Some(6.8), Some(0.7), false, false),
            // Electronics and electro-optics
            ("computer", Computer, None, 9.0, Some(6.0), 150.0, Some(100.0), None, false, false),
            ("time_tagger", TimeTagger, None, 0.0, None, 50.0, Some(22.0), None, false, false),
            ("waveplates", Waveplates, None, 0.93, Some(0.249), 31.0, Some(8.3), None, false, false),
            ("interferometry", Interferometry, None, 0.0, None, 200.0, None, None, false, false),
            ("modulator_am", ModulatorAm, None, 15.0, Some(0.78), 500.0, Some(26.0), None, false, false),
            ("oven", Oven, None, 9.0, Some(0.54), 15.0, Some(0.9), None, false, false),
            ("modulator_iq", ModulatorIq, None, 0.18, Some(0.162), 6.0, Some(5.4), None, false, false),
            ("polarization_controller", PolarizationController, None, 0.0, None, 1.8, Some(0.35), None, false, false),
            ("powermeter", Powermeter, None, 0.0, None, 1.0, Some(0.8), None, false, false),
            ("optical_switch", OpticalSwitch, None, 0.0, None, 1.8, Some(0.35), None, false, false),
            ("adc", Adc, None, 0.0, None, 30.0, Some(20.0), None, false, false),
            ("dac", Dac, None, 0.0, None, 40.0, Some(40.0), None, false, false),
            // Entries with no catalogued rating; explicit assumptions.
            ("phase_modulator", Custom, None, 0.0, None, 6.0, None, None, false, true),
            ("photodiode", Photodiode, None, 0.0, None, 1.0, None, None, false, true),
        ];

        let components = ROWS
            .iter()
            .map(|r| {
                let spec = ComponentSpec {
                    id: r.0.to_string(),
                    category: r.1,
                    wavelength_nm: r.2,
                    startup_energy_j: r.3 * 1e3,
                    measured_startup_j: r.4.map(|e| e * 1e3),
                    power_w: r.5,
                    measured_power_w: r.6,
                    detection_efficiency: r.7,
                    startup_integrated: r.8,
                    assumed: r.9,
                };
                debug_assert!(spec.validate().is_ok(), "builtin row {} invalid", r.0);
                (r.0.to_string(), spec)
            })
            .collect();
        let fibers = [(532, 30.0), (780, 4.0), (1550, 0.18)].into_iter().collect();
        Catalog {
            components,
            fibers,
            value_mode: ValueMode::Datasheet,
        }
    }
}

impl fmt::Display for ComponentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<26} {:<14} P = {:>7.1} W, E0 = {:>12.0} J",
            self.id,
            format!("{:?}", self.category).to_lowercase(),
            self.power_w,
            self.startup_energy_j
        )?;
        if let Some(p) = self.measured_power_w {
            write!(f, ", measured P = {p} W")?;
        }
        if let Some(e) = self.measured_startup_j {
            write!(f, ", measured E0 = {e:.0} J")?;
        }
        if let Some(eff) = self.detection_efficiency {
            write!(f, ", eff = {eff}")?;
        }
        Ok(())
    }
}

// --- file schema -----------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct CatalogFile {
    #[serde(default)]
    component: BTreeMap<String, ComponentFile>,
    #[serde(default)]
    fiber: BTreeMap<String, f64>,
}

#[derive(Serialize, Deserialize)]
struct ComponentFile {
    category: Category,
    #[serde(skip_serializing_if = "Option::is_none")]
    wavelength_nm: Option<f64>,
    #[serde(rename = "startup_energy_kJ", default)]
    startup_energy_kj: f64,
    #[serde(rename = "power_W", default)]
    power_w: f64,
    #[serde(rename = "measured_power_W", skip_serializing_if = "Option::is_none")]
    measured_power_w: Option<f64>,
    #[serde(rename = "measured_startup_kJ", skip_serializing_if = "Option::is_none")]
    measured_startup_kj: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    detection_efficiency: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    startup_integrated: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    assumed: bool,
}

impl ComponentFile {
    fn into_spec(self, id: &str) -> Result<ComponentSpec> {
        Ok(ComponentSpec {
            id: id.to_string(),
            category: self.category,
            wavelength_nm: self.wavelength_nm,
            startup_energy_j: self.startup_energy_kj * 1e3,
            power_w: self.power_w,
            measured_startup_j: self.measured_startup_kj.map(|e| e * 1e3),
            measured_power_w: self.measured_power_w,
            detection_efficiency: self.detection_efficiency,
            startup_integrated: self.startup_integrated,
            assumed: self.assumed,
        })
    }

    fn from_spec(c: &ComponentSpec) -> ComponentFile {
        ComponentFile {
            category: c.category,
            wavelength_nm: c.wavelength_nm,
            startup_energy_kj: c.startup_energy_j / 1e3,
            power_w: c.power_w,
            measured_power_w: c.measured_power_w,
            measured_startup_kj: c.measured_startup_j.map(|e| e / 1e3),
            detection_efficiency: c.detection_efficiency,
            startup_integrated: c.startup_integrated,
            assumed: c.assumed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_has_expected_headline_rows() {
        let cat = Catalog::load("builtin").unwrap();
        assert_eq!(cat, Catalog::builtin());
        let snspd = cat.component("snspd_1550").unwrap();
        assert_eq!(snspd.power_w, 3000.0);
        assert_eq!(snspd.startup_energy_j, 2.592e8);
        let computer = cat.component("computer").unwrap();
        assert_eq!(computer.power_w, 150.0);
        assert_eq!(computer.measured_power_w, Some(100.0));
    }

    #[test]
    fn builtin_fiber_bands() {
        let cat = Catalog::builtin();
        assert_eq!(cat.fibers().get(&532), Some(&30.0));
        assert_eq!(cat.fibers().get(&780), Some(&4.0));
        assert_eq!(cat.fibers().get(&1550), Some(&0.18));
        // nearest-band lookup
        assert_eq!(cat.fiber_loss_db_per_km(1532.0).unwrap(), 0.18);
        assert_eq!(cat.fiber_loss_db_per_km(795.0).unwrap(), 4.0);
        assert_eq!(cat.fiber_loss_db_per_km(523.0).unwrap(), 30.0);
    }

    #[test]
    fn effective_values_fall_back_to_datasheet() {
        let cat = Catalog::builtin();
        let computer = cat.component("computer").unwrap();
        assert_eq!(computer.effective_power(ValueMode::Datasheet), 150.0);
        assert_eq!(computer.effective_power(ValueMode::MeasuredPreferred), 100.0);
        let si = cat.component("si_apd_780").unwrap();
        assert_eq!(si.effective_power(ValueMode::MeasuredPreferred), 15.0);
    }

    #[test]
    fn negative_power_rejected() {
        let toml = r#"
            [component.bad]
            category = "laser"
            power_W = -5.0
        "#;
        let err = Catalog::from_toml_str(toml).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
    }

    #[test]
    fn detector_without_efficiency_rejected() {
        let toml = r#"
            [component.det]
            category = "detector"
            power_W = 10.0
        "#;
        assert!(Catalog::from_toml_str(toml).is_err());
    }

    #[test]
    fn toml_round_trip_preserves_catalog() {
        let cat = Catalog::builtin();
        let text = cat.to_toml_string();
        let back = Catalog::from_toml_str(&text).unwrap();
        assert_eq!(cat, back);
    }

    #[test]
    fn measured_vs_datasheet_columns_match_source_table() {
        // Measured power is lower than rated for every builtin row except
        // the balanced detector (6.8 W measured vs 3 W rated) and the
        // Koheras laser (4.2 W vs 4 W).
        let cat = Catalog::builtin();
        for c in cat.components() {
            if let Some(m) = c.measured_power_w {
                if c.id == "bhd_1550" || c.id == "laser_koheras_x15_1550" {
                    assert!(m > c.power_w, "{}", c.id);
                } else {
                    assert!(m <= c.power_w, "{}: measured {m} > rated {}", c.id, c.power_w);
                }
            }
        }
    }

    #[test]
    fn unknown_component_lookup_fails() {
        let cat = Catalog::builtin();
        assert!(matches!(
            cat.component("flux_capacitor"),
            Err(Error::UnknownComponent(_))
        ));
    }
}
