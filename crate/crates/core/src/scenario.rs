//! Scenario files and parameter sweeps.
//!
//! A scenario binds one protocol spec to an optional one-dimensional sweep
//! and a bit target. Sweep points where the secret rate vanishes produce a
//! row marked infeasible instead of aborting the run. Output is
//! deterministic: the same scenario file yields byte-identical CSV.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, ValueMode};
use crate::energy::energy_for_target;
use crate::error::{Error, Result};
use crate::protocols::{build, ProtocolSpec};

/// Which knob the sweep turns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    DistanceKm,
    NParties,
    Qber,
    TauDsp,
    VA,
}

impl SweepParameter {
    pub fn column_name(self) -> &'static str {
        match self {
            SweepParameter::DistanceKm => "distance_km",
            SweepParameter::NParties => "n_parties",
            SweepParameter::Qber => "qber",
            SweepParameter::TauDsp => "tau_dsp",
            SweepParameter::VA => "v_a",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepScale {
    #[default]
    Linear,
    Log,
}

/// Sweep definition: `steps` points from `from` to `to` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    #[serde(default)]
    pub scale: SweepScale,
}

impl SweepSpec {
    fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::Validation(format!(
                "sweep needs at least 2 steps, got {}",
                self.steps
            )));
        }
        if !(self.from < self.to) {
            return Err(Error::Validation(format!(
                "sweep bounds must satisfy from < to, got [{}, {}]",
                self.from, self.to
            )));
        }
        if self.scale == SweepScale::Log && self.from <= 0.0 {
            return Err(Error::Validation(
                "log-scale sweep needs a positive lower bound".into(),
            ));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let steps = self.steps;
        (0..steps)
            .map(|i| {
                let f = i as f64 / (steps - 1) as f64;
                match self.scale {
                    SweepScale::Linear => self.from + f * (self.to - self.from),
                    SweepScale::Log => self.from * (self.to / self.from).powf(f),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputSpec {
    pub format: OutputFormat,
    pub svg: Option<String>,
}

/// A complete simulation request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub protocol: ProtocolSpec,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    pub target_bits: f64,
    #[serde(default)]
    pub value_mode: ValueMode,
    #[serde(default)]
    pub output: OutputSpec,
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Scenario> {
        let sc: Scenario =
            toml::from_str(text).map_err(|e| Error::Parse(format!("scenario: {e}")))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Scenario> {
        Scenario::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_bits >= 0.0) {
            return Err(Error::Validation(format!(
                "target_bits must be non-negative, got {}",
                self.target_bits
            )));
        }
        if let Some(sweep) = &self.sweep {
            sweep.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    Infeasible,
}

/// One evaluated sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub raw_per_use: f64,
    pub secret_bps: f64,
    #[serde(rename = "power_W")]
    pub power_w: f64,
    #[serde(rename = "startup_J")]
    pub startup_j: f64,
    pub runtime_s: Option<f64>,
    #[serde(rename = "dsp_J")]
    pub dsp_j: Option<f64>,
    #[serde(rename = "total_J")]
    pub total_j: Option<f64>,
    #[serde(rename = "ee_bits_per_J")]
    pub ee_bits_per_j: f64,
    pub status: RowStatus,
}

fn apply(spec: &ProtocolSpec, parameter: SweepParameter, value: f64) -> ProtocolSpec {
    let mut s = *spec;
    match parameter {
        SweepParameter::DistanceKm => s.distance_km = value,
        SweepParameter::NParties => s.n_parties = Some(value.round().max(2.0) as u32),
        SweepParameter::Qber => s.overrides.qber = Some(value),
        SweepParameter::TauDsp => s.overrides.tau_dsp = Some(value),
        SweepParameter::VA => s.overrides.v_a = Some(value),
    }
    s
}

/// Evaluate one sweep point; a zero secret rate yields an infeasible row.
pub fn evaluate_point(spec: &ProtocolSpec, cat: &Catalog, target_bits: f64, value: f64) -> Result<SweepRow> {
    let setup = build(spec, cat)?;
    match energy_for_target(&setup, cat, target_bits) {
        Ok(report) => Ok(SweepRow {
            value,
            raw_per_use: setup.rate.raw_per_use,
            secret_bps: setup.rate.secret_bps,
            power_w: report.power_w,
            startup_j: report.startup_j,
            runtime_s: Some(report.runtime_s),
            dsp_j: Some(report.dsp_j),
            total_j: Some(report.total_j),
            ee_bits_per_j: report.ee_bits_per_j,
            status: RowStatus::Ok,
        }),
        Err(Error::InfeasibleTarget(_)) => {
            let power = crate::energy::setup_power(&setup, cat)?;
            let startup = crate::energy::setup_startup_energy(&setup, cat)?;
            Ok(SweepRow {
                value,
                raw_per_use: setup.rate.raw_per_use,
                secret_bps: setup.rate.secret_bps,
                power_w: power,
                startup_j: startup,
                runtime_s: None,
                dsp_j: None,
                total_j: None,
                ee_bits_per_j: 0.0,
                status: RowStatus::Infeasible,
            })
        }
        Err(e) => Err(e),
    }
}

/// Run a scenario against a catalog (the catalog's value mode is replaced
/// by the scenario's).
pub fn run_scenario(sc: &Scenario, cat: &Catalog) -> Result<Vec<SweepRow>> {
    sc.validate()?;
    let cat = cat.clone().with_value_mode(sc.value_mode);
    match &sc.sweep {
        None => {
            let row = evaluate_point(&sc.protocol, &cat, sc.target_bits, sc.protocol.distance_km)?;
            Ok(vec![row])
        }
        Some(sweep) => sweep
            .values()
            .into_iter()
            .map(|v| {
                let spec = apply(&sc.protocol, sweep.parameter, v);
                evaluate_point(&spec, &cat, sc.target_bits, v)
            })
            .collect(),
    }
}

/// Fixed numeric format for CSV cells: scientific for magnitudes at or
/// above 1e6 or (nonzero) below 1e-3, plain otherwise.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if !(1e-3..1e6).contains(&a) {
        format!("{x:.6e}")
    } else {
        format!("{x:.6}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

/// Render rows as CSV with a header row; the swept parameter is the first
/// column.
pub fn rows_to_csv(parameter: &str, rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str(parameter);
    out.push_str(",raw_per_use,secret_bps,power_W,startup_J,runtime_s,dsp_J,total_J,ee_bits_per_J,status\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            format_number(r.value),
            format_number(r.raw_per_use),
            format_number(r.secret_bps),
            format_number(r.power_w),
            format_number(r.startup_j),
            opt(r.runtime_s),
            opt(r.dsp_j),
            opt(r.total_j),
            format_number(r.ee_bits_per_j),
            match r.status {
                RowStatus::Ok => "ok",
                RowStatus::Infeasible => "infeasible",
            }
        ));
    }
    out
}

/// Render rows as pretty JSON.
pub fn rows_to_json(rows: &[SweepRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize") + "\n"
}
