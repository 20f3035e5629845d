//! Run manifest. Serialized with sorted checksum keys and no timestamps, so
//! identical inputs give byte-identical manifests.

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{PlaneGrid, ScenarioConfig};
use crate::images::Scaling;

pub const FORMAT: &str = "evortex-manifest/1";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeamSummary {
    pub voltage: f64,
    pub wavelength: f64,
    pub interaction_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationSummary {
    pub target_ell: i64,
    pub line_charge: f64,
    pub achieved_ell: f64,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElementSummary {
    pub kind: &'static str,
    /// Line charge density on the positive wire, C/m.
    pub line_charge: Option<f64>,
    /// ℓ_eff on the tip loop.
    pub effective_ell: Option<f64>,
    pub calibration: Option<CalibrationSummary>,
    pub invalid_pixels: usize,
}

/// A measured quantity or the reason it could not be measured.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measured<T> {
    Value(T),
    Error(String),
}

impl<T> From<evortex_core::Result<T>> for Measured<T> {
    fn from(r: evortex_core::Result<T>) -> Self {
        match r {
            Ok(v) => Measured::Value(v),
            Err(e) => Measured::Error(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseMeasurements {
    pub winding: Measured<i64>,
    pub vortex_count: usize,
    pub net_vortex_charge: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlaneSummary {
    pub index: usize,
    pub defocus: f64,
    pub grid: PlaneGrid,
    pub intensity_scaling: Scaling,
    pub peak_intensity: f64,
    pub center_intensity: f64,
    pub central_null: bool,
    pub core_radius: Measured<f64>,
    pub direct: PhaseMeasurements,
    pub reconstructed: Option<PhaseMeasurements>,
    pub reconstruction_rms: Option<Measured<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSummary {
    pub center: [f64; 2],
    pub ell_max: i64,
    pub peak_ell: i64,
    pub peak_weight: f64,
    pub mean_ell: f64,
    pub remainder: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub format: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub config: ScenarioConfig,
    pub beam: BeamSummary,
    pub element: ElementSummary,
    pub planes: Vec<PlaneSummary>,
    pub spectrum: Measured<SpectrumSummary>,
    pub checksums: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

impl Manifest {
    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("manifest serializes");
        out.push(b'\n');
        out
    }
}
