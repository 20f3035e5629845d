//! Subcommand bodies. Each takes the output-directory lock, writes its files
//! and returns a JSON summary for the terminal.

use std::path::Path;

use anyhow::Context;
use evortex_core::analysis::calibrate;
use evortex_core::Point2;

use crate::config::{AnalysisConfig, DeviceControl, ElementConfig, HologramConfig, ScenarioConfig};
use crate::field_io::{encode_complex, encode_scalar, read_complex, read_field, read_scalar, write_bytes, StoredField};
use crate::images::{encode_phase, encode_scaled};
use crate::lock::OutputLock;
use crate::manifest::CalibrationSummary;
use crate::pipeline::{self, analyze_phase, analyze_wave, RunOutput};

pub const MANIFEST_NAME: &str = "manifest.json";

pub fn load_config(path: &Path) -> anyhow::Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    Ok(ScenarioConfig::parse(&text)?)
}

fn write_all<'a>(dir: &Path, files: impl IntoIterator<Item = (&'a str, &'a [u8])>) -> anyhow::Result<()> {
    for (name, bytes) in files {
        let path = dir.join(name);
        write_bytes(&path, bytes).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn json<T: serde::Serialize>(v: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("serializable");
    out.push(b'\n');
    out
}

/// Element mask and exit wave.
pub fn mask(cfg: &ScenarioConfig, out: &Path) -> anyhow::Result<String> {
    let _lock = OutputLock::acquire(out)?;
    let (_, summary, mask, exit) = pipeline::mask_stage(cfg)?;
    let (pgm, valid) = encode_phase(&mask);
    let report = json(&summary);
    write_all(
        out,
        [
            ("mask.evxf", encode_scalar(&mask).as_slice()),
            ("mask_phase.pgm", &pgm),
            ("mask_valid.pgm", &valid),
            ("exit_wave.evxf", &encode_complex(&exit)),
            ("element.json", &report),
        ],
    )?;
    Ok(String::from_utf8(report)?)
}

pub fn propagate(cfg: &ScenarioConfig, out: &Path, input: &Path, distance: f64) -> anyhow::Result<String> {
    let _lock = OutputLock::acquire(out)?;
    let beam = pipeline::beam(cfg)?;
    let psi = read_complex(input)?;
    let prop = pipeline::propagate_stage(&psi, cfg.source.apodization, distance, &beam)?;
    let int = evortex_core::wave::intensity(&prop);
    let (int_pgm, scaling) = encode_scaled(&int);
    write_all(out, [("propagated.evxf", encode_complex(&prop).as_slice()), ("propagated_intensity.pgm", &int_pgm)])?;
    Ok(format!(
        "{{\"distance\": {distance:e}, \"peak_intensity\": {:e}, \"scaling\": [{:e}, {:e}]}}\n",
        int.max(),
        scaling.min,
        scaling.max
    ))
}

fn hologram_config(cfg: &ScenarioConfig) -> anyhow::Result<&HologramConfig> {
    cfg.hologram.as_ref().context("the configuration has no enabled [hologram] section")
}

pub fn hologram(cfg: &ScenarioConfig, out: &Path, input: &Path) -> anyhow::Result<String> {
    let _lock = OutputLock::acquire(out)?;
    let h = hologram_config(cfg)?;
    let psi = read_complex(input)?;
    let holo = pipeline::hologram_stage(&psi, h)?;
    let (pgm, scaling) = encode_scaled(&holo);
    write_all(out, [("hologram.evxf", encode_scalar(&holo).as_slice()), ("hologram.pgm", &pgm)])?;
    Ok(format!(
        "{{\"fringe_spacing\": {:e}, \"reference_amplitude\": {:e}, \"scaling\": [{:e}, {:e}]}}\n",
        h.fringe_spacing,
        h.reference_amplitude * pipeline::peak_amplitude(&psi),
        scaling.min,
        scaling.max
    ))
}

pub fn reconstruct(cfg: &ScenarioConfig, out: &Path, input: &Path) -> anyhow::Result<String> {
    let _lock = OutputLock::acquire(out)?;
    let h = hologram_config(cfg)?;
    let holo = read_scalar(input)?;
    let rec = pipeline::reconstruct_stage(&holo, h)?;
    let phase = evortex_core::holography::phase_map(&rec, cfg.analysis.amplitude_floor)?;
    let (pgm, valid) = encode_phase(&phase);
    write_all(
        out,
        [
            ("reconstructed.evxf", encode_complex(&rec).as_slice()),
            ("reconstructed_phase.pgm", &pgm),
            ("reconstructed_valid.pgm", &valid),
        ],
    )?;
    Ok(format!("{{\"valid_pixels\": {}}}\n", phase.validity().iter().filter(|v| **v).count()))
}

fn default_analysis(fov: f64) -> AnalysisConfig {
    AnalysisConfig {
        ell_max: 40,
        loop_radius: fov / 6.0,
        amplitude_floor: 0.05,
        calibration_tolerance: 1e-6,
        center: None,
    }
}

/// Winding, vortices, core radius and OAM spectrum of a stored field. A
/// scalar input is taken as a phase map.
pub fn analyze(cfg: Option<&ScenarioConfig>, out: &Path, input: &Path) -> anyhow::Result<String> {
    let _lock = OutputLock::acquire(out)?;
    let field = read_field(input)?;
    let grid = *field.grid();
    let a = cfg.map(|c| c.analysis.clone()).unwrap_or_else(|| default_analysis(grid.fov()));
    let center = a
        .center
        .or_else(|| cfg.and_then(|c| c.element.center()))
        .map(|c| Point2::new(c[0], c[1]))
        .unwrap_or_else(|| grid.center());
    let report = match &field {
        StoredField::Scalar(phase) => analyze_phase(phase, center, a.loop_radius),
        StoredField::Complex(psi) => analyze_wave(psi, center, &a)?,
    };
    let bytes = json(&report);
    write_all(out, [("analysis.json", bytes.as_slice())])?;
    Ok(String::from_utf8(bytes)?)
}

/// Line charge for the configured device's `target_ell`.
pub fn calibrate_device(cfg: &ScenarioConfig, out: &Path) -> anyhow::Result<String> {
    let _lock = OutputLock::acquire(out)?;
    let ElementConfig::Device(d) = &cfg.element else {
        anyhow::bail!("calibration needs [element] kind = device");
    };
    let DeviceControl::TargetEll(target) = d.control else {
        anyhow::bail!("calibration needs [element] target_ell");
    };
    let beam = pipeline::beam(cfg)?;
    let template = evortex_core::fields::DeviceGeometry::two_wire(
        Point2::new(d.tip[0], d.tip[1]),
        d.direction,
        d.wire_length,
        d.wire_width,
        d.gap,
        0.0,
    )?
    .with_rho0(d.rho0);
    let cal = calibrate(&template, &beam, target, cfg.analysis.calibration_tolerance, cfg.analysis.loop_radius)?;
    let summary = CalibrationSummary {
        target_ell: target,
        line_charge: cal.control_value,
        achieved_ell: cal.achieved_ell,
        residual: cal.residual,
        iterations: cal.iterations,
    };
    let bytes = json(&summary);
    write_all(out, [("calibration.json", bytes.as_slice())])?;
    Ok(String::from_utf8(bytes)?)
}

pub fn write_run(out: &Path, run: &RunOutput) -> anyhow::Result<()> {
    write_all(out, run.files.iter().map(|(k, v)| (k.as_str(), v.as_slice())))?;
    write_all(out, [(MANIFEST_NAME, run.manifest.to_json().as_slice())])
}

/// Full pipeline; returns a short summary.
pub fn run(cfg: &ScenarioConfig, out: &Path, seed: u64) -> anyhow::Result<String> {
    let _lock = OutputLock::acquire(out)?;
    let result = pipeline::run(cfg, seed)?;
    write_run(out, &result)?;
    let m = &result.manifest;
    let mut s = format!("wrote {} files and {MANIFEST_NAME} to {}\n", result.files.len(), out.display());
    for p in &m.planes {
        s.push_str(&format!(
            "plane {} defocus {:e} m ({:?} grid): winding {:?}, vortices {}, central null {}\n",
            p.index, p.defocus, p.grid, p.direct.winding, p.direct.vortex_count, p.central_null
        ));
    }
    for w in &m.warnings {
        s.push_str(&format!("warning: {w}\n"));
    }
    Ok(s)
}
