//! Stage functions and the full scenario run. Every stage is a pure function
//! of its inputs; the CLI subcommands and [`run`] call the same code, so a
//! chain of subcommands reproduces the pipeline bit for bit.

use std::collections::BTreeMap;

use anyhow::{bail, Context};
use evortex_core::analysis::{self, core_radius, mean_oam, oam_spectrum, radial_profile, spectrum_center};
use evortex_core::fields::{
    device_phase_mask, effective_topological_charge, ideal_azimuthal_phase, monopole_phase_analytic, DeviceGeometry,
    MonopoleSpec,
};
use evortex_core::holography::{
    phase_map, phase_rms_difference, reconstruct_sideband, simulate_hologram, HologramParams,
};
use evortex_core::topology::{locate_vortices, winding_number, LoopSpec};
use evortex_core::wave::{apodize, apply_phase_mask, fresnel_propagate, intensity, make_gaussian};
use evortex_core::{BeamParameters, ComplexField2D, Grid2D, Point2, ScalarField2D, Vec3};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{
    AnalysisConfig, DeviceConfig, DeviceControl, ElementConfig, HologramConfig, PlaneGrid, ScenarioConfig,
};
use crate::field_io::{encode_complex, encode_scalar};
use crate::images::{encode_phase, encode_scaled};
use crate::manifest::{
    sha256_hex, BeamSummary, CalibrationSummary, ElementSummary, Manifest, Measured, PhaseMeasurements, PlaneSummary,
    SpectrumSummary, FORMAT,
};
use crate::tables::{oam_spectrum_csv, radial_profile_csv};

/// Samples on the first pass of a winding loop; refined automatically.
pub const LOOP_SAMPLES: usize = 64;
/// Center intensity below this fraction of the peak counts as a null.
pub const NULL_FRACTION: f64 = 1e-3;

pub const DEFOCUS_WARNING: &str =
    "positive defocus propagates downstream of the element (underfocus); negative values propagate upstream";
pub const DEFAULTS_WARNING: &str = "unset parameters use conventions: source waist a quarter of the field of view, \
     centered on the element; winding loop 450 nm about a device tip, else a sixth of the field of view; \
     planes on the imaging grid use a loop of a sixth of that grid's field of view";

pub fn beam(cfg: &ScenarioConfig) -> anyhow::Result<BeamParameters> {
    Ok(cfg.beam()?)
}

fn pt(c: [f64; 2]) -> Point2 {
    Point2::new(c[0], c[1])
}

/// Device with its line charge resolved, calibrating if a target is set.
pub fn resolve_device(
    d: &DeviceConfig,
    analysis: &AnalysisConfig,
    beam: &BeamParameters,
) -> anyhow::Result<(DeviceGeometry, Option<CalibrationSummary>)> {
    let template =
        DeviceGeometry::two_wire(pt(d.tip), d.direction, d.wire_length, d.wire_width, d.gap, 0.0)?.with_rho0(d.rho0);
    Ok(match d.control {
        DeviceControl::LineCharge(l) => (template.with_density(l), None),
        DeviceControl::Voltage { volts, kappa } => (template.with_density(volts * kappa), None),
        DeviceControl::TargetEll(target) => {
            let cal =
                analysis::calibrate(&template, beam, target, analysis.calibration_tolerance, analysis.loop_radius)
                    .context("calibrating the device")?;
            let summary = CalibrationSummary {
                target_ell: target,
                line_charge: cal.control_value,
                achieved_ell: cal.achieved_ell,
                residual: cal.residual,
                iterations: cal.iterations,
            };
            (template.with_density(cal.control_value), Some(summary))
        }
    })
}

/// The element's phase, resolved once and evaluated on any grid.
#[derive(Debug, Clone)]
pub enum Element {
    None,
    Ideal { ell: i64, center: Point2 },
    Monopole(MonopoleSpec),
    Device(DeviceGeometry),
}

impl Element {
    pub fn resolve(cfg: &ScenarioConfig, beam: &BeamParameters) -> anyhow::Result<(Self, ElementSummary)> {
        let mut summary = ElementSummary {
            kind: "none",
            line_charge: None,
            effective_ell: None,
            calibration: None,
            invalid_pixels: 0,
        };
        let el = match &cfg.element {
            ElementConfig::None => Element::None,
            ElementConfig::Ideal { ell, center } => {
                summary.kind = "ideal";
                Element::Ideal { ell: *ell, center: pt(*center) }
            }
            ElementConfig::Monopole { strength, position } => {
                summary.kind = "monopole";
                Element::Monopole(MonopoleSpec::new(*strength, Vec3::new(position[0], position[1], position[2]))?)
            }
            ElementConfig::Device(d) => {
                summary.kind = "device";
                let (dev, cal) = resolve_device(d, &cfg.analysis, beam)?;
                summary.line_charge = Some(dev.density());
                summary.effective_ell = Some(effective_topological_charge(&dev, beam, cfg.analysis.loop_radius)?);
                summary.calibration = cal;
                Element::Device(dev)
            }
        };
        Ok((el, summary))
    }

    pub fn mask(&self, grid: &Grid2D, beam: &BeamParameters) -> anyhow::Result<ScalarField2D> {
        Ok(match self {
            Element::None => ScalarField2D::zeros(*grid),
            Element::Ideal { ell, center } => ideal_azimuthal_phase(*ell as f64, grid, *center)?,
            Element::Monopole(spec) => monopole_phase_analytic(spec, grid),
            Element::Device(dev) => device_phase_mask(dev, beam, grid)?,
        })
    }
}

/// Source Gaussian times the element mask, without apodization.
pub fn exit_wave(grid: &Grid2D, waist: f64, center: [f64; 2], mask: &ScalarField2D) -> anyhow::Result<ComplexField2D> {
    let psi = make_gaussian(grid, waist, pt(center))?;
    Ok(apply_phase_mask(&psi, mask)?)
}

/// Apodizes and propagates by `distance`.
pub fn propagate_stage(
    psi: &ComplexField2D,
    apodization: f64,
    distance: f64,
    beam: &BeamParameters,
) -> anyhow::Result<ComplexField2D> {
    let windowed = apodize(psi, apodization)?;
    Ok(fresnel_propagate(&windowed, distance, beam)?)
}

pub fn peak_amplitude(psi: &ComplexField2D) -> f64 {
    psi.data().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Off-axis hologram with the reference scaled to the field's peak amplitude.
pub fn hologram_stage(psi: &ComplexField2D, h: &HologramConfig) -> anyhow::Result<ScalarField2D> {
    let params = h.params(peak_amplitude(psi));
    Ok(simulate_hologram(psi, &params)?)
}

/// Sideband reconstruction, normalized to unit norm. The reference amplitude
/// only scales the result, so none is needed.
pub fn reconstruct_stage(hologram: &ScalarField2D, h: &HologramConfig) -> anyhow::Result<ComplexField2D> {
    let params: HologramParams = h.params(1.0);
    let mut psi = reconstruct_sideband(hologram, &params)?;
    psi.normalize()?;
    Ok(psi)
}

pub fn measure_phase(phase: &ScalarField2D, center: Point2, loop_radius: f64) -> PhaseMeasurements {
    let winding = LoopSpec::new(center, loop_radius, LOOP_SAMPLES).and_then(|lp| winding_number(phase, &lp));
    let vortices = locate_vortices(phase);
    PhaseMeasurements {
        winding: winding.into(),
        vortex_count: vortices.len(),
        net_vortex_charge: vortices.iter().map(|v| v.charge).sum(),
    }
}

/// Intensity at the pixel nearest `center`, or 0 outside the grid.
pub fn center_intensity(int: &ScalarField2D, center: Point2) -> f64 {
    let g = int.grid();
    if !g.contains(center) {
        return 0.0;
    }
    let (fi, fj) = g.to_pixel(center);
    let i = (fi.round().max(0.0) as usize).min(g.nx() - 1);
    let j = (fj.round().max(0.0) as usize).min(g.ny() - 1);
    int.get(i, j)
}

/// Everything a run produces, before it touches the disk.
#[derive(Debug, Clone)]
pub struct RunOutput {
    /// File name to contents, excluding the manifest.
    pub files: BTreeMap<String, Vec<u8>>,
    pub manifest: Manifest,
}

struct PlaneOutput {
    summary: PlaneSummary,
    files: Vec<(String, Vec<u8>)>,
    warnings: Vec<String>,
}

struct PlaneContext<'a> {
    cfg: &'a ScenarioConfig,
    beam: &'a BeamParameters,
    center: Point2,
    main_exit: &'a ComplexField2D,
    imaging_exit: Option<&'a ComplexField2D>,
}

fn run_plane(ctx: &PlaneContext<'_>, index: usize, z: f64) -> anyhow::Result<PlaneOutput> {
    let cfg = ctx.cfg;
    let which = cfg.plane_grid(z).with_context(|| format!("defocus {z:e} m fits neither grid"))?;
    let (exit, loop_radius) = match which {
        PlaneGrid::Main => (ctx.main_exit, cfg.analysis.loop_radius),
        PlaneGrid::Imaging => {
            let e = ctx.imaging_exit.expect("imaging exit wave prepared");
            (e, e.grid().fov() / 6.0)
        }
    };
    let psi = propagate_stage(exit, cfg.source.apodization, z, ctx.beam)?;
    let prefix = format!("plane_{index}");
    let mut files = Vec::new();
    let mut warnings = Vec::new();

    let int = intensity(&psi);
    let (int_pgm, scaling) = encode_scaled(&int);
    files.push((format!("{prefix}_intensity.pgm"), int_pgm));
    let phase = phase_map(&psi, cfg.analysis.amplitude_floor)?;
    let (ph_pgm, valid_pgm) = encode_phase(&phase);
    files.push((format!("{prefix}_phase.pgm"), ph_pgm));
    files.push((format!("{prefix}_valid.pgm"), valid_pgm));
    files.push((format!("{prefix}_field.evxf"), encode_complex(&psi)));
    if let Ok(p) = radial_profile(&int, ctx.center) {
        files.push((format!("{prefix}_profile.csv"), radial_profile_csv(&p)));
    }

    let peak = int.max();
    let at_center = center_intensity(&int, ctx.center);
    let direct = measure_phase(&phase, ctx.center, loop_radius);

    let (mut reconstructed, mut reconstruction_rms) = (None, None);
    if let Some(h) = &cfg.hologram {
        if which == PlaneGrid::Main {
            let holo = hologram_stage(&psi, h)?;
            let rec = reconstruct_stage(&holo, h)?;
            let rec_phase = phase_map(&rec, cfg.analysis.amplitude_floor)?;
            files.push((format!("{prefix}_hologram.evxf"), encode_scalar(&holo)));
            files.push((format!("{prefix}_hologram.pgm"), encode_scaled(&holo).0));
            files.push((format!("{prefix}_reconstructed.evxf"), encode_complex(&rec)));
            files.push((format!("{prefix}_reconstructed_phase.pgm"), encode_phase(&rec_phase).0));
            reconstructed = Some(measure_phase(&rec_phase, ctx.center, loop_radius));
            reconstruction_rms = Some(phase_rms_difference(&phase, &rec_phase).into());
        } else {
            warnings.push(format!("plane {index} ({z:e} m) is on the imaging grid; no hologram was simulated for it"));
        }
    }

    Ok(PlaneOutput {
        summary: PlaneSummary {
            index,
            defocus: z,
            grid: which,
            intensity_scaling: scaling,
            peak_intensity: peak,
            center_intensity: at_center,
            central_null: peak > 0.0 && at_center < NULL_FRACTION * peak,
            core_radius: core_radius(&int, ctx.center).into(),
            direct,
            reconstructed,
            reconstruction_rms,
        },
        files,
        warnings,
    })
}

fn spectrum(psi: &ComplexField2D, a: &AnalysisConfig) -> (Measured<SpectrumSummary>, Option<Vec<u8>>) {
    let center = match a.center {
        Some(c) => Ok(pt(c)),
        None => spectrum_center(psi, a.amplitude_floor),
    };
    let result = center.and_then(|c| oam_spectrum(psi, c, a.ell_max).map(|s| (c, s)));
    match result {
        Ok((c, s)) => {
            let (peak_ell, peak_weight) = s.peak();
            let summary = SpectrumSummary {
                center: [c.x, c.y],
                ell_max: s.ell_max(),
                peak_ell,
                peak_weight,
                mean_ell: mean_oam(&s),
                remainder: s.remainder(),
            };
            (Measured::Value(summary), Some(oam_spectrum_csv(&s)))
        }
        Err(e) => (Measured::Error(e.to_string()), None),
    }
}

/// Mask, exit wave and element summary on the main grid.
pub fn mask_stage(cfg: &ScenarioConfig) -> anyhow::Result<(Element, ElementSummary, ScalarField2D, ComplexField2D)> {
    let beam = beam(cfg)?;
    let grid = cfg.grid.grid()?;
    let (element, mut summary) = Element::resolve(cfg, &beam)?;
    let mask = element.mask(&grid, &beam)?;
    summary.invalid_pixels = mask.invalid_count();
    let exit = exit_wave(&grid, cfg.source.waist, cfg.source.center, &mask)?;
    Ok((element, summary, mask, exit))
}

/// Runs the whole scenario in memory.
pub fn run(cfg: &ScenarioConfig, seed: u64) -> anyhow::Result<RunOutput> {
    let beam = beam(cfg)?;
    let (element, element_summary, mask, exit) = mask_stage(cfg)?;
    let center = pt(cfg.element.center().unwrap_or(cfg.grid.center));

    let needs_imaging = cfg.defocus.iter().any(|z| cfg.plane_grid(*z) == Some(PlaneGrid::Imaging));
    let imaging_exit = match (&cfg.imaging, needs_imaging) {
        (Some(im), true) => {
            let g = im.grid.grid()?;
            let m = element.mask(&g, &beam)?;
            Some(exit_wave(&g, im.waist, cfg.source.center, &m)?)
        }
        _ => None,
    };
    for z in &cfg.defocus {
        if cfg.plane_grid(*z).is_none() {
            bail!("defocus {z:e} m aliases on every available grid");
        }
    }

    let mut files = BTreeMap::new();
    files.insert("mask.evxf".to_string(), encode_scalar(&mask));
    let (mask_pgm, mask_valid) = encode_phase(&mask);
    files.insert("mask_phase.pgm".to_string(), mask_pgm);
    files.insert("mask_valid.pgm".to_string(), mask_valid);
    files.insert("exit_wave.evxf".to_string(), encode_complex(&exit));

    let ctx = PlaneContext { cfg, beam: &beam, center, main_exit: &exit, imaging_exit: imaging_exit.as_ref() };
    let planes: Vec<anyhow::Result<PlaneOutput>> =
        cfg.defocus.par_iter().enumerate().map(|(k, z)| run_plane(&ctx, k, *z)).collect();

    let mut warnings = vec![DEFOCUS_WARNING.to_string(), DEFAULTS_WARNING.to_string()];
    let mut summaries = Vec::new();
    for p in planes {
        let p = p?;
        files.extend(p.files);
        warnings.extend(p.warnings);
        summaries.push(p.summary);
    }

    let (spec, spec_csv) = spectrum(&exit, &cfg.analysis);
    if let Some(csv) = spec_csv {
        files.insert("oam_spectrum.csv".to_string(), csv);
    }

    let checksums = files.iter().map(|(k, v)| (k.clone(), sha256_hex(v))).collect();
    let manifest = Manifest {
        format: FORMAT,
        version: env!("CARGO_PKG_VERSION"),
        seed,
        config: cfg.clone(),
        beam: BeamSummary {
            voltage: beam.accelerating_voltage(),
            wavelength: beam.wavelength(),
            interaction_constant: beam.interaction_constant(),
        },
        element: element_summary,
        planes: summaries,
        spectrum: spec,
        checksums,
        warnings,
    };
    Ok(RunOutput { files, manifest })
}

/// Measurements on a stored field, for the `analyze` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub center: [f64; 2],
    pub loop_radius: f64,
    pub phase: PhaseMeasurements,
    pub core_radius: Option<Measured<f64>>,
    pub central_null: Option<bool>,
    pub spectrum: Option<Measured<SpectrumSummary>>,
}

pub fn analyze_phase(phase: &ScalarField2D, center: Point2, loop_radius: f64) -> AnalysisReport {
    AnalysisReport {
        center: [center.x, center.y],
        loop_radius,
        phase: measure_phase(phase, center, loop_radius),
        core_radius: None,
        central_null: None,
        spectrum: None,
    }
}

pub fn analyze_wave(psi: &ComplexField2D, center: Point2, a: &AnalysisConfig) -> anyhow::Result<AnalysisReport> {
    let phase = phase_map(psi, a.amplitude_floor)?;
    let int = intensity(psi);
    let peak = int.max();
    Ok(AnalysisReport {
        center: [center.x, center.y],
        loop_radius: a.loop_radius,
        phase: measure_phase(&phase, center, a.loop_radius),
        core_radius: Some(core_radius(&int, center).into()),
        central_null: Some(peak > 0.0 && center_intensity(&int, center) < NULL_FRACTION * peak),
        spectrum: Some(spectrum(psi, a).0),
    })
}
