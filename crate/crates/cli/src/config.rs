//! Scenario configuration: a plain-text file of `[section]` headers and
//! `key = value` lines. Dimensioned values must carry a unit suffix
//! (`1.5 um`, `300 kV`, `2 deg`); `#` starts a comment.
//!
//! Parsing never stops at the first problem. Every syntax error, unknown key,
//! missing unit and violated precondition is collected and reported together.

use std::collections::BTreeMap;
use std::fmt;

use evortex_core::analysis::STANDARD_TIP_LOOP_RADIUS;
use evortex_core::fields::DEFAULT_RHO0;
use evortex_core::holography::HologramParams;
use evortex_core::wave::{max_fresnel_distance, DEFAULT_APODIZATION, MIN_WAVE_GRID};
use evortex_core::{BeamParameters, Grid2D, Point2};
use serde::Serialize;

/// Every problem found in a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<String>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "invalid configuration ({} problem{}):", self.0.len(), if self.0.len() == 1 { "" } else { "s" })?;
        for e in &self.0 {
            writeln!(f, "  - {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dim {
    Length,
    InverseLength,
    Voltage,
    Angle,
    LineCharge,
    ChargePerVolt,
}

/// Scale of a unit. Decimal prefixes are applied in the exponent so that
/// `20 um` reads as the double nearest 2e-5, not `20 * 1e-6`.
#[derive(Debug, Clone, Copy)]
enum Scale {
    Pow10(i32),
    Factor(f64),
}

impl Dim {
    fn units(self) -> &'static [(&'static str, Scale)] {
        use Scale::*;
        match self {
            Dim::Length => {
                &[("nm", Pow10(-9)), ("um", Pow10(-6)), ("µm", Pow10(-6)), ("mm", Pow10(-3)), ("m", Pow10(0))]
            }
            Dim::InverseLength => {
                &[("1/nm", Pow10(9)), ("1/um", Pow10(6)), ("1/µm", Pow10(6)), ("1/mm", Pow10(3)), ("1/m", Pow10(0))]
            }
            Dim::Voltage => &[("kV", Pow10(3)), ("V", Pow10(0))],
            Dim::Angle => &[("deg", Factor(std::f64::consts::PI / 180.0)), ("rad", Factor(1.0))],
            Dim::LineCharge => &[("C/m", Pow10(0))],
            Dim::ChargePerVolt => &[("C/m/V", Pow10(0))],
        }
    }

    fn names(self) -> String {
        self.units().iter().map(|(u, _)| *u).collect::<Vec<_>>().join(", ")
    }
}

fn scaled(num: &str, scale: Scale) -> Option<f64> {
    let v: f64 = num.parse().ok()?;
    let out = match scale {
        Scale::Factor(f) => v * f,
        Scale::Pow10(0) => v,
        Scale::Pow10(e) => {
            // fold the prefix into the literal's exponent
            let (mant, exp) = match num.split_once(['e', 'E']) {
                Some((m, x)) => (m, x.parse::<i32>().ok()?),
                None => (num, 0),
            };
            format!("{mant}e{}", exp + e).parse().ok()?
        }
    };
    out.is_finite().then_some(out)
}

fn parse_quantity(raw: &str, dim: Dim) -> Result<f64, String> {
    let raw = raw.trim();
    let mut units: Vec<&(&str, Scale)> = dim.units().iter().collect();
    // longest suffixes first so that "nm" is not read as "m"
    units.sort_by_key(|(u, _)| std::cmp::Reverse(u.len()));
    for (unit, scale) in units {
        if let Some(num) = raw.strip_suffix(unit) {
            let num = num.trim_end();
            if num.is_empty() {
                continue;
            }
            return scaled(num, *scale)
                .ok_or_else(|| format!("cannot read '{raw}' as a number with unit (expected one of {})", dim.names()));
        }
    }
    if raw.parse::<f64>().is_ok() {
        Err(format!("'{raw}' needs a unit suffix (one of {})", dim.names()))
    } else {
        Err(format!("cannot read '{raw}' (expected a number with one of {})", dim.names()))
    }
}

/// Reads a length such as `25 mm` or `-10 nm`.
pub fn parse_length(raw: &str) -> Result<f64, String> {
    parse_quantity(raw, Dim::Length)
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
    used: bool,
}

#[derive(Debug, Clone)]
struct Section {
    entries: BTreeMap<String, Entry>,
}

struct Reader {
    sections: BTreeMap<String, Section>,
    errors: Vec<String>,
}

const SECTIONS: &[&str] = &["beam", "grid", "imaging", "source", "element", "propagation", "hologram", "analysis"];

impl Reader {
    fn parse(text: &str) -> Self {
        let mut sections: BTreeMap<String, Section> = BTreeMap::new();
        let mut errors = Vec::new();
        let mut current: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    errors.push(format!("line {line}: malformed section header '{content}'"));
                    current = None;
                    continue;
                };
                let name = name.trim().to_string();
                if !SECTIONS.contains(&name.as_str()) {
                    errors.push(format!("line {line}: unknown section [{name}] (known: {})", SECTIONS.join(", ")));
                    current = None;
                } else if sections.contains_key(&name) {
                    errors.push(format!("line {line}: section [{name}] appears twice"));
                    current = None;
                } else {
                    sections.insert(name.clone(), Section { entries: BTreeMap::new() });
                    current = Some(name);
                }
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                errors.push(format!("line {line}: expected 'key = value', got '{content}'"));
                continue;
            };
            let (key, value) = (key.trim().to_string(), value.trim().to_string());
            let Some(sec) = current.as_ref().and_then(|s| sections.get_mut(s)) else {
                errors.push(format!("line {line}: '{key}' is outside any known section"));
                continue;
            };
            if key.is_empty() || value.is_empty() {
                errors.push(format!("line {line}: empty key or value"));
            } else {
                match sec.entries.entry(key) {
                    std::collections::btree_map::Entry::Occupied(o) => {
                        errors.push(format!("line {line}: key '{}' repeated", o.key()))
                    }
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(Entry { value, line, used: false });
                    }
                }
            }
        }
        Self { sections, errors }
    }

    fn has(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    fn raw(&mut self, section: &str, key: &str) -> Option<(String, usize)> {
        let e = self.sections.get_mut(section)?.entries.get_mut(key)?;
        e.used = true;
        Some((e.value.clone(), e.line))
    }

    fn quantity(&mut self, section: &str, key: &str, dim: Dim) -> Option<f64> {
        let (v, line) = self.raw(section, key)?;
        match parse_quantity(&v, dim) {
            Ok(x) => Some(x),
            Err(e) => {
                self.errors.push(format!("line {line}: [{section}] {key}: {e}"));
                None
            }
        }
    }

    fn required_quantity(&mut self, section: &str, key: &str, dim: Dim) -> Option<f64> {
        if self.raw_present(section, key) {
            self.quantity(section, key, dim)
        } else {
            self.errors.push(format!("[{section}] {key} is required"));
            None
        }
    }

    fn raw_present(&self, section: &str, key: &str) -> bool {
        self.sections.get(section).is_some_and(|s| s.entries.contains_key(key))
    }

    fn quantity_list(&mut self, section: &str, key: &str, dim: Dim) -> Option<Vec<f64>> {
        let (v, line) = self.raw(section, key)?;
        let mut out = Vec::new();
        for item in v.split(',') {
            match parse_quantity(item, dim) {
                Ok(x) => out.push(x),
                Err(e) => self.errors.push(format!("line {line}: [{section}] {key}: {e}")),
            }
        }
        Some(out)
    }

    fn number(&mut self, section: &str, key: &str) -> Option<f64> {
        let (v, line) = self.raw(section, key)?;
        match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Some(x),
            _ => {
                self.errors.push(format!("line {line}: [{section}] {key}: '{v}' is not a plain number"));
                None
            }
        }
    }

    fn integer(&mut self, section: &str, key: &str) -> Option<i64> {
        let (v, line) = self.raw(section, key)?;
        match v.parse::<i64>() {
            Ok(x) => Some(x),
            Err(_) => {
                self.errors.push(format!("line {line}: [{section}] {key}: '{v}' is not an integer"));
                None
            }
        }
    }

    fn count(&mut self, section: &str, key: &str) -> Option<usize> {
        let (v, line) = self.raw(section, key)?;
        match v.parse::<usize>() {
            Ok(x) => Some(x),
            Err(_) => {
                self.errors.push(format!("line {line}: [{section}] {key}: '{v}' is not a non-negative integer"));
                None
            }
        }
    }

    fn boolean(&mut self, section: &str, key: &str) -> Option<bool> {
        let (v, line) = self.raw(section, key)?;
        match v.as_str() {
            "true" | "yes" | "on" => Some(true),
            "false" | "no" | "off" => Some(false),
            _ => {
                self.errors.push(format!("line {line}: [{section}] {key}: '{v}' is not true or false"));
                None
            }
        }
    }

    fn word(&mut self, section: &str, key: &str) -> Option<(String, usize)> {
        self.raw(section, key)
    }

    fn point(&mut self, section: &str, kx: &str, ky: &str, default: [f64; 2]) -> [f64; 2] {
        [
            self.quantity(section, kx, Dim::Length).unwrap_or(default[0]),
            self.quantity(section, ky, Dim::Length).unwrap_or(default[1]),
        ]
    }

    fn finish(mut self) -> Vec<String> {
        for (name, sec) in &self.sections {
            for (key, e) in &sec.entries {
                if !e.used {
                    self.errors.push(format!("line {}: unknown key '{key}' in [{name}]", e.line));
                }
            }
        }
        self.errors
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeamConfig {
    /// V
    pub voltage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
    /// Field of view along x, m.
    pub fov: f64,
    pub center: [f64; 2],
}

impl GridConfig {
    pub fn grid(&self) -> evortex_core::Result<Grid2D> {
        Grid2D::centered(self.nx, self.ny, self.fov, Point2::new(self.center[0], self.center[1]))
    }
}

/// Optional coarser grid for long-distance Fresnel imaging.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImagingConfig {
    pub grid: GridConfig,
    pub waist: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceConfig {
    pub waist: f64,
    pub center: [f64; 2],
    /// Raised-cosine border as a fraction of the field of view.
    pub apodization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ElementConfig {
    None,
    Ideal { ell: i64, center: [f64; 2] },
    Monopole { strength: f64, position: [f64; 3] },
    Device(DeviceConfig),
}

impl ElementConfig {
    /// Where the vortex is expected: the singular point of the element.
    pub fn center(&self) -> Option<[f64; 2]> {
        match self {
            ElementConfig::None => None,
            ElementConfig::Ideal { center, .. } => Some(*center),
            ElementConfig::Monopole { position, .. } => Some([position[0], position[1]]),
            ElementConfig::Device(d) => Some(d.tip),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviceConfig {
    pub wire_length: f64,
    pub wire_width: f64,
    pub gap: f64,
    /// Midpoint between the two wire tips.
    pub tip: [f64; 2],
    /// Direction from the tips along the wires, rad.
    pub direction: f64,
    pub rho0: f64,
    pub control: DeviceControl,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviceControl {
    /// C/m on the positive wire.
    LineCharge(f64),
    /// Wire voltage and capacitance factor κ (C/m per V).
    Voltage { volts: f64, kappa: f64 },
    /// Calibrate λ for this effective charge.
    TargetEll(i64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HologramConfig {
    pub fringe_spacing: f64,
    pub fringe_angle: f64,
    /// Reference amplitude relative to the peak object amplitude.
    pub reference_amplitude: f64,
    /// 1/m; `None` selects one third of the carrier frequency.
    pub sideband_radius: Option<f64>,
}

impl HologramConfig {
    /// Core parameters for an object whose peak amplitude is `peak`.
    pub fn params(&self, peak: f64) -> HologramParams {
        let p = HologramParams::new(self.fringe_spacing, self.fringe_angle, self.reference_amplitude * peak);
        match self.sideband_radius {
            Some(r) => p.with_mask_radius(r),
            None => p,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisConfig {
    pub ell_max: i64,
    /// Radius of the winding loop around the element center, m.
    pub loop_radius: f64,
    pub amplitude_floor: f64,
    pub calibration_tolerance: f64,
    /// Spectrum center; `None` uses the dominant vortex or the centroid.
    pub center: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub beam: BeamConfig,
    pub grid: GridConfig,
    pub imaging: Option<ImagingConfig>,
    pub source: SourceConfig,
    pub element: ElementConfig,
    /// Defocus distances, m. Positive is underfocus toward the detector.
    pub defocus: Vec<f64>,
    pub hologram: Option<HologramConfig>,
    pub analysis: AnalysisConfig,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigErrors> {
        let mut r = Reader::parse(text);
        let cfg = read_config(&mut r);
        let mut errors = r.finish();
        if let Some(cfg) = &cfg {
            errors.extend(cfg.validate());
        }
        match cfg {
            Some(cfg) if errors.is_empty() => Ok(cfg),
            _ => {
                if errors.is_empty() {
                    errors.push("configuration is incomplete".into());
                }
                Err(ConfigErrors(errors))
            }
        }
    }

    pub fn beam(&self) -> evortex_core::Result<BeamParameters> {
        BeamParameters::new(self.beam.voltage)
    }

    /// Which grid a defocus distance is imaged on.
    pub fn plane_grid(&self, distance: f64) -> Option<PlaneGrid> {
        let beam = self.beam().ok()?;
        let main = self.grid.grid().ok()?;
        if distance.abs() < max_fresnel_distance(&main, &beam) {
            return Some(PlaneGrid::Main);
        }
        let im = self.imaging.as_ref()?.grid.grid().ok()?;
        (distance.abs() < max_fresnel_distance(&im, &beam)).then_some(PlaneGrid::Imaging)
    }

    fn validate(&self) -> Vec<String> {
        let mut e = Vec::new();
        let beam = match self.beam() {
            Ok(b) => Some(b),
            Err(err) => {
                e.push(format!("[beam] voltage: {err}"));
                None
            }
        };
        let main = check_grid("grid", &self.grid, &mut e);
        let imaging = self.imaging.as_ref().and_then(|im| {
            let g = check_grid("imaging", &im.grid, &mut e)?;
            check_waist("imaging", im.waist, &g, &mut e);
            Some(g)
        });
        let Some(main) = main else { return e };
        check_waist("source", self.source.waist, &main, &mut e);
        if !(0.0..0.5).contains(&self.source.apodization) {
            e.push(format!("[source] apodization must lie in [0, 0.5), got {}", self.source.apodization));
        }
        let inside = |c: [f64; 2]| main.contains(Point2::new(c[0], c[1]));
        match &self.element {
            ElementConfig::Ideal { center, .. } if !inside(*center) => {
                e.push("[element] center lies outside the grid".into())
            }
            ElementConfig::Monopole { strength, .. } if !strength.is_finite() => {
                e.push("[element] strength must be finite".into())
            }
            ElementConfig::Device(d) => check_device(d, &self.analysis, &mut e),
            _ => {}
        }
        if let Some(beam) = beam {
            let zmax_main = max_fresnel_distance(&main, &beam);
            let zmax_im = imaging.map(|g| max_fresnel_distance(&g, &beam));
            for z in &self.defocus {
                if self.plane_grid(*z).is_none() {
                    let mut msg = format!(
                        "[propagation] defocus {z:e} m aliases on the main grid (|z| must stay below {zmax_main:e} m)"
                    );
                    match zmax_im {
                        Some(zi) => msg.push_str(&format!(" and on the imaging grid (below {zi:e} m)")),
                        None => msg.push_str("; add an [imaging] section with a coarser grid"),
                    }
                    e.push(msg);
                }
            }
        }
        if self.defocus.is_empty() {
            e.push("[propagation] defocus list is empty".into());
        }
        if let Some(h) = &self.hologram {
            if let Err(err) = h.params(1.0).validate(&main) {
                e.push(format!("[hologram] {err}"));
            }
        }
        let a = &self.analysis;
        if a.ell_max < 1 {
            e.push(format!("[analysis] ell_max must be at least 1, got {}", a.ell_max));
        }
        if !(a.amplitude_floor > 0.0 && a.amplitude_floor < 1.0) {
            e.push(format!("[analysis] amplitude_floor must lie in (0, 1), got {}", a.amplitude_floor));
        }
        if !(a.calibration_tolerance > 1e-9 && a.calibration_tolerance < 0.1) {
            e.push(format!(
                "[analysis] calibration_tolerance must lie in (1e-9, 0.1), got {}",
                a.calibration_tolerance
            ));
        }
        if !(a.loop_radius > 2.0 * main.pitch()) {
            e.push(format!(
                "[analysis] loop_radius {:e} m must exceed two pixels ({:e} m)",
                a.loop_radius,
                2.0 * main.pitch()
            ));
        }
        if let Some(c) = self.element.center() {
            let c = Point2::new(c[0], c[1]);
            let r = a.loop_radius;
            if !(main.contains(c + Point2::new(r, r)) && main.contains(c - Point2::new(r, r))) {
                e.push(format!("[analysis] the winding loop of radius {r:e} m around the element leaves the grid"));
            }
        }
        if let Some(c) = a.center {
            if !inside(c) {
                e.push("[analysis] center lies outside the grid".into());
            }
        }
        e
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaneGrid {
    Main,
    Imaging,
}

fn check_grid(section: &str, g: &GridConfig, e: &mut Vec<String>) -> Option<Grid2D> {
    let mut ok = true;
    if g.nx < MIN_WAVE_GRID || g.ny < MIN_WAVE_GRID {
        e.push(format!("[{section}] nx and ny must be at least {MIN_WAVE_GRID}, got {}x{}", g.nx, g.ny));
        ok = false;
    }
    if !(g.fov > 0.0) {
        e.push(format!("[{section}] fov must be positive, got {:e} m", g.fov));
        ok = false;
    }
    if !ok {
        return None;
    }
    match g.grid() {
        Ok(grid) => Some(grid),
        Err(err) => {
            e.push(format!("[{section}] {err}"));
            None
        }
    }
}

fn check_waist(section: &str, waist: f64, g: &Grid2D, e: &mut Vec<String>) {
    let hi = 0.25 * g.fov_x().min(g.fov_y());
    if !(waist > 2.0 * g.pitch() && waist <= hi) {
        e.push(format!(
            "[{section}] waist {waist:e} m must exceed two pixels ({:e} m) and not exceed a quarter of the field of view ({hi:e} m)",
            2.0 * g.pitch()
        ));
    }
}

fn check_device(d: &DeviceConfig, a: &AnalysisConfig, e: &mut Vec<String>) {
    if !(d.wire_length > 0.0) || !(d.gap > 0.0) || !(d.wire_width >= 0.0) {
        e.push("[element] wire_length and gap must be positive and wire_width non-negative".into());
        return;
    }
    if !(d.rho0 > 0.0) {
        e.push(format!("[element] rho0 must be positive, got {:e} m", d.rho0));
    }
    let half = 0.5 * (d.gap + 2.0 * d.wire_width);
    if !(a.loop_radius > half && a.loop_radius < d.wire_length) {
        e.push(format!(
            "[analysis] loop_radius {:e} m must clear the wire footprint (half-width {half:e} m) and stay shorter than the wires ({:e} m)",
            a.loop_radius, d.wire_length
        ));
    }
    match d.control {
        DeviceControl::TargetEll(l) if l.abs() > 100 => {
            e.push(format!("[element] target_ell must satisfy |ell| <= 100, got {l}"))
        }
        DeviceControl::Voltage { kappa: 0.0, .. } => e.push("[element] kappa must be nonzero".into()),
        _ => {}
    }
}

fn read_config(r: &mut Reader) -> Option<ScenarioConfig> {
    for s in ["beam", "grid", "element", "propagation"] {
        if !r.has(s) {
            r.errors.push(format!("section [{s}] is required"));
        }
    }
    let voltage = r.required_quantity("beam", "voltage", Dim::Voltage);

    let grid = read_grid(r, "grid", [0.0, 0.0]);
    let fov = grid.as_ref().map(|g| g.fov).unwrap_or(0.0);
    let gcenter = grid.as_ref().map(|g| g.center).unwrap_or([0.0, 0.0]);

    let element = read_element(r, gcenter);
    let element_center = element.as_ref().and_then(|e| e.center()).unwrap_or(gcenter);

    let imaging = if r.has("imaging") {
        read_grid(r, "imaging", gcenter).map(|g| {
            let waist = r.quantity("imaging", "waist", Dim::Length).unwrap_or(g.fov / 4.0);
            ImagingConfig { grid: g, waist }
        })
    } else {
        None
    };

    let source = SourceConfig {
        waist: r.quantity("source", "waist", Dim::Length).unwrap_or(fov / 4.0),
        center: r.point("source", "center_x", "center_y", element_center),
        apodization: r.number("source", "apodization").unwrap_or(DEFAULT_APODIZATION),
    };

    let defocus = if r.raw_present("propagation", "defocus") {
        r.quantity_list("propagation", "defocus", Dim::Length).unwrap_or_default()
    } else {
        vec![0.0]
    };

    let hologram = if r.has("hologram") && r.boolean("hologram", "enabled").unwrap_or(true) {
        let sideband_radius = match r.word("hologram", "sideband_radius") {
            None => None,
            Some((w, _)) if w == "auto" => None,
            Some((w, line)) => match parse_quantity(&w, Dim::InverseLength) {
                Ok(v) => Some(v),
                Err(err) => {
                    r.errors.push(format!("line {line}: [hologram] sideband_radius: {err} or 'auto'"));
                    None
                }
            },
        };
        Some(HologramConfig {
            fringe_spacing: r.quantity("hologram", "fringe_spacing", Dim::Length).unwrap_or(1.9e-9),
            fringe_angle: r.quantity("hologram", "fringe_angle", Dim::Angle).unwrap_or(0.0),
            reference_amplitude: r.number("hologram", "reference_amplitude").unwrap_or(1.0),
            sideband_radius,
        })
    } else {
        if r.has("hologram") {
            // a disabled section may still carry parameters; accept them silently
            for k in ["fringe_spacing", "fringe_angle", "reference_amplitude", "sideband_radius"] {
                let _ = r.raw("hologram", k);
            }
        }
        None
    };

    let is_device = matches!(element, Some(ElementConfig::Device(_)));
    let analysis = AnalysisConfig {
        ell_max: r.integer("analysis", "ell_max").unwrap_or(40),
        loop_radius: r.quantity("analysis", "loop_radius", Dim::Length).unwrap_or(if is_device {
            STANDARD_TIP_LOOP_RADIUS
        } else {
            fov / 6.0
        }),
        amplitude_floor: r.number("analysis", "amplitude_floor").unwrap_or(0.05),
        calibration_tolerance: r.number("analysis", "calibration_tolerance").unwrap_or(1e-6),
        center: if r.raw_present("analysis", "center_x") || r.raw_present("analysis", "center_y") {
            Some(r.point("analysis", "center_x", "center_y", gcenter))
        } else {
            None
        },
    };

    Some(ScenarioConfig {
        beam: BeamConfig { voltage: voltage? },
        grid: grid?,
        imaging,
        source,
        element: element?,
        defocus,
        hologram,
        analysis,
    })
}

fn read_grid(r: &mut Reader, section: &str, default_center: [f64; 2]) -> Option<GridConfig> {
    let nx = r.count(section, "nx");
    let ny = r.count(section, "ny");
    let fov = r.required_quantity(section, "fov", Dim::Length);
    let center = r.point(section, "center_x", "center_y", default_center);
    let nx = match nx {
        Some(n) => n,
        None => {
            if !r.raw_present(section, "nx") {
                r.errors.push(format!("[{section}] nx is required"));
            }
            return None;
        }
    };
    Some(GridConfig { nx, ny: ny.unwrap_or(nx), fov: fov?, center })
}

fn read_element(r: &mut Reader, gcenter: [f64; 2]) -> Option<ElementConfig> {
    let Some((kind, line)) = r.word("element", "kind") else {
        if r.has("element") {
            r.errors.push("[element] kind is required (none, ideal, monopole or device)".into());
        }
        return None;
    };
    match kind.as_str() {
        "none" => Some(ElementConfig::None),
        "ideal" => {
            let ell = r.integer("element", "ell");
            if !r.raw_present("element", "ell") {
                r.errors.push("[element] ell is required for kind = ideal".into());
            }
            let center = r.point("element", "center_x", "center_y", gcenter);
            Some(ElementConfig::Ideal { ell: ell?, center })
        }
        "monopole" => {
            let strength = r.number("element", "strength");
            if !r.raw_present("element", "strength") {
                r.errors.push("[element] strength is required for kind = monopole".into());
            }
            let c = r.point("element", "center_x", "center_y", gcenter);
            let z = r.quantity("element", "z", Dim::Length).unwrap_or(0.0);
            Some(ElementConfig::Monopole { strength: strength?, position: [c[0], c[1], z] })
        }
        "device" => {
            let wire_length = r.quantity("element", "wire_length", Dim::Length).unwrap_or(15e-6);
            let wire_width = r.quantity("element", "wire_width", Dim::Length).unwrap_or(200e-9);
            let gap = r.quantity("element", "gap", Dim::Length).unwrap_or(200e-9);
            let tip = r.point("element", "tip_x", "tip_y", gcenter);
            let direction = r.quantity("element", "direction", Dim::Angle).unwrap_or(std::f64::consts::PI);
            let rho0 = r.quantity("element", "rho0", Dim::Length).unwrap_or(DEFAULT_RHO0);
            let given: Vec<&str> =
                ["line_charge", "voltage", "target_ell"].into_iter().filter(|k| r.raw_present("element", k)).collect();
            if given.len() != 1 {
                r.errors.push(format!(
                    "[element] a device needs exactly one of line_charge, voltage (with kappa) or target_ell; got {}",
                    if given.is_empty() { "none".to_string() } else { given.join(", ") }
                ));
            }
            let control = match given.first().copied() {
                Some("line_charge") => {
                    r.quantity("element", "line_charge", Dim::LineCharge).map(DeviceControl::LineCharge)
                }
                Some("voltage") => {
                    let volts = r.quantity("element", "voltage", Dim::Voltage);
                    let kappa = r.quantity("element", "kappa", Dim::ChargePerVolt);
                    if !r.raw_present("element", "kappa") {
                        r.errors.push("[element] voltage control needs kappa (C/m/V)".into());
                    }
                    Some(DeviceControl::Voltage { volts: volts?, kappa: kappa? })
                }
                Some(_) => r.integer("element", "target_ell").map(DeviceControl::TargetEll),
                None => None,
            };
            for k in &given[1.min(given.len())..] {
                let _ = r.raw("element", k);
            }
            Some(ElementConfig::Device(DeviceConfig {
                wire_length,
                wire_width,
                gap,
                tip,
                direction,
                rho0,
                control: control?,
            }))
        }
        other => {
            r.errors.push(format!("line {line}: [element] unknown kind '{other}' (none, ideal, monopole or device)"));
            None
        }
    }
}
