//! The two-wire electrostatic element: a pair of parallel, oppositely charged
//! line segments whose tips sit side by side.
//!
//! Each wire is a uniformly charged zero-width segment. Its potential
//! integrated along the beam axis is `-(λ/2πε₀) ∫ ln(ρ(s)/ρ₀) ds`, which has a
//! closed form. The reference radius ρ₀ drops out of the sum over a neutral
//! pair, so masks are only defined for neutral devices.
//!
//! Between the wires the projected potential jumps by an amount proportional
//! to λ. A loop around the tip therefore accumulates a phase `2π ℓ_eff` on
//! the open side and gives it back across the wire pair, where the supporting
//! bridge blocks the beam. When `ℓ_eff` is an integer the jump is invisible
//! modulo 2π and the transmitted wave carries a vortex of that charge.

use alloc::format;
use core::f64::consts::{PI, TAU};

use crate::beam::BeamParameters;
use crate::constants::CODATA_2018;
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::grid::{Grid2D, ScalarField2D};
#[allow(unused_imports)] // unused whenever std is linked
use num_traits::Float;

/// Reference radius used when none is given, m.
pub const DEFAULT_RHO0: f64 = 1.0;

const ON_SEGMENT: f64 = 1e-12;
const PARALLEL_TOL: f64 = 1e-9;

/// Uniformly charged straight segment in the transverse plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineChargeSegment {
    /// For device wires, the tip end.
    pub endpoint_a: Point2,
    pub endpoint_b: Point2,
    /// Linear charge density λ, C/m.
    pub density: f64,
}

impl LineChargeSegment {
    pub fn new(endpoint_a: Point2, endpoint_b: Point2, density: f64) -> Result<Self> {
        let seg = Self { endpoint_a, endpoint_b, density };
        seg.validate()?;
        Ok(seg)
    }

    fn validate(&self) -> Result<()> {
        if !self.endpoint_a.is_finite() || !self.endpoint_b.is_finite() || !self.density.is_finite() {
            return Err(Error::Domain("segment endpoints and density must be finite".into()));
        }
        if self.length() == 0.0 {
            return Err(Error::Domain("segment endpoints coincide".into()));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.endpoint_a.distance(self.endpoint_b)
    }

    /// Unit vector from `endpoint_a` to `endpoint_b`.
    pub fn direction(&self) -> Point2 {
        (self.endpoint_b - self.endpoint_a) * (1.0 / self.length())
    }

    pub fn total_charge(&self) -> f64 {
        self.density * self.length()
    }

    pub fn distance_to(&self, p: Point2) -> f64 {
        let u = self.direction();
        let t = (p - self.endpoint_a).dot(u);
        if t <= 0.0 {
            p.distance(self.endpoint_a)
        } else if t >= self.length() {
            p.distance(self.endpoint_b)
        } else {
            (p - self.endpoint_a).cross(u).abs()
        }
    }

    /// `∫₀ᴸ ln(ρ(s)/ρ₀) ds` in closed form, without the charge prefactor.
    fn log_integral(&self, p: Point2, rho0: f64) -> f64 {
        let len = self.length();
        let u = self.direction();
        let d = p - self.endpoint_a;
        let t = d.dot(u);
        let h = d.cross(u).abs();
        log_antiderivative(len - t, h) - log_antiderivative(-t, h) - len * rho0.ln()
    }
}

/// `∫ ln √(s² + h²) ds = s ln √(s² + h²) − s + h atan(s/h)`.
#[inline]
fn log_antiderivative(s: f64, h: f64) -> f64 {
    let r = s.hypot(h);
    let log_term = if s == 0.0 { 0.0 } else { s * r.ln() };
    log_term - s + h * s.atan2(h)
}

fn check_rho0(rho0: f64) -> Result<()> {
    if !(rho0 > 0.0) || !rho0.is_finite() {
        return Err(Error::Domain(format!("regularization radius must be positive, got {rho0}")));
    }
    Ok(())
}

/// z-integrated potential `∫Φ dz` of one segment at `point`, in V·m,
/// regularized by the reference radius `rho0`.
pub fn segment_projected_potential(seg: &LineChargeSegment, point: Point2, rho0: f64) -> Result<f64> {
    seg.validate()?;
    check_rho0(rho0)?;
    if seg.distance_to(point) <= ON_SEGMENT {
        return Err(Error::Singularity(format!(
            "projected potential evaluated on the segment at ({:e}, {:e})",
            point.x, point.y
        )));
    }
    Ok(-seg.density / (TAU * CODATA_2018.epsilon0) * seg.log_integral(point, rho0))
}

/// Two parallel wires with opposite charge, tips side by side.
///
/// Segment centerlines are `gap + wire_width` apart; `endpoint_a` of each is
/// its tip. The wires and the gap between them rest on a bridge that is
/// opaque to the beam, so the strip they span is excluded from masks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceGeometry {
    pub positive: LineChargeSegment,
    pub negative: LineChargeSegment,
    /// Edge-to-edge gap between the wires, m.
    pub gap: f64,
    /// Physical wire width, m. Sets the excluded footprint only.
    pub wire_width: f64,
    pub rho0: f64,
}

impl DeviceGeometry {
    /// Builds a neutral pair whose tips straddle `tip_midpoint`, running from
    /// the tips toward `direction` (radians from +x) for `length`.
    pub fn two_wire(
        tip_midpoint: Point2,
        direction: f64,
        length: f64,
        wire_width: f64,
        gap: f64,
        density: f64,
    ) -> Result<Self> {
        if !(length > 0.0) || !(gap > 0.0) || !(wire_width >= 0.0) {
            return Err(Error::Configuration(format!(
                "wire length and gap must be positive and width non-negative (length {length}, gap {gap}, width {wire_width})"
            )));
        }
        let u = Point2::from_polar(1.0, direction);
        let offset = u.perp() * (0.5 * (gap + wire_width));
        let pos_tip = tip_midpoint + offset;
        let neg_tip = tip_midpoint - offset;
        let dev = Self {
            positive: LineChargeSegment::new(pos_tip, pos_tip + u * length, density)?,
            negative: LineChargeSegment::new(neg_tip, neg_tip + u * length, -density)?,
            gap,
            wire_width,
            rho0: DEFAULT_RHO0,
        };
        dev.validate()?;
        Ok(dev)
    }

    pub fn with_rho0(mut self, rho0: f64) -> Self {
        self.rho0 = rho0;
        self
    }

    /// Same geometry carrying `density` on the positive wire and the
    /// neutralizing density on the negative one.
    pub fn with_density(&self, density: f64) -> Self {
        let mut dev = *self;
        dev.positive.density = density;
        dev.negative.density = -density * self.positive.length() / self.negative.length();
        dev
    }

    /// Linear charge density of the positive wire, C/m.
    pub fn density(&self) -> f64 {
        self.positive.density
    }

    pub fn validate(&self) -> Result<()> {
        self.positive.validate()?;
        self.negative.validate()?;
        check_rho0(self.rho0)?;
        if !(self.gap > 0.0) || !(self.wire_width >= 0.0) {
            return Err(Error::Configuration(format!(
                "gap must be positive and wire width non-negative (gap {}, width {})",
                self.gap, self.wire_width
            )));
        }
        let (up, un) = (self.positive.direction(), self.negative.direction());
        let angle = up.cross(un).atan2(up.dot(un)).abs();
        if angle > PARALLEL_TOL {
            return Err(Error::Configuration(format!(
                "wires must be parallel with tips on the same side (angle {angle:e} rad)"
            )));
        }
        let (qp, qn) = (self.positive.total_charge(), self.negative.total_charge());
        let scale = qp.abs().max(qn.abs());
        if (qp + qn).abs() > 1e-12 * scale {
            return Err(Error::Configuration(format!(
                "device is not neutral: net charge {:e} C (the mask would depend on the regularization radius)",
                qp + qn
            )));
        }
        let sep = self.separation();
        let expected = self.gap + self.wire_width;
        if (sep - expected).abs() > 1e-6 * expected {
            return Err(Error::Configuration(format!(
                "wire centerlines are {sep:e} m apart but gap + width is {expected:e} m"
            )));
        }
        let tip_offset = (self.negative.endpoint_a - self.positive.endpoint_a).dot(up);
        if tip_offset.abs() > 1e-6 * expected {
            return Err(Error::Configuration(format!(
                "wire tips are staggered by {tip_offset:e} m along the wire axis"
            )));
        }
        Ok(())
    }

    /// Centerline-to-centerline distance, m.
    pub fn separation(&self) -> f64 {
        (self.negative.endpoint_a - self.positive.endpoint_a).cross(self.positive.direction()).abs()
    }

    pub fn tip_midpoint(&self) -> Point2 {
        (self.positive.endpoint_a + self.negative.endpoint_a) * 0.5
    }

    /// Unit vector from the tips along the wires.
    pub fn axis(&self) -> Point2 {
        self.positive.direction()
    }

    /// Half-width of the opaque strip covering both wires and the gap.
    pub fn footprint_half_width(&self) -> f64 {
        0.5 * (self.separation() + self.wire_width)
    }

    /// Whether `p` falls on the wires or the bridge between them.
    pub fn in_footprint(&self, p: Point2) -> bool {
        let d = p - self.tip_midpoint();
        let u = self.axis();
        let t = d.dot(u);
        let len = self.positive.length().max(self.negative.length());
        t >= 0.0 && t <= len && d.cross(u).abs() <= self.footprint_half_width()
    }

    /// Projected potential of both wires, V·m.
    fn projected_potential(&self, p: Point2) -> f64 {
        let k = 1.0 / (TAU * CODATA_2018.epsilon0);
        -k * (self.positive.density * self.positive.log_integral(p, self.rho0)
            + self.negative.density * self.negative.log_integral(p, self.rho0))
    }

    fn phase_at(&self, beam: &BeamParameters, p: Point2) -> f64 {
        -beam.interaction_constant() * self.projected_potential(p)
    }
}

/// Phase imprinted by the device, `-σ (V₊ + V₋)`, in radians (not wrapped).
/// Pixels on the opaque footprint are flagged invalid.
pub fn device_phase_mask(dev: &DeviceGeometry, beam: &BeamParameters, grid: &Grid2D) -> Result<ScalarField2D> {
    dev.validate()?;
    Ok(ScalarField2D::from_fn(*grid, |p| if dev.in_footprint(p) { None } else { Some(dev.phase_at(beam, p)) }))
}

/// Start and end of the tip arc of radius `loop_radius`: the counter-clockwise
/// arc around the tip midpoint that stays off the footprint.
pub(crate) fn tip_arc(dev: &DeviceGeometry, loop_radius: f64) -> Result<(Point2, f64, f64)> {
    dev.validate()?;
    let half = dev.footprint_half_width();
    let len = dev.positive.length().min(dev.negative.length());
    if !(loop_radius > half) {
        return Err(Error::Geometry(format!(
            "loop radius {loop_radius:e} m does not clear the wire footprint (half-width {half:e} m)"
        )));
    }
    if !(loop_radius < len) {
        return Err(Error::Geometry(format!(
            "loop radius {loop_radius:e} m reaches past the wire ends (length {len:e} m)"
        )));
    }
    let c = dev.tip_midpoint();
    let axis = dev.axis().angle();
    let delta = (half / loop_radius).asin();
    Ok((c, axis + delta, axis + TAU - delta))
}

/// Phase accumulated around the tip divided by 2π.
///
/// The loop is centered on the tip midpoint and traversed counter-clockwise
/// from one edge of the footprint to the other, the long way round. The mask
/// is continuous there, so the accumulated phase is the difference of its
/// end values. Linear in λ.
pub fn effective_topological_charge(dev: &DeviceGeometry, beam: &BeamParameters, loop_radius: f64) -> Result<f64> {
    let (c, start, end) = tip_arc(dev, loop_radius)?;
    let p0 = c + Point2::from_polar(loop_radius, start);
    let p1 = c + Point2::from_polar(loop_radius, end);
    Ok((dev.phase_at(beam, p1) - dev.phase_at(beam, p0)) / (2.0 * PI))
}

#[cfg(test)]
mod tests {
    extern crate std;
    use super::*;
    use alloc::vec::Vec;

    fn beam() -> BeamParameters {
        BeamParameters::new(300e3).unwrap()
    }

    fn standard_device(density: f64) -> DeviceGeometry {
        DeviceGeometry::two_wire(Point2::ORIGIN, PI, 15e-6, 200e-9, 200e-9, density).unwrap()
    }

    // Adaptive Simpson, test-only.
    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        #[allow(clippy::too_many_arguments)]
        fn rec(
            f: &dyn Fn(f64) -> f64,
            a: f64,
            b: f64,
            fa: f64,
            fm: f64,
            fb: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fm, fb, whole, tol, 50)
    }

    fn log_quadrature(seg: &LineChargeSegment, p: Point2, rho0: f64) -> f64 {
        let u = seg.direction();
        let len = seg.length();
        let f = |s: f64| (p.distance(seg.endpoint_a + u * s) / rho0).ln();
        -seg.density / (TAU * CODATA_2018.epsilon0) * adaptive_simpson(&f, 0.0, len, 1e-15 * len)
    }

    #[test]
    fn closed_form_matches_adaptive_quadrature() {
        let seg = LineChargeSegment::new(Point2::new(-1e-7, 2e-8), Point2::new(3e-7, -5e-8), 3e-10).unwrap();
        for p in [
            Point2::new(0.0, 0.0),
            Point2::new(5e-7, 4e-7),
            Point2::new(-2e-7, 1e-9),
            Point2::new(1e-6, -1e-6),
            Point2::new(1e-7, 3e-7),
        ] {
            for rho0 in [1.0, 1e-7] {
                let closed = segment_projected_potential(&seg, p, rho0).unwrap();
                let quad = log_quadrature(&seg, p, rho0);
                assert!((closed - quad).abs() < 1e-10 * quad.abs(), "{p:?}: {closed} vs {quad}");
            }
        }
    }

    // Brute-force oracle: integrate the 3D Coulomb potential over the segment
    // and along z up to ±Z, subtract the divergent len·ln(2Z/ρ₀) term, then
    // extrapolate the O(1/Z²) remainder from Z = 10·len and 100·len.
    fn coulomb_cutoff(seg: &LineChargeSegment, p: Point2, rho0: f64, zcut: f64) -> f64 {
        let u = seg.direction();
        let len = seg.length();
        let k = seg.density / (4.0 * PI * CODATA_2018.epsilon0);
        let inner = |s: f64| {
            let rho = p.distance(seg.endpoint_a + u * s);
            // z on geometric panels from rho·1e-3 to zcut; first panel linear.
            let g = |z: f64| 1.0 / (rho * rho + z * z).sqrt();
            let mut acc = adaptive_simpson(&g, 0.0, rho, 1e-14);
            let mut a = rho;
            while a < zcut {
                let b = (a * 2.0).min(zcut);
                acc += adaptive_simpson(&g, a, b, 1e-14 * (b - a) / b);
                a = b;
            }
            2.0 * acc
        };
        k * adaptive_simpson(&inner, 0.0, len, 1e-12 * len) - 2.0 * k * len * (2.0 * zcut / rho0).ln()
    }

    #[test]
    fn closed_form_matches_coulomb_cutoff_oracle() {
        let seg = LineChargeSegment::new(Point2::new(0.0, 0.0), Point2::new(2e-7, 0.0), 1e-10).unwrap();
        let len = seg.length();
        for p in [Point2::new(1e-7, 1.5e-7), Point2::new(-1e-7, -5e-8), Point2::new(4e-7, 2e-7)] {
            let v10 = coulomb_cutoff(&seg, p, 1.0, 10.0 * len);
            let v100 = coulomb_cutoff(&seg, p, 1.0, 100.0 * len);
            let extrapolated = (1e4 * v100 - 1e2 * v10) / (1e4 - 1e2);
            let closed = segment_projected_potential(&seg, p, 1.0).unwrap();
            assert!((closed - extrapolated).abs() < 1e-6 * closed.abs(), "{p:?}: {closed} vs {extrapolated}");
        }
    }

    // Short segment seen from its perpendicular bisector at ρ₀:
    // ∫ ln(ρ/ρ₀) ds ≈ len³ / (24 ρ₀²).
    #[test]
    fn short_segment_at_reference_radius() {
        let rho0 = 1e-7;
        let k = 1e-10 / (TAU * CODATA_2018.epsilon0);
        for len in [1e-8, 1e-9, 1e-10] {
            let seg = LineChargeSegment::new(Point2::new(-len / 2.0, 0.0), Point2::new(len / 2.0, 0.0), 1e-10).unwrap();
            let v = segment_projected_potential(&seg, Point2::new(0.0, rho0), rho0).unwrap();
            let expected = -k * len * len * len / (24.0 * rho0 * rho0);
            assert!((v / expected - 1.0).abs() < 0.01, "len {len}: {v} vs {expected}");
        }
    }

    #[test]
    fn mirror_symmetric_about_segment_axis() {
        let seg = LineChargeSegment::new(Point2::new(-1e-7, 0.0), Point2::new(2e-7, 0.0), 2e-10).unwrap();
        for (x, y) in [(0.0, 1e-8), (3e-7, 5e-8), (-4e-7, 2e-7)] {
            let a = segment_projected_potential(&seg, Point2::new(x, y), 1.0).unwrap();
            let b = segment_projected_potential(&seg, Point2::new(x, -y), 1.0).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn on_segment_is_singular() {
        let seg = LineChargeSegment::new(Point2::new(0.0, 0.0), Point2::new(1e-7, 0.0), 1e-10).unwrap();
        assert!(matches!(segment_projected_potential(&seg, Point2::new(5e-8, 0.0), 1.0), Err(Error::Singularity(_))));
        assert!(segment_projected_potential(&seg, Point2::new(2e-7, 0.0), 1.0).is_ok());
        assert!(LineChargeSegment::new(Point2::ORIGIN, Point2::ORIGIN, 1.0).is_err());
    }

    fn small_grid() -> Grid2D {
        Grid2D::centered(64, 64, 1.5e-6, Point2::ORIGIN).unwrap()
    }

    #[test]
    fn zero_density_gives_zero_mask() {
        let m = device_phase_mask(&standard_device(0.0), &beam(), &small_grid()).unwrap();
        assert!(m.values().iter().all(|v| *v == 0.0));
        assert!(m.invalid_count() > 0);
    }

    #[test]
    fn sign_flip_negates_mask() {
        let g = small_grid();
        let a = device_phase_mask(&standard_device(3e-10), &beam(), &g).unwrap();
        let b = device_phase_mask(&standard_device(-3e-10), &beam(), &g).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_eq!(*x, -*y);
        }
        assert_eq!(a.validity(), b.validity());
    }

    #[test]
    fn mask_linear_in_density() {
        let g = small_grid();
        let base = device_phase_mask(&standard_device(1e-10), &beam(), &g).unwrap();
        for c in [-2.0, 0.5, 10.0] {
            let scaled = device_phase_mask(&standard_device(c * 1e-10), &beam(), &g).unwrap();
            for (x, y) in base.values().iter().zip(scaled.values()) {
                assert!((c * x - y).abs() <= 1e-10 * (c * x).abs().max(1.0), "c = {c}: {} vs {y}", c * x);
            }
        }
    }

    #[test]
    fn mask_independent_of_regularization() {
        let g = small_grid();
        let dev = standard_device(8e-10);
        let a = device_phase_mask(&dev, &beam(), &g).unwrap();
        let b = device_phase_mask(&dev.with_rho0(10.0), &beam(), &g).unwrap();
        let c = device_phase_mask(&dev.with_rho0(1e-7), &beam(), &g).unwrap();
        for ((x, y), z) in a.values().iter().zip(b.values()).zip(c.values()) {
            assert!((x - y).abs() < 1e-10);
            assert!((x - z).abs() < 1e-10);
        }
    }

    #[test]
    fn footprint_covers_wires_and_bridge() {
        let dev = standard_device(1e-10);
        assert!(dev.in_footprint(Point2::new(-1e-7, 0.0)));
        assert!(dev.in_footprint(Point2::new(-1e-7, 2e-7)));
        assert!(dev.in_footprint(Point2::new(-1e-7, -2.9e-7)));
        assert!(!dev.in_footprint(Point2::new(-1e-7, 3.1e-7)));
        assert!(!dev.in_footprint(Point2::new(1e-9, 0.0)));
        assert!((dev.footprint_half_width() - 3e-7).abs() < 1e-18);
        assert!((dev.separation() - 4e-7).abs() < 1e-18);
    }

    #[test]
    fn non_neutral_device_rejected() {
        let mut dev = standard_device(1e-10);
        dev.negative.density *= 0.9;
        assert!(matches!(device_phase_mask(&dev, &beam(), &small_grid()), Err(Error::Configuration(_))));
        assert!(matches!(effective_topological_charge(&dev, &beam(), 4.5e-7), Err(Error::Configuration(_))));
    }

    #[test]
    fn non_parallel_device_rejected() {
        let mut dev = standard_device(1e-10);
        dev.negative.endpoint_b = dev.negative.endpoint_b + Point2::new(0.0, 1e-8);
        assert!(matches!(dev.validate(), Err(Error::Configuration(_))));
    }

    #[test]
    fn effective_charge_zero_and_linear() {
        let b = beam();
        assert_eq!(effective_topological_charge(&standard_device(0.0), &b, 4.5e-7).unwrap(), 0.0);
        let one = effective_topological_charge(&standard_device(1e-10), &b, 4.5e-7).unwrap();
        let two = effective_topological_charge(&standard_device(2e-10), &b, 4.5e-7).unwrap();
        assert!((two - 2.0 * one).abs() <= 1e-12 * two.abs());
        assert!(one.abs() > 0.1);
    }

    #[test]
    fn effective_charge_loop_geometry_errors() {
        let b = beam();
        let dev = standard_device(1e-10);
        assert!(matches!(effective_topological_charge(&dev, &b, 2e-7), Err(Error::Geometry(_))));
        assert!(matches!(effective_topological_charge(&dev, &b, 20e-6), Err(Error::Geometry(_))));
    }

    // The accumulated phase must equal the sum of small steps of the mask
    // along the arc (continuity of the mask off the footprint).
    #[test]
    fn effective_charge_equals_arc_accumulation() {
        let b = beam();
        let dev = standard_device(5e-10);
        let r = 4.5e-7;
        let (c, a0, a1) = tip_arc(&dev, r).unwrap();
        let n = 20_000;
        let pts: Vec<f64> = (0..=n)
            .map(|k| dev.phase_at(&b, c + Point2::from_polar(r, a0 + (a1 - a0) * k as f64 / n as f64)))
            .collect();
        let steps: f64 = pts.windows(2).map(|w| w[1] - w[0]).sum();
        let max_step = pts.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
        assert!(max_step < 0.1);
        let ell = effective_topological_charge(&dev, &b, r).unwrap();
        assert!((steps / TAU - ell).abs() < 1e-9 * ell.abs());
    }

    // With gap << loop radius << wire length the pair acts as a line of
    // dipoles ending at the tip: the phase on the loop is ℓ_eff times the
    // azimuth measured away from the wires, up to a constant.
    #[test]
    fn tip_limit_is_nearly_azimuthal() {
        let b = beam();
        let dev = DeviceGeometry::two_wire(Point2::ORIGIN, PI, 15e-6, 2e-9, 8e-9, 2e-8).unwrap();
        let r = 5e-7;
        let ell = effective_topological_charge(&dev, &b, r).unwrap();
        let (c, a0, a1) = tip_arc(&dev, r).unwrap();
        let n = 4096;
        let axis = dev.axis().angle();
        let mut resid = Vec::with_capacity(n);
        for k in 0..n {
            let ang = a0 + (a1 - a0) * (k as f64 + 0.5) / n as f64;
            // azimuth in (−π, π) measured from the direction opposite the wires
            let psi = ang - axis - PI;
            resid.push(dev.phase_at(&b, c + Point2::from_polar(r, ang)) - ell * psi);
        }
        let mean = resid.iter().sum::<f64>() / n as f64;
        let rms = (resid.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64).sqrt();
        assert!(rms < 0.05 * TAU * ell.abs(), "rms {rms}, ell {ell}");
    }

    #[test]
    fn two_wire_rejects_bad_dimensions() {
        assert!(DeviceGeometry::two_wire(Point2::ORIGIN, 0.0, 0.0, 1e-7, 1e-7, 1e-10).is_err());
        assert!(DeviceGeometry::two_wire(Point2::ORIGIN, 0.0, 1e-5, 1e-7, 0.0, 1e-10).is_err());
    }
}
