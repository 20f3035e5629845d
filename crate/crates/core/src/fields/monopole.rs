//! Magnetic monopole: field, analytic Dirac phase, and the Stokes-surface
//! flux integral that produces it.

use alloc::format;
use core::f64::consts::{PI, TAU};

use super::azimuthal::helical;
use crate::constants::CODATA_2018;
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::grid::{Grid2D, ScalarField2D};
#[allow(unused_imports)] // unused whenever std is linked
use num_traits::Float;

/// A point magnetic charge.
///
/// The strength is stored in units of `h/(eμ₀)`, the magnetic charge that
/// imprints exactly one unit of topological charge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonopoleSpec {
    strength: f64,
    position: Vec3,
}

impl MonopoleSpec {
    pub fn new(strength: f64, position: Vec3) -> Result<Self> {
        if !strength.is_finite() {
            return Err(Error::Domain(format!("monopole strength must be finite, got {strength}")));
        }
        if !position.is_finite() {
            return Err(Error::Domain("monopole position must be finite".into()));
        }
        Ok(Self { strength, position })
    }

    /// Builds a monopole from its magnetic charge `q_m` in A·m.
    pub fn from_magnetic_charge(q_m: f64, position: Vec3) -> Result<Self> {
        Self::new(q_m / CODATA_2018.flux_quantum_charge(), position)
    }

    /// Dimensionless strength `e μ₀ q_m / h`.
    pub fn strength(&self) -> f64 {
        self.strength
    }

    /// Magnetic charge `q_m`, A·m.
    pub fn magnetic_charge(&self) -> f64 {
        self.strength * CODATA_2018.flux_quantum_charge()
    }

    pub fn position(&self) -> Vec3 {
        self.position
    }
}

/// `B = μ₀ q_m r / (4π |r|³)` with `r` measured from the monopole, in tesla.
pub fn monopole_b_field(spec: &MonopoleSpec, point: Vec3) -> Result<Vec3> {
    let r = point - spec.position;
    let d = r.norm();
    if !(d > 0.0) {
        return Err(Error::Singularity("magnetic field evaluated at the monopole position".into()));
    }
    let k = CODATA_2018.mu0 * spec.magnetic_charge() / (4.0 * PI * d * d * d);
    Ok(r * k)
}

/// Dirac phase `(e μ₀ q_m / h) φ` about the monopole's transverse position,
/// wrapped to (−π, π]. A pixel exactly under the monopole is flagged invalid.
pub fn monopole_phase_analytic(spec: &MonopoleSpec, grid: &Grid2D) -> ScalarField2D {
    helical(spec.strength, grid, spec.position.transverse())
}

/// Panel counts and cylinder radius for the surface flux integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Panels along the azimuth between the two bounding trajectories.
    pub azimuthal_panels: usize,
    /// Panels along the compactified propagation axis.
    pub axial_panels: usize,
    /// Transverse distance of the trajectories from the monopole, m.
    pub radius: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { azimuthal_panels: 512, axial_panels: 512, radius: 100e-9 }
    }
}

/// Relative Dirac phase between the trajectory at azimuth 0 and the one at
/// `phi`, from the magnetic flux through the cylindrical strip they bound.
///
/// The strip `{ρ = radius, 0 ≤ φ' ≤ phi, z ∈ ℝ}` is integrated with the
/// midpoint rule on `(φ', u)` where `z = z₀ + ρ tan u`, which maps the infinite
/// axis onto (−π/2, π/2) without truncation. One Richardson step against the
/// half-resolution sum removes the leading `h²` error, so both panel counts
/// must be even.
pub fn monopole_phase_numeric(spec: &MonopoleSpec, phi: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !(0.0..TAU).contains(&phi) {
        return Err(Error::Domain(format!("azimuth must lie in [0, 2π), got {phi}")));
    }
    let (na, nz) = (quad.azimuthal_panels, quad.axial_panels);
    if na < 8 || nz < 8 || na % 2 == 1 || nz % 2 == 1 {
        return Err(Error::Domain(format!("quadrature needs even panel counts >= 8, got {na} x {nz}")));
    }
    if !(quad.radius > 0.0) || !quad.radius.is_finite() {
        return Err(Error::Singularity(format!(
            "integration surface at radius {} passes through the monopole",
            quad.radius
        )));
    }
    if phi == 0.0 {
        return Ok(0.0);
    }
    let fine = strip_flux(spec, phi, quad.radius, na, nz)?;
    let coarse = strip_flux(spec, phi, quad.radius, na / 2, nz / 2)?;
    let flux = (4.0 * fine - coarse) / 3.0;
    Ok(CODATA_2018.electron_charge_e * flux / CODATA_2018.hbar)
}

fn strip_flux(spec: &MonopoleSpec, phi: f64, rho: f64, na: usize, nz: usize) -> Result<f64> {
    let c = spec.position;
    let da = phi / na as f64;
    let du = PI / nz as f64;
    let mut total = 0.0;
    for a in 0..na {
        let ang = (a as f64 + 0.5) * da;
        let (s, co) = ang.sin_cos();
        let normal = Vec3::new(co, s, 0.0);
        let mut column = 0.0;
        for k in 0..nz {
            let u = -0.5 * PI + (k as f64 + 0.5) * du;
            let sec = 1.0 / u.cos();
            let p = Vec3::new(c.x + rho * co, c.y + rho * s, c.z + rho * u.tan());
            let b = monopole_b_field(spec, p)?;
            // dA = ρ dφ' dz, dz = ρ sec²u du
            column += b.dot(normal) * rho * sec * sec;
        }
        total += column * rho;
    }
    Ok(total * da * du)
}

#[cfg(test)]
mod tests {
    extern crate std;
    use super::*;
    use crate::geometry::Point2;
    use crate::topology::{winding_number, LoopSpec};
    use alloc::vec::Vec;

    fn unit(n: f64) -> MonopoleSpec {
        MonopoleSpec::new(n, Vec3::new(0.0, 0.0, 0.0)).unwrap()
    }

    #[test]
    fn on_axis_field_is_axial() {
        let m = unit(1.0);
        let z = 2e-7;
        let b = monopole_b_field(&m, Vec3::new(0.0, 0.0, z)).unwrap();
        let expected = CODATA_2018.mu0 * m.magnetic_charge() / (4.0 * PI * z * z);
        assert_eq!(b.x, 0.0);
        assert_eq!(b.y, 0.0);
        assert!((b.z - expected).abs() < 1e-14 * expected);
    }

    #[test]
    fn antipodal_fields_opposite() {
        let m = MonopoleSpec::new(2.5, Vec3::new(1e-9, -2e-9, 3e-9)).unwrap();
        let d = Vec3::new(3e-8, -1e-8, 2e-8);
        let b1 = monopole_b_field(&m, m.position() + d).unwrap();
        let b2 = monopole_b_field(&m, m.position() - d).unwrap();
        assert!((b1 + b2).norm() < 1e-14 * b1.norm());
    }

    #[test]
    fn singular_at_position() {
        let m = unit(1.0);
        assert!(matches!(monopole_b_field(&m, m.position()), Err(Error::Singularity(_))));
    }

    // Gauss-Legendre nodes on [-1, 1] by Newton iteration; test-only oracle.
    fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .map(|i| {
                let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
                let mut dp = 0.0;
                for _ in 0..100 {
                    let (mut p0, mut p1) = (1.0, x);
                    for k in 2..=n {
                        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                        p0 = p1;
                        p1 = p2;
                    }
                    dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                    let dx = p1 / dp;
                    x -= dx;
                    if dx.abs() < 1e-16 {
                        break;
                    }
                }
                (x, 2.0 / ((1.0 - x * x) * dp * dp))
            })
            .collect()
    }

    fn sphere_flux(m: &MonopoleSpec, center: Vec3, radius: f64) -> f64 {
        let nodes = gauss_legendre(96);
        let nphi = 192;
        let mut total = 0.0;
        for &(mu, w) in &nodes {
            let st = (1.0 - mu * mu).sqrt();
            for k in 0..nphi {
                let ph = TAU * k as f64 / nphi as f64;
                let n = Vec3::new(st * ph.cos(), st * ph.sin(), mu);
                let b = monopole_b_field(m, center + n * radius).unwrap();
                total += w * b.dot(n);
            }
        }
        total * radius * radius * TAU / nphi as f64
    }

    #[test]
    fn sphere_flux_radius_independent() {
        let m = unit(1.0);
        let expected = CODATA_2018.mu0 * m.magnetic_charge();
        for r in [1e-9, 1e-8, 1e-7, 1e-6] {
            // Off-center sphere so the integrand is not constant.
            let c = Vec3::new(0.2 * r, -0.1 * r, 0.15 * r);
            let flux = sphere_flux(&m, c, r);
            assert!((flux - expected).abs() < 1e-8 * expected, "r = {r}: {flux} vs {expected}");
        }
    }

    #[test]
    fn numeric_phase_degenerate_surface() {
        assert_eq!(monopole_phase_numeric(&unit(1.0), 0.0, &QuadratureSpec::default()).unwrap(), 0.0);
    }

    #[test]
    fn numeric_phase_half_turn() {
        let q = QuadratureSpec::default();
        let v = monopole_phase_numeric(&unit(1.0), PI, &q).unwrap();
        assert!((v - PI).abs() < 1e-6 * PI, "{v}");
    }

    #[test]
    fn numeric_phase_matches_analytic_for_several_strengths() {
        let q = QuadratureSpec { azimuthal_panels: 64, axial_panels: 512, radius: 3e-8 };
        for n in [1.0, 2.0, 5.0] {
            let m = MonopoleSpec::new(n, Vec3::new(5e-9, -4e-9, 1e-8)).unwrap();
            for phi in [PI / 4.0, PI / 2.0, PI, 1.5 * PI] {
                let v = monopole_phase_numeric(&m, phi, &q).unwrap();
                assert!((v - n * phi).abs() < 1e-6 * n * phi, "n = {n}, phi = {phi}: {v}");
            }
        }
    }

    // Independent route: the flux per unit azimuth is ρ ∫ B_ρ dz, integrated
    // here with composite Simpson directly in z (no compactification) plus the
    // analytic tail beyond |z| = Z.
    #[test]
    fn numeric_phase_matches_direct_z_quadrature() {
        let m = unit(1.0);
        let rho = 5e-8;
        let zmax = 200.0 * rho;
        let n = 200_000;
        let h = 2.0 * zmax / n as f64;
        let f = |z: f64| monopole_b_field(&m, Vec3::new(rho, 0.0, z)).unwrap().x * rho;
        let mut s = f(-zmax) + f(zmax);
        for k in 1..n {
            let z = -zmax + k as f64 * h;
            s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(z);
        }
        let mut per_azimuth = s * h / 3.0;
        // tails: ∫_Z^∞ ρ² dz / (ρ² + z²)^{3/2} = 1 - Z/sqrt(Z² + ρ²), times μ₀q_m/4π, both sides
        let k = CODATA_2018.mu0 * m.magnetic_charge() / (4.0 * PI);
        per_azimuth += 2.0 * k * (1.0 - zmax / (zmax * zmax + rho * rho).sqrt());
        let phi = 2.0;
        let oracle = CODATA_2018.electron_charge_e * per_azimuth * phi / CODATA_2018.hbar;
        let q = QuadratureSpec { azimuthal_panels: 16, axial_panels: 256, radius: rho };
        let v = monopole_phase_numeric(&m, phi, &q).unwrap();
        assert!((v - oracle).abs() < 1e-8 * oracle, "{v} vs {oracle}");
    }

    #[test]
    fn numeric_phase_linear_in_charge() {
        let q = QuadratureSpec { azimuthal_panels: 32, axial_panels: 64, radius: 1e-8 };
        let a = monopole_phase_numeric(&unit(1.5), 1.0, &q).unwrap();
        let b = monopole_phase_numeric(&unit(3.0), 1.0, &q).unwrap();
        assert!((b - 2.0 * a).abs() <= 4.0 * f64::EPSILON * b.abs());
    }

    #[test]
    fn numeric_phase_input_validation() {
        let m = unit(1.0);
        let bad_panels = QuadratureSpec { azimuthal_panels: 4, axial_panels: 64, radius: 1e-8 };
        assert!(matches!(monopole_phase_numeric(&m, 1.0, &bad_panels), Err(Error::Domain(_))));
        let through = QuadratureSpec { radius: 0.0, ..QuadratureSpec::default() };
        assert!(matches!(monopole_phase_numeric(&m, 1.0, &through), Err(Error::Singularity(_))));
        assert!(monopole_phase_numeric(&m, TAU, &QuadratureSpec::default()).is_err());
        assert!(monopole_phase_numeric(&m, -0.1, &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn analytic_mask_windings() {
        let g = Grid2D::centered(128, 128, 128e-9, Point2::ORIGIN).unwrap();
        let lp = LoopSpec::new(Point2::new(2e-9, -1e-9), 30e-9, 128).unwrap();
        for n in [0.0, 1.0, 3.0, -2.0] {
            let m = MonopoleSpec::new(n, Vec3::new(2e-9, -1e-9, 0.0)).unwrap();
            let f = monopole_phase_analytic(&m, &g);
            assert_eq!(winding_number(&f, &lp).unwrap(), n as i64);
            if n == 0.0 {
                assert!(f.values().iter().all(|v| *v == 0.0));
            }
        }
    }

    #[test]
    fn unit_strength_is_flux_quantum() {
        let m = MonopoleSpec::from_magnetic_charge(CODATA_2018.flux_quantum_charge() * 3.0, Vec3::default()).unwrap();
        assert!((m.strength() - 3.0).abs() < 1e-15);
    }
}
