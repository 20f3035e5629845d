use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::grid::{ComplexField2D, ScalarField2D};
use crate::holography::phase_map;
use crate::topology::locate_vortices;
#[allow(unused_imports)] // unused whenever std is linked
use num_traits::Float;

/// Azimuthally averaged profile on bins of one pixel pitch.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    /// Bin radii `k·pitch`, m.
    pub radii: Vec<f64>,
    /// Mean of valid pixels whose distance rounds to the bin.
    pub values: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Radial profile about `center`, out to the largest circle inside the grid.
pub fn radial_profile(field: &ScalarField2D, center: Point2) -> Result<RadialProfile> {
    let g = field.grid();
    if !g.contains(center) {
        return Err(Error::Geometry(format!("center ({:e}, {:e}) is outside the grid", center.x, center.y)));
    }
    let (u, v) = g.to_pixel(center);
    let reach = u.min(v).min((g.nx() - 1) as f64 - u).min((g.ny() - 1) as f64 - v);
    let nbins = reach.floor() as usize + 1;
    let mut sums = vec![0.0; nbins];
    let mut counts = vec![0usize; nbins];
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            if !field.is_valid(i, j) {
                continue;
            }
            let r = (g.point(i, j) - center).norm() / g.pitch();
            let k = r.round() as usize;
            if r <= reach && k < nbins {
                sums[k] += field.get(i, j);
                counts[k] += 1;
            }
        }
    }
    // keep the leading run of populated bins
    let used = counts.iter().position(|c| *c == 0).unwrap_or(nbins);
    Ok(RadialProfile {
        radii: (0..used).map(|k| k as f64 * g.pitch()).collect(),
        values: sums[..used].iter().zip(&counts).map(|(s, c)| s / *c as f64).collect(),
        counts: counts[..used].to_vec(),
    })
}

/// Radius of the dark core: where the azimuthally averaged intensity first
/// climbs to half the height of the bright ring, linearly interpolated
/// between bins. The ring is the global maximum of the profile.
pub fn core_radius(intensity: &ScalarField2D, center: Point2) -> Result<f64> {
    let prof = radial_profile(intensity, center)?;
    if prof.values.len() < 8 {
        return Err(Error::Resolution(format!(
            "only {} radial bins fit around the center; at least 8 are needed",
            prof.values.len()
        )));
    }
    let (peak_bin, peak) =
        prof.values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |b, (k, v)| if v > b.1 { (k, v) } else { b });
    let half = 0.5 * peak;
    if peak_bin == 0 || !(peak > 0.0) || prof.values[0] >= half {
        return Err(Error::NoCore("azimuthal profile has no dark center below half the ring maximum".into()));
    }
    let k = (1..=peak_bin).find(|&k| prof.values[k] >= half).unwrap_or(peak_bin);
    let (v0, v1) = (prof.values[k - 1], prof.values[k]);
    let (r0, r1) = (prof.radii[k - 1], prof.radii[k]);
    Ok(r0 + (half - v0) / (v1 - v0) * (r1 - r0))
}

/// Default analysis center: the detected vortex of largest charge (nearest
/// the intensity centroid on ties), else the intensity centroid.
pub fn spectrum_center(psi: &ComplexField2D, amplitude_floor: f64) -> Result<Point2> {
    let g = psi.grid();
    let (mut sx, mut sy, mut s) = (0.0, 0.0, 0.0);
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let w = psi.get(i, j).norm_sqr();
            let p = g.point(i, j);
            sx += w * p.x;
            sy += w * p.y;
            s += w;
        }
    }
    if !(s > 0.0) {
        return Err(Error::Domain("field is identically zero".into()));
    }
    let centroid = Point2::new(sx / s, sy / s);
    let vortices = locate_vortices(&phase_map(psi, amplitude_floor)?);
    let best = vortices.iter().max_by(|a, b| {
        a.charge
            .abs()
            .cmp(&b.charge.abs())
            .then(b.position.distance(centroid).total_cmp(&a.position.distance(centroid)))
    });
    Ok(best.map(|v| v.position).unwrap_or(centroid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::oam_spectrum;
    use crate::grid::Grid2D;
    use crate::wave::make_gaussian;
    use num_complex::Complex64;

    fn grid(n: usize) -> Grid2D {
        Grid2D::centered(n, n, n as f64 * 1e-9, Point2::ORIGIN).unwrap()
    }

    fn lg(g: Grid2D, ell: i64, w: f64, c: Point2) -> ComplexField2D {
        let mut psi = ComplexField2D::from_fn(g, |p| {
            let d = p - c;
            let r = d.norm() / w;
            Complex64::from_polar(r.powi(ell.abs() as i32) * (-r * r).exp(), ell as f64 * d.angle())
        });
        psi.normalize().unwrap();
        psi
    }

    fn intensity(psi: &ComplexField2D) -> ScalarField2D {
        crate::wave::intensity(psi)
    }

    #[test]
    fn gaussian_has_no_core() {
        let g = grid(128);
        let psi = make_gaussian(&g, 20e-9, Point2::ORIGIN).unwrap();
        assert!(matches!(core_radius(&intensity(&psi), Point2::ORIGIN), Err(Error::NoCore(_))));
    }

    // |LG_0^ℓ|² ∝ r^{2|ℓ|} exp(−2r²/w²) peaks at r = w√(|ℓ|/2); for ℓ = 1 it
    // reaches half the peak at the root of x·e^{1−x} = ½ with x = 2r²/w².
    #[test]
    fn laguerre_gauss_core_radius() {
        let g = grid(256);
        let w = 30e-9;
        let r = core_radius(&intensity(&lg(g, 1, w, Point2::ORIGIN)), Point2::ORIGIN).unwrap();
        let mut x = 0.2;
        for _ in 0..60 {
            let f = x * (1.0 - x).exp() - 0.5;
            x -= f / ((1.0 - x) * (1.0 - x).exp());
        }
        let expected = w * (x / 2.0).sqrt();
        assert!((r / expected - 1.0).abs() < 0.02, "{r} vs {expected}");
    }

    #[test]
    fn core_grows_with_charge() {
        let g = grid(256);
        let radii: Vec<f64> = [1, 3, 10]
            .iter()
            .map(|&l| core_radius(&intensity(&lg(g, l, 25e-9, Point2::ORIGIN)), Point2::ORIGIN).unwrap())
            .collect();
        assert!(radii[0] < radii[1] && radii[1] < radii[2], "{radii:?}");
    }

    #[test]
    fn too_few_bins() {
        let g = grid(32);
        let psi = lg(g, 1, 8e-9, Point2::ORIGIN);
        assert!(matches!(core_radius(&intensity(&psi), g.point(2, 2)), Err(Error::Resolution(_))));
        assert!(matches!(core_radius(&intensity(&psi), Point2::new(1.0, 0.0)), Err(Error::Geometry(_))));
    }

    #[test]
    fn center_defaults() {
        let g = grid(128);
        let c = Point2::new(5.5e-9, -3.5e-9);
        let psi = lg(g, 3, 20e-9, c);
        let found = spectrum_center(&psi, 0.05).unwrap();
        assert!(found.distance(c) < 2e-9, "{found:?}");
        let plain = make_gaussian(&g, 20e-9, Point2::new(4e-9, 2e-9)).unwrap();
        let centroid = spectrum_center(&plain, 0.05).unwrap();
        assert!(centroid.distance(Point2::new(4e-9, 2e-9)) < 1e-12);
    }

    #[test]
    fn off_center_spectrum_spreads() {
        let g = grid(256);
        for ell in [1i64, 5] {
            let psi = lg(g, ell, 25e-9, Point2::ORIGIN);
            let rc = core_radius(&intensity(&psi), Point2::ORIGIN).unwrap();
            let on = oam_spectrum(&psi, Point2::ORIGIN, 20).unwrap();
            assert!(on.weight(ell) > 0.99);
            let off = oam_spectrum(&psi, Point2::new(2.0 * rc, 0.0), 20).unwrap();
            assert!(off.peak().1 < 0.9, "ell {ell}: {:?}", off.peak());
        }
    }
}
