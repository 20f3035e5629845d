//! Source beams, phase-mask application and paraxial free-space propagation.
//!
//! Fields are normalized so that `Σ|ψ|² · pitch² = 1`. Propagation uses the
//! angular-spectrum method on the periodic grid with the Fresnel transfer
//! function `exp(−iπλz(fx² + fy²))`; positive distances propagate
//! downstream (underfocus toward the detector).

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::beam::BeamParameters;
use crate::error::{Error, Result};
use crate::fft::{signed_bin, Fft2};
use crate::geometry::Point2;
use crate::grid::{ComplexField2D, Grid2D, ScalarField2D};
#[allow(unused_imports)] // unused whenever std is linked
use num_traits::Float;

/// Smallest grid edge accepted by wave operations.
pub const MIN_WAVE_GRID: usize = 16;

/// Default apodization border, as a fraction of the field of view.
pub const DEFAULT_APODIZATION: f64 = 0.05;

fn check_wave_grid(grid: &Grid2D) -> Result<()> {
    if grid.nx() < MIN_WAVE_GRID || grid.ny() < MIN_WAVE_GRID {
        return Err(Error::Domain(format!(
            "wave grids must be at least {MIN_WAVE_GRID}x{MIN_WAVE_GRID}, got {}x{}",
            grid.nx(),
            grid.ny()
        )));
    }
    Ok(())
}

/// Normalized Gaussian `exp(−ρ²/waist²)` with flat phase.
pub fn make_gaussian(grid: &Grid2D, waist: f64, center: Point2) -> Result<ComplexField2D> {
    check_wave_grid(grid)?;
    let limit = 0.25 * grid.fov_x().min(grid.fov_y());
    if !(waist > 2.0 * grid.pitch()) || !(waist <= limit) {
        return Err(Error::Sampling(format!(
            "waist {waist:e} m must exceed two pixels ({:e} m) and not exceed a quarter of the field of view ({limit:e} m)",
            2.0 * grid.pitch()
        )));
    }
    if !center.is_finite() {
        return Err(Error::Domain("beam center must be finite".into()));
    }
    let inv = 1.0 / (waist * waist);
    let mut psi = ComplexField2D::from_fn(*grid, |p| {
        let d = p - center;
        Complex64::new((-d.dot(d) * inv).exp(), 0.0)
    });
    psi.normalize()?;
    Ok(psi)
}

/// `ψ · exp(iθ)`. Pixels where the mask is invalid are blocked (amplitude 0).
pub fn apply_phase_mask(psi: &ComplexField2D, mask: &ScalarField2D) -> Result<ComplexField2D> {
    psi.grid().check_same(mask.grid())?;
    let data = psi
        .data()
        .iter()
        .zip(mask.values().iter().zip(mask.validity()))
        .map(|(z, (t, ok))| if *ok { z * Complex64::cis(*t) } else { Complex64::new(0.0, 0.0) })
        .collect();
    ComplexField2D::from_data(*psi.grid(), data)
}

/// `|ψ|²` pixelwise, in 1/m².
pub fn intensity(psi: &ComplexField2D) -> ScalarField2D {
    let values = psi.data().iter().map(|z| z.norm_sqr()).collect();
    ScalarField2D::with_validity(*psi.grid(), values, alloc::vec![true; psi.grid().len()])
        .expect("intensity has the grid's length")
}

fn max_distance_axis(n: usize, pitch: f64, wavelength: f64) -> f64 {
    let df = 1.0 / (n as f64 * pitch);
    let fmax = (n / 2) as f64 * df;
    1.0 / (wavelength * (fmax * fmax - (fmax - df) * (fmax - df)))
}

/// Largest `|z|` for which the transfer-function phase changes by less than
/// π between the two outermost frequency samples.
pub fn max_fresnel_distance(grid: &Grid2D, beam: &BeamParameters) -> f64 {
    let lam = beam.wavelength();
    max_distance_axis(grid.nx(), grid.pitch(), lam).min(max_distance_axis(grid.ny(), grid.pitch(), lam))
}

/// Paraxial propagation by `distance` meters. Unitary on the periodic grid;
/// apodize first if the field does not vanish at the borders.
pub fn fresnel_propagate(psi: &ComplexField2D, distance: f64, beam: &BeamParameters) -> Result<ComplexField2D> {
    let grid = *psi.grid();
    check_wave_grid(&grid)?;
    if !distance.is_finite() {
        return Err(Error::Domain(format!("propagation distance must be finite, got {distance}")));
    }
    let zmax = max_fresnel_distance(&grid, beam);
    if !(distance.abs() < zmax) {
        return Err(Error::Aliasing { distance, max_distance: zmax });
    }
    if distance == 0.0 {
        return Ok(psi.clone());
    }
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut data = psi.data().to_vec();
    let fft = Fft2::new(nx, ny);
    fft.forward(&mut data);
    let k = -PI * beam.wavelength() * distance;
    let fx: Vec<f64> = (0..nx).map(|i| signed_bin(i, nx) as f64 / (nx as f64 * grid.pitch())).collect();
    let fy: Vec<f64> = (0..ny).map(|j| signed_bin(j, ny) as f64 / (ny as f64 * grid.pitch())).collect();
    for (j, row) in data.chunks_exact_mut(nx).enumerate() {
        let fy2 = fy[j] * fy[j];
        for (z, f) in row.iter_mut().zip(&fx) {
            *z *= Complex64::cis(k * (f * f + fy2));
        }
    }
    fft.inverse(&mut data);
    ComplexField2D::from_data(grid, data)
}

fn raised_cosine_1d(n: usize, border: f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            // distance from the outer edge in pixels, 0 at the edge samples
            let d = (i.min(n - 1 - i)) as f64;
            if border <= 0.0 || d >= border {
                1.0
            } else {
                0.5 * (1.0 - (PI * d / border).cos())
            }
        })
        .collect()
}

/// Separable window that rises from 0 at the grid edge to 1 over a border of
/// `fraction` of the field of view, with a raised-cosine profile.
pub fn raised_cosine_window(grid: &Grid2D, fraction: f64) -> Result<ScalarField2D> {
    if !(0.0..0.5).contains(&fraction) {
        return Err(Error::Domain(format!("apodization fraction must lie in [0, 0.5), got {fraction}")));
    }
    let wx = raised_cosine_1d(grid.nx(), fraction * grid.nx() as f64);
    let wy = raised_cosine_1d(grid.ny(), fraction * grid.ny() as f64);
    let values = wy.iter().flat_map(|b| wx.iter().map(move |a| a * b)).collect();
    ScalarField2D::from_values(*grid, values)
}

/// Multiplies by [`raised_cosine_window`] to suppress wrap-around in
/// periodic propagation. Does not renormalize.
pub fn apodize(psi: &ComplexField2D, fraction: f64) -> Result<ComplexField2D> {
    let w = raised_cosine_window(psi.grid(), fraction)?;
    let data = psi.data().iter().zip(w.values()).map(|(z, a)| z * *a).collect();
    ComplexField2D::from_data(*psi.grid(), data)
}

/// Intensity-weighted second moment `⟨ρ²⟩` about `center`, m².
pub fn second_moment(psi: &ComplexField2D, center: Point2) -> f64 {
    let g = psi.grid();
    let (mut num, mut den) = (0.0, 0.0);
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let w = psi.get(i, j).norm_sqr();
            let d = g.point(i, j) - center;
            num += w * d.dot(d);
            den += w;
        }
    }
    num / den
}
