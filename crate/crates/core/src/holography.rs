//! Off-axis hologram synthesis and sideband reconstruction.
//!
//! The reference is an ideal tilted plane wave `a · exp(2πi k·r)` with
//! `k = (cos α, sin α)/d`. The object term `ψ · conj(R)` of the hologram sits
//! at spatial frequency `−k`; reconstruction filters that sideband with a
//! soft circular mask and demodulates it in real space.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{signed_bin, Fft2};
use crate::geometry::Point2;
use crate::grid::{ComplexField2D, Grid2D, ScalarField2D};
use crate::phase::wrap;
#[allow(unused_imports)] // unused whenever std is linked
use num_traits::Float;

/// Fraction of the mask radius over which the raised-cosine edge falls off.
const MASK_EDGE: f64 = 0.2;
/// Bins searched around the nominal carrier.
const CARRIER_SEARCH: i64 = 2;
/// Sideband peak must exceed this fraction of the zero-frequency magnitude.
const CARRIER_THRESHOLD: f64 = 1e-4;
/// Fraction of highest-amplitude pixels that fixes the global phase.
const OFFSET_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HologramParams {
    /// Fringe period d, m.
    pub fringe_spacing: f64,
    /// Carrier direction α, rad from +x.
    pub fringe_angle: f64,
    /// Reference amplitude a, in the units of the object field.
    pub reference_amplitude: f64,
    /// Sideband mask radius, 1/m.
    pub sideband_mask_radius: f64,
}

impl HologramParams {
    /// Parameters with the default sideband mask, one third of the carrier
    /// frequency.
    pub fn new(fringe_spacing: f64, fringe_angle: f64, reference_amplitude: f64) -> Self {
        Self { fringe_spacing, fringe_angle, reference_amplitude, sideband_mask_radius: 1.0 / (3.0 * fringe_spacing) }
    }

    pub fn with_mask_radius(mut self, radius: f64) -> Self {
        self.sideband_mask_radius = radius;
        self
    }

    /// Carrier frequency `1/d`, 1/m.
    pub fn carrier_frequency(&self) -> f64 {
        1.0 / self.fringe_spacing
    }

    /// Carrier wave vector `(cos α, sin α)/d`, 1/m.
    pub fn carrier(&self) -> Point2 {
        Point2::from_polar(self.carrier_frequency(), self.fringe_angle)
    }

    pub fn validate(&self, grid: &Grid2D) -> Result<()> {
        if !self.fringe_spacing.is_finite() || !(self.fringe_spacing >= 2.0 * grid.pitch()) {
            return Err(Error::Sampling(format!(
                "fringe spacing {:e} m is below the Nyquist limit of two pixels ({:e} m)",
                self.fringe_spacing,
                2.0 * grid.pitch()
            )));
        }
        if !self.fringe_angle.is_finite() {
            return Err(Error::Domain("fringe angle must be finite".into()));
        }
        if !(self.reference_amplitude > 0.0) || !self.reference_amplitude.is_finite() {
            return Err(Error::Domain(format!(
                "reference amplitude must be positive, got {}",
                self.reference_amplitude
            )));
        }
        let fc = self.carrier_frequency();
        if !(self.sideband_mask_radius > 0.0) || !(self.sideband_mask_radius < 0.5 * fc) {
            return Err(Error::Configuration(format!(
                "sideband mask radius {:e} 1/m must be positive and below half the carrier frequency ({:e} 1/m), or it overlaps the autocorrelation band",
                self.sideband_mask_radius,
                0.5 * fc
            )));
        }
        Ok(())
    }

    fn reference(&self, p: Point2) -> Complex64 {
        Complex64::from_polar(self.reference_amplitude, TAU * self.carrier().dot(p))
    }
}

/// `|ψ + a·exp(2πi(x cos α + y sin α)/d)|²` pixelwise.
pub fn simulate_hologram(psi: &ComplexField2D, params: &HologramParams) -> Result<ScalarField2D> {
    let g = *psi.grid();
    params.validate(&g)?;
    let mut values = Vec::with_capacity(g.len());
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            values.push((psi.get(i, j) + params.reference(g.point(i, j))).norm_sqr());
        }
    }
    ScalarField2D::from_values(g, values)
}

fn mask_weight(r: f64, radius: f64) -> f64 {
    let inner = (1.0 - MASK_EDGE) * radius;
    if r <= inner {
        1.0
    } else if r >= radius {
        0.0
    } else {
        0.5 * (1.0 + (PI * (r - inner) / (MASK_EDGE * radius)).cos())
    }
}

/// Recovers the complex object wave from a hologram.
///
/// The sideband at `−k` is isolated with a circular mask (hard inside,
/// raised-cosine over the outer 20% of its radius), transformed back, and
/// multiplied by `exp(2πi k·r)/a`. The result matches the object up to the
/// low-pass filter; its global phase is fixed by [`remove_global_offset`].
pub fn reconstruct_sideband(hologram: &ScalarField2D, params: &HologramParams) -> Result<ComplexField2D> {
    let g = *hologram.grid();
    params.validate(&g)?;
    let (nx, ny) = (g.nx(), g.ny());
    let mut spec: Vec<Complex64> = hologram
        .values()
        .iter()
        .zip(hologram.validity())
        .map(|(v, ok)| Complex64::new(if *ok { *v } else { 0.0 }, 0.0))
        .collect();
    let fft = Fft2::new(nx, ny);
    fft.forward(&mut spec);

    let (dfx, dfy) = (1.0 / (nx as f64 * g.pitch()), 1.0 / (ny as f64 * g.pitch()));
    let side = -params.carrier();
    locate_carrier(&spec, nx, ny, side.x / dfx, side.y / dfy)?;

    let radius = params.sideband_mask_radius;
    for (j, row) in spec.chunks_exact_mut(nx).enumerate() {
        let fy = signed_bin(j, ny) as f64 * dfy - side.y;
        for (i, z) in row.iter_mut().enumerate() {
            let fx = signed_bin(i, nx) as f64 * dfx - side.x;
            *z *= mask_weight(fx.hypot(fy), radius);
        }
    }
    fft.inverse(&mut spec);

    let inv_a = 1.0 / params.reference_amplitude;
    for j in 0..ny {
        for i in 0..nx {
            let k = g.index(i, j);
            spec[k] *= Complex64::from_polar(inv_a, TAU * params.carrier().dot(g.point(i, j)));
        }
    }
    let mut out = ComplexField2D::from_data(g, spec)?;
    remove_global_offset(&mut out);
    Ok(out)
}

/// Finds the strongest bin within two bins of the nominal sideband position
/// and checks that it stands out against the zero-frequency term. A strict
/// local maximum is not required: vortex objects have a ring-shaped sideband
/// that is dark at its center.
fn locate_carrier(spec: &[Complex64], nx: usize, ny: usize, kx: f64, ky: f64) -> Result<(i64, i64)> {
    let wrap_bin = |k: i64, n: usize| k.rem_euclid(n as i64) as usize;
    let mag = |kx: i64, ky: i64| spec[wrap_bin(ky, ny) * nx + wrap_bin(kx, nx)].norm();
    let (cx, cy) = (kx.round() as i64, ky.round() as i64);
    let mut best = (cx, cy, -1.0);
    for dy in -CARRIER_SEARCH..=CARRIER_SEARCH {
        for dx in -CARRIER_SEARCH..=CARRIER_SEARCH {
            let m = mag(cx + dx, cy + dy);
            if m > best.2 {
                best = (cx + dx, cy + dy, m);
            }
        }
    }
    let (bx, by, peak) = best;
    let dc = spec[0].norm();
    if !(peak > CARRIER_THRESHOLD * dc) {
        return Err(Error::CarrierDetection(format!(
            "no sideband peak within {CARRIER_SEARCH} bins of ({kx:.2}, {ky:.2}); peak/dc = {:e}",
            if dc > 0.0 { peak / dc } else { 0.0 }
        )));
    }
    Ok((bx, by))
}

/// Circular mean phase over the 10% highest-amplitude pixels.
pub fn global_offset(field: &ComplexField2D) -> f64 {
    let mut amps: Vec<f64> = field.data().iter().map(|z| z.norm()).collect();
    let n = amps.len();
    let keep = ((n as f64 * OFFSET_FRACTION).ceil() as usize).clamp(1, n);
    let (_, threshold, _) = amps.select_nth_unstable_by(n - keep, |a, b| a.total_cmp(b));
    let threshold = *threshold;
    let sum: Complex64 = field
        .data()
        .iter()
        .filter(|z| z.norm() >= threshold)
        .map(|z| if z.norm() > 0.0 { z / z.norm() } else { Complex64::new(0.0, 0.0) })
        .sum();
    if sum.norm() > 0.0 {
        sum.arg()
    } else {
        0.0
    }
}

/// Rotates the field so that [`global_offset`] is zero; returns the removed
/// offset.
pub fn remove_global_offset(field: &mut ComplexField2D) -> f64 {
    let off = global_offset(field);
    let rot = Complex64::cis(-off);
    for z in field.data_mut() {
        *z *= rot;
    }
    off
}

/// `arg ψ` in (−π, π]; pixels below `amplitude_floor · max|ψ|` are invalid.
pub fn phase_map(field: &ComplexField2D, amplitude_floor: f64) -> Result<ScalarField2D> {
    if !(amplitude_floor > 0.0 && amplitude_floor < 1.0) {
        return Err(Error::Domain(format!("amplitude floor must lie in (0, 1), got {amplitude_floor}")));
    }
    let peak = field.data().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let cut = amplitude_floor * peak;
    let values = field.data().iter().map(|z| wrap(z.arg())).collect();
    let valid = field.data().iter().map(|z| z.norm() >= cut && z.norm() > 0.0).collect();
    ScalarField2D::with_validity(*field.grid(), values, valid)
}

/// RMS of the wrapped difference between two phase maps over pixels valid
/// in both, after removing their circular-mean offset.
pub fn phase_rms_difference(a: &ScalarField2D, b: &ScalarField2D) -> Result<f64> {
    a.grid().check_same(b.grid())?;
    let diffs: Vec<f64> = a
        .values()
        .iter()
        .zip(b.values())
        .zip(a.validity().iter().zip(b.validity()))
        .filter(|(_, (va, vb))| **va && **vb)
        .map(|((x, y), _)| wrap(x - y))
        .collect();
    if diffs.is_empty() {
        return Err(Error::Domain("no pixel is valid in both phase maps".into()));
    }
    let mean: Complex64 = diffs.iter().map(|d| Complex64::cis(*d)).sum();
    let off = mean.arg();
    let ss: f64 = diffs.iter().map(|d| wrap(d - off).powi(2)).sum();
    Ok((ss / diffs.len() as f64).sqrt())
}
