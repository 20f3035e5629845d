use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{signed_bin, Fft};
use crate::geometry::Point2;
use crate::grid::ComplexField2D;
#[allow(unused_imports)] // unused whenever std is linked
use num_traits::Float;

/// Probability of each OAM component `ℓ ∈ [−ell_max, ell_max]`, plus the
/// weight found outside that range.
#[derive(Debug, Clone, PartialEq)]
pub struct OamSpectrum {
    ell_max: i64,
    weights: Vec<f64>,
    remainder: f64,
}

impl OamSpectrum {
    /// `weights[k]` belongs to `ℓ = k − ell_max`.
    pub fn new(ell_max: i64, weights: Vec<f64>, remainder: f64) -> Result<Self> {
        if ell_max < 0 || weights.len() as i64 != 2 * ell_max + 1 {
            return Err(Error::Shape(format!(
                "spectrum with ell_max {ell_max} needs {} weights, got {}",
                2 * ell_max + 1,
                weights.len()
            )));
        }
        if weights.iter().chain([&remainder]).any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::Domain("spectrum weights must be finite and non-negative".into()));
        }
        let total: f64 = weights.iter().sum::<f64>() + remainder;
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("spectrum weights sum to {total}, not 1")));
        }
        Ok(Self { ell_max, weights, remainder })
    }

    pub fn ell_max(&self) -> i64 {
        self.ell_max
    }

    pub fn ells(&self) -> impl Iterator<Item = i64> + '_ {
        -self.ell_max..=self.ell_max
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `P_ℓ`, zero outside the computed range.
    pub fn weight(&self, ell: i64) -> f64 {
        if ell.abs() > self.ell_max {
            0.0
        } else {
            self.weights[(ell + self.ell_max) as usize]
        }
    }

    /// Weight carried by components with `|ℓ| > ell_max`.
    pub fn remainder(&self) -> f64 {
        self.remainder
    }

    /// Dominant component and its weight.
    pub fn peak(&self) -> (i64, f64) {
        self.ells()
            .zip(self.weights.iter().copied())
            .fold((0, -1.0), |best, (l, w)| if w > best.1 { (l, w) } else { best })
    }
}

/// `Σ ℓ P_ℓ`, in units of ħ.
pub fn mean_oam(spectrum: &OamSpectrum) -> f64 {
    spectrum.ells().zip(spectrum.weights()).map(|(l, w)| l as f64 * w).sum()
}

/// Azimuthal decomposition of `psi` about `center`.
///
/// The field is resampled bilinearly on circles of radius `(k + ½)·pitch`
/// that fit inside the grid, with `max(512, 8·ell_max)` samples per circle.
/// Weights are `Σ_k |c_ℓ(r_k)|² r_k`, normalized by the total power on the
/// polar grid, so the in-range weights and the remainder sum to one.
pub fn oam_spectrum(psi: &ComplexField2D, center: Point2, ell_max: i64) -> Result<OamSpectrum> {
    if ell_max < 1 {
        return Err(Error::Domain(format!("ell_max must be at least 1, got {ell_max}")));
    }
    let g = psi.grid();
    if !g.contains(center) {
        return Err(Error::Geometry(format!("spectrum center ({:e}, {:e}) is outside the grid", center.x, center.y)));
    }
    let (u, v) = g.to_pixel(center);
    let reach = u.min(v).min((g.nx() - 1) as f64 - u).min((g.ny() - 1) as f64 - v);
    let n_rings = if reach >= 0.5 { (reach - 0.5).floor() as usize + 1 } else { 0 };
    let r_max = reach * g.pitch();
    if n_rings == 0 || (ell_max as f64) > core::f64::consts::PI * r_max / g.pitch() {
        return Err(Error::Resolution(format!(
            "ell_max {ell_max} cannot be resolved on circles of at most {:.1} pixels radius",
            reach
        )));
    }
    let n_phi = (8 * ell_max as usize).max(512);
    let fft = Fft::new(n_phi);
    let trig: Vec<Point2> = (0..n_phi).map(|k| Point2::from_polar(1.0, TAU * k as f64 / n_phi as f64)).collect();
    let mut acc = vec![0.0; 2 * ell_max as usize + 1];
    let (mut total, mut outside) = (0.0, 0.0);
    let mut ring = vec![Complex64::new(0.0, 0.0); n_phi];
    for k in 0..n_rings {
        let r = (k as f64 + 0.5) * g.pitch();
        for (z, t) in ring.iter_mut().zip(&trig) {
            *z = psi.sample(center + *t * r).unwrap_or_default();
        }
        fft.forward(&mut ring);
        let norm = r / (n_phi as f64 * n_phi as f64);
        for (m, z) in ring.iter().enumerate() {
            let ell = signed_bin(m, n_phi);
            let p = z.norm_sqr() * norm;
            total += p;
            if ell.abs() <= ell_max {
                acc[(ell + ell_max) as usize] += p;
            } else {
                outside += p;
            }
        }
    }
    if !(total > 0.0) {
        return Err(Error::Domain("field vanishes on the polar grid".into()));
    }
    let weights = acc.iter().map(|p| p / total).collect();
    OamSpectrum::new(ell_max, weights, outside / total)
}
