//! Uniformly sampled transverse grids and the fields that live on them.
//!
//! Storage is row-major: pixel `(i, j)` (column `i` along x, row `j` along y)
//! lives at index `j * nx + i` and sits at `origin + (i, j) * pitch`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::phase::wrap;
#[allow(unused_imports)] // unused whenever std is linked
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    pitch: f64,
    origin: Point2,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, pitch: f64, origin: Point2) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::Domain(format!("grid must be at least 2x2, got {nx}x{ny}")));
        }
        if !(pitch > 0.0) || !pitch.is_finite() {
            return Err(Error::Domain(format!("pixel pitch must be positive, got {pitch}")));
        }
        if !origin.is_finite() {
            return Err(Error::Domain("grid origin must be finite".into()));
        }
        Ok(Self { nx, ny, pitch, origin })
    }

    /// Grid of `nx` x `ny` pixels spanning `fov_x` along x, with pixel
    /// `(nx/2, ny/2)` at `center`.
    pub fn centered(nx: usize, ny: usize, fov_x: f64, center: Point2) -> Result<Self> {
        let pitch = fov_x / nx as f64;
        let origin = Point2::new(center.x - (nx / 2) as f64 * pitch, center.y - (ny / 2) as f64 * pitch);
        Self::new(nx, ny, pitch, origin)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn origin(&self) -> Point2 {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn fov_x(&self) -> f64 {
        self.nx as f64 * self.pitch
    }

    pub fn fov_y(&self) -> f64 {
        self.ny as f64 * self.pitch
    }

    /// The smaller of the two field-of-view extents.
    pub fn fov(&self) -> f64 {
        self.fov_x().min(self.fov_y())
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.origin.x + i as f64 * self.pitch
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.origin.y + j as f64 * self.pitch
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize) -> Point2 {
        Point2::new(self.x(i), self.y(j))
    }

    /// Physical center of the sampled region.
    pub fn center(&self) -> Point2 {
        Point2::new(
            self.origin.x + 0.5 * (self.nx - 1) as f64 * self.pitch,
            self.origin.y + 0.5 * (self.ny - 1) as f64 * self.pitch,
        )
    }

    /// Continuous pixel coordinates of a physical point.
    #[inline]
    pub fn to_pixel(&self, p: Point2) -> (f64, f64) {
        ((p.x - self.origin.x) / self.pitch, (p.y - self.origin.y) / self.pitch)
    }

    /// Whether `p` lies inside the hull of pixel centers (where bilinear
    /// interpolation is defined).
    pub fn contains(&self, p: Point2) -> bool {
        let (u, v) = self.to_pixel(p);
        u >= 0.0 && v >= 0.0 && u <= (self.nx - 1) as f64 && v <= (self.ny - 1) as f64
    }

    /// Pixel whose center coincides with `p` to within 1e-9 pitch, if any.
    pub fn exact_sample(&self, p: Point2) -> Option<(usize, usize)> {
        let (u, v) = self.to_pixel(p);
        let (ru, rv) = (u.round(), v.round());
        if (u - ru).abs() < 1e-9 && (v - rv).abs() < 1e-9 && ru >= 0.0 && rv >= 0.0 {
            let (i, j) = (ru as usize, rv as usize);
            if i < self.nx && j < self.ny {
                return Some((i, j));
            }
        }
        None
    }

    /// Bilinear stencil: the four neighbouring pixel indices and their weights.
    pub(crate) fn stencil(&self, p: Point2) -> Option<[(usize, f64); 4]> {
        if !self.contains(p) {
            return None;
        }
        let (u, v) = self.to_pixel(p);
        let i0 = (u.floor() as usize).min(self.nx - 2);
        let j0 = (v.floor() as usize).min(self.ny - 2);
        let fx = u - i0 as f64;
        let fy = v - j0 as f64;
        Some([
            (self.index(i0, j0), (1.0 - fx) * (1.0 - fy)),
            (self.index(i0 + 1, j0), fx * (1.0 - fy)),
            (self.index(i0, j0 + 1), (1.0 - fx) * fy),
            (self.index(i0 + 1, j0 + 1), fx * fy),
        ])
    }

    pub fn same_as(&self, other: &Grid2D) -> bool {
        self == other
    }

    pub(crate) fn check_same(&self, other: &Grid2D) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "grids differ: {}x{} @ {:e} m vs {}x{} @ {:e} m",
                self.nx, self.ny, self.pitch, other.nx, other.ny, other.pitch
            )))
        }
    }
}

/// Real-valued field with per-pixel validity flags.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField2D {
    grid: Grid2D,
    values: Vec<f64>,
    valid: Vec<bool>,
}

impl ScalarField2D {
    pub fn zeros(grid: Grid2D) -> Self {
        Self { grid, values: vec![0.0; grid.len()], valid: vec![true; grid.len()] }
    }

    pub fn from_values(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        let valid = vec![true; grid.len()];
        Self::with_validity(grid, values, valid)
    }

    /// Builds a field; non-finite values are forced invalid.
    pub fn with_validity(grid: Grid2D, values: Vec<f64>, mut valid: Vec<bool>) -> Result<Self> {
        if values.len() != grid.len() || valid.len() != grid.len() {
            return Err(Error::Shape(format!(
                "expected {} samples, got {} values and {} flags",
                grid.len(),
                values.len(),
                valid.len()
            )));
        }
        let mut values = values;
        for (v, ok) in values.iter_mut().zip(valid.iter_mut()) {
            if !v.is_finite() {
                *ok = false;
                *v = 0.0;
            }
        }
        Ok(Self { grid, values, valid })
    }

    /// Evaluates `f` at every pixel center; `None` marks the pixel invalid.
    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(Point2) -> Option<f64>) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        let mut valid = Vec::with_capacity(grid.len());
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                match f(grid.point(i, j)) {
                    Some(v) if v.is_finite() => {
                        values.push(v);
                        valid.push(true);
                    }
                    _ => {
                        values.push(0.0);
                        valid.push(false);
                    }
                }
            }
        }
        Self { grid, values, valid }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn validity(&self) -> &[bool] {
        &self.valid
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    #[inline]
    pub fn is_valid(&self, i: usize, j: usize) -> bool {
        self.valid[self.grid.index(i, j)]
    }

    pub fn invalid_count(&self) -> usize {
        self.valid.iter().filter(|v| !**v).count()
    }

    pub fn mark_invalid(&mut self, i: usize, j: usize) {
        let k = self.grid.index(i, j);
        self.valid[k] = false;
        self.values[k] = 0.0;
    }

    /// Values wrapped into (−π, π]; validity preserved.
    pub fn wrapped(&self) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| wrap(v)).collect(), valid: self.valid.clone() }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect(), valid: self.valid.clone() }
    }

    /// Pixelwise sum; invalid wherever either operand is.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        let valid = self.valid.iter().zip(&other.valid).map(|(a, b)| *a && *b).collect();
        Self::with_validity(self.grid, values, valid)
    }

    /// Bilinear interpolation; `None` outside the grid or next to an invalid pixel.
    pub fn sample(&self, p: Point2) -> Option<f64> {
        let st = self.grid.stencil(p)?;
        let mut acc = 0.0;
        for (k, w) in st {
            if !self.valid[k] {
                return None;
            }
            acc += w * self.values[k];
        }
        Some(acc)
    }

    /// Bilinear interpolation of `exp(iθ)`, the phase-safe way to resample a
    /// wrapped phase map.
    pub fn sample_phasor(&self, p: Point2) -> Option<Complex64> {
        let st = self.grid.stencil(p)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, w) in st {
            if !self.valid[k] {
                return None;
            }
            acc += Complex64::cis(self.values[k]) * w;
        }
        Some(acc)
    }

    /// Sum of valid values times pixel area.
    pub fn integral(&self) -> f64 {
        let a = self.grid.pitch * self.grid.pitch;
        self.values.iter().zip(&self.valid).filter(|(_, ok)| **ok).map(|(v, _)| v * a).sum()
    }

    /// Largest valid value (`-inf` if none).
    pub fn max(&self) -> f64 {
        self.values.iter().zip(&self.valid).filter(|(_, ok)| **ok).fold(f64::NEG_INFINITY, |m, (v, _)| m.max(*v))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().zip(&self.valid).filter(|(_, ok)| **ok).fold(f64::INFINITY, |m, (v, _)| m.min(*v))
    }
}

/// Complex transverse wavefunction.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField2D {
    grid: Grid2D,
    data: Vec<Complex64>,
}

impl ComplexField2D {
    pub fn zeros(grid: Grid2D) -> Self {
        Self { grid, data: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_data(grid: Grid2D, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::Shape(format!("expected {} samples, got {}", grid.len(), data.len())));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("complex field contains non-finite samples".into()));
        }
        Ok(Self { grid, data })
    }

    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(Point2) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                data.push(f(grid.point(i, j)));
            }
        }
        Self { grid, data }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[self.grid.index(i, j)]
    }

    /// Σ|ψ|² · pitch².
    pub fn norm_squared(&self) -> f64 {
        let a = self.grid.pitch * self.grid.pitch;
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() * a
    }

    /// Rescales so that Σ|ψ|² · pitch² = 1.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_squared();
        if !(n > 0.0) {
            return Err(Error::Domain("cannot normalize a zero field".into()));
        }
        let s = 1.0 / n.sqrt();
        for z in &mut self.data {
            *z *= s;
        }
        Ok(())
    }

    pub fn conj(&self) -> Self {
        Self { grid: self.grid, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { grid: self.grid, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn sample(&self, p: Point2) -> Option<Complex64> {
        let st = self.grid.stencil(p)?;
        Some(st.iter().fold(Complex64::new(0.0, 0.0), |acc, &(k, w)| acc + self.data[k] * w))
    }

    /// Root-mean-square pixelwise difference.
    pub fn rms_difference(&self, other: &Self) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        let s: f64 = self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok((s / self.data.len() as f64).sqrt())
    }
}
