//! Closedness and exactness diagnostics for sampled fields, and integer
//! winding numbers of phase maps.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, TAU};

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::grid::{Grid2D, ScalarField2D};
use crate::phase::wrap;
#[allow(unused_imports)] // unused whenever std is linked
use num_traits::Float;

/// Cap on loop samples when refining a winding-number loop.
pub const MAX_LOOP_SAMPLES: usize = 4096;

/// A 2D vector field (an electric 1-form, V/m) with hole pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledVectorField2D {
    grid: Grid2D,
    ex: Vec<f64>,
    ey: Vec<f64>,
    valid: Vec<bool>,
}

impl SampledVectorField2D {
    /// Pixels where `f` returns `None` or a non-finite component are holes.
    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(Point2) -> Option<(f64, f64)>) -> Self {
        let n = grid.len();
        let (mut ex, mut ey, mut valid) = (vec![0.0; n], vec![0.0; n], vec![false; n]);
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                let k = grid.index(i, j);
                if let Some((a, b)) = f(grid.point(i, j)) {
                    if a.is_finite() && b.is_finite() {
                        ex[k] = a;
                        ey[k] = b;
                        valid[k] = true;
                    }
                }
            }
        }
        Self { grid, ex, ey, valid }
    }

    pub fn from_components(grid: Grid2D, ex: Vec<f64>, ey: Vec<f64>) -> Result<Self> {
        if ex.len() != grid.len() || ey.len() != grid.len() {
            return Err(Error::Shape(format!(
                "expected {} samples per component, got {} and {}",
                grid.len(),
                ex.len(),
                ey.len()
            )));
        }
        let valid = ex.iter().zip(&ey).map(|(a, b)| a.is_finite() && b.is_finite()).collect();
        Ok(Self { grid, ex, ey, valid })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn get(&self, i: usize, j: usize) -> Option<(f64, f64)> {
        let k = self.grid.index(i, j);
        self.valid[k].then(|| (self.ex[k], self.ey[k]))
    }

    /// Bilinear interpolation; `None` outside the grid or next to a hole.
    pub fn sample(&self, p: Point2) -> Option<(f64, f64)> {
        let st = self.grid.stencil(p)?;
        let (mut a, mut b) = (0.0, 0.0);
        for (k, w) in st {
            if !self.valid[k] {
                return None;
            }
            a += w * self.ex[k];
            b += w * self.ey[k];
        }
        Some((a, b))
    }
}

/// Circular loop, traversed counter-clockwise starting at angle 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopSpec {
    pub center: Point2,
    pub radius: f64,
    pub samples: usize,
}

impl LoopSpec {
    pub fn new(center: Point2, radius: f64, samples: usize) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::Domain("loop center must be finite".into()));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Domain(format!("loop radius must be positive, got {radius}")));
        }
        if samples < 16 {
            return Err(Error::Domain(format!("a loop needs at least 16 samples, got {samples}")));
        }
        Ok(Self { center, radius, samples })
    }

    pub fn point(&self, k: usize, n: usize) -> Point2 {
        self.center + Point2::from_polar(self.radius, TAU * k as f64 / n as f64)
    }

    fn check_on(&self, grid: &Grid2D) -> Result<()> {
        if self.radius <= 2.0 * grid.pitch() {
            return Err(Error::Geometry(format!(
                "loop radius {:e} m must exceed two pixel pitches ({:e} m)",
                self.radius,
                2.0 * grid.pitch()
            )));
        }
        let c = self.center;
        let r = self.radius;
        for p in [c + Point2::new(r, r), c - Point2::new(r, r)] {
            if !grid.contains(p) {
                return Err(Error::Geometry(format!(
                    "loop of radius {r:e} m about ({:e}, {:e}) leaves the grid",
                    c.x, c.y
                )));
            }
        }
        Ok(())
    }
}

/// `∂x Ey − ∂y Ex` by central differences. Border pixels and pixels next to a
/// hole are invalid.
pub fn curl_2d(field: &SampledVectorField2D) -> Result<ScalarField2D> {
    let g = field.grid;
    if g.nx() < 3 || g.ny() < 3 {
        return Err(Error::Domain(format!("curl needs at least a 3x3 grid, got {}x{}", g.nx(), g.ny())));
    }
    let inv = 0.5 / g.pitch();
    let mut values = vec![0.0; g.len()];
    let mut valid = vec![false; g.len()];
    for j in 1..g.ny() - 1 {
        for i in 1..g.nx() - 1 {
            let (Some(_), Some((_, ey_r)), Some((_, ey_l)), Some((ex_u, _)), Some((ex_d, _))) =
                (field.get(i, j), field.get(i + 1, j), field.get(i - 1, j), field.get(i, j + 1), field.get(i, j - 1))
            else {
                continue;
            };
            let k = g.index(i, j);
            values[k] = (ey_r - ey_l) * inv - (ex_u - ex_d) * inv;
            valid[k] = true;
        }
    }
    ScalarField2D::with_validity(g, values, valid)
}

/// `∮ E·dl` around the loop by bilinear interpolation and the periodic
/// trapezoid rule, in volts.
pub fn circulation(field: &SampledVectorField2D, lp: &LoopSpec) -> Result<f64> {
    lp.check_on(&field.grid)?;
    let n = lp.samples;
    let dphi = TAU / n as f64;
    let mut acc = 0.0;
    for k in 0..n {
        let phi = dphi * k as f64;
        let p = lp.point(k, n);
        let (ex, ey) =
            field.sample(p).ok_or_else(|| Error::Geometry(format!("loop crosses a hole at ({:e}, {:e})", p.x, p.y)))?;
        acc += -ex * phi.sin() + ey * phi.cos();
    }
    Ok(acc * lp.radius * dphi)
}

/// Integer winding `(1/2π) Σ wrap(Δθ)` of a phase map around a loop.
///
/// Samples are interpolated as phasors. Loop samples that fall on invalid
/// pixels are skipped and the phase step across each such gap is taken as
/// one wrapped step; this lets a loop pass over an opaque region as long as
/// the phase on either side differs by less than π. At least half the
/// samples must be valid. If any step between neighbouring valid samples
/// exceeds π/2 the loop is resampled at twice the density, up to
/// [`MAX_LOOP_SAMPLES`].
pub fn winding_number(phase: &ScalarField2D, lp: &LoopSpec) -> Result<i64> {
    lp.check_on(phase.grid())?;
    let mut n = lp.samples;
    loop {
        match loop_accumulation(phase, lp, n)? {
            Some(total) => return Ok((total / TAU).round() as i64),
            None if n * 2 <= MAX_LOOP_SAMPLES.max(lp.samples) => n *= 2,
            None => {
                return Err(Error::Undersampled(format!(
                    "phase step exceeds pi/2 between loop samples at {n} samples; a singularity may sit on the loop (radius {:e} m)",
                    lp.radius
                )))
            }
        }
    }
}

/// Sum of wrapped steps, or `None` if a non-bridged step is too steep.
fn loop_accumulation(phase: &ScalarField2D, lp: &LoopSpec, n: usize) -> Result<Option<f64>> {
    let mut samples: Vec<Option<f64>> = Vec::with_capacity(n);
    for k in 0..n {
        let p = lp.point(k, n);
        if !phase.grid().contains(p) {
            return Err(Error::Geometry(format!("loop leaves the grid at ({:e}, {:e})", p.x, p.y)));
        }
        match phase.sample_phasor(p) {
            Some(z) if z.norm() <= 1e-12 => {
                return Err(Error::Undersampled(format!("phase is singular on the loop at ({:e}, {:e})", p.x, p.y)))
            }
            z => samples.push(z.map(|z| z.arg())),
        }
    }
    let valid = samples.iter().filter(|s| s.is_some()).count();
    if 2 * valid < n {
        return Err(Error::Geometry(format!("only {valid} of {n} loop samples fall on valid pixels")));
    }
    let first = samples.iter().position(|s| s.is_some()).unwrap_or(0);
    let mut total = 0.0;
    let mut prev = samples[first].unwrap_or(0.0);
    let mut gap = false;
    for step in 1..=n {
        match samples[(first + step) % n] {
            Some(theta) => {
                let d = wrap(theta - prev);
                if !gap && d.abs() >= FRAC_PI_2 {
                    return Ok(None);
                }
                total += d;
                prev = theta;
                gap = false;
            }
            None => gap = true,
        }
    }
    Ok(Some(total))
}

/// A phase singularity found by the plaquette scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vortex {
    pub position: Point2,
    pub charge: i64,
    /// Set when the charge exceeds 1 in magnitude (an unresolved core) or
    /// was read around a cluster of invalid pixels rather than a plaquette.
    pub flagged: bool,
}

/// Winding of every unit pixel square, plus the net winding around each
/// enclosed cluster of invalid pixels. Sorted by position (y, then x).
pub fn locate_vortices(phase: &ScalarField2D) -> Vec<Vortex> {
    let g = *phase.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let th = |i: usize, j: usize| phase.get(i, j);
    let ok = |i: usize, j: usize| phase.is_valid(i, j);
    let mut plaquette = vec![0i64; (nx - 1) * (ny - 1)];
    let mut out = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            if !(ok(i, j) && ok(i + 1, j) && ok(i + 1, j + 1) && ok(i, j + 1)) {
                continue;
            }
            let s = wrap(th(i + 1, j) - th(i, j))
                + wrap(th(i + 1, j + 1) - th(i + 1, j))
                + wrap(th(i, j + 1) - th(i + 1, j + 1))
                + wrap(th(i, j) - th(i, j + 1));
            let q = (s / TAU).round() as i64;
            plaquette[j * (nx - 1) + i] = q;
            if q != 0 {
                let c = g.point(i, j) + Point2::new(0.5, 0.5) * g.pitch();
                out.push(Vortex { position: c, charge: q, flagged: q.abs() > 1 });
            }
        }
    }
    for (imin, imax, jmin, jmax) in invalid_clusters(phase) {
        if imin == 0 || jmin == 0 || imax + 1 >= nx || jmax + 1 >= ny {
            continue;
        }
        let Some(ring) = ring_winding(phase, imin - 1, imax + 1, jmin - 1, jmax + 1) else {
            continue;
        };
        let mut inner = 0;
        for j in jmin - 1..=jmax {
            for i in imin - 1..=imax {
                inner += plaquette[j * (nx - 1) + i];
            }
        }
        let q = ring - inner;
        if q != 0 {
            let lo = g.point(imin, jmin);
            let hi = g.point(imax, jmax);
            out.push(Vortex { position: (lo + hi) * 0.5, charge: q, flagged: true });
        }
    }
    out.sort_by(|a, b| {
        a.position
            .y
            .partial_cmp(&b.position.y)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.position.x.partial_cmp(&b.position.x).unwrap_or(core::cmp::Ordering::Equal))
    });
    out
}

/// Bounding boxes of 8-connected clusters of invalid pixels.
fn invalid_clusters(phase: &ScalarField2D) -> Vec<(usize, usize, usize, usize)> {
    let g = phase.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let mut seen = vec![false; nx * ny];
    let mut boxes = Vec::new();
    let mut stack = Vec::new();
    for start in 0..nx * ny {
        if seen[start] || phase.validity()[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let (mut imin, mut imax, mut jmin, mut jmax) = (usize::MAX, 0, usize::MAX, 0);
        while let Some(k) = stack.pop() {
            let (i, j) = (k % nx, k / nx);
            imin = imin.min(i);
            imax = imax.max(i);
            jmin = jmin.min(j);
            jmax = jmax.max(j);
            for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    let (a, b) = (i as i64 + di, j as i64 + dj);
                    if a < 0 || b < 0 || a >= nx as i64 || b >= ny as i64 {
                        continue;
                    }
                    let kk = b as usize * nx + a as usize;
                    if !seen[kk] && !phase.validity()[kk] {
                        seen[kk] = true;
                        stack.push(kk);
                    }
                }
            }
        }
        boxes.push((imin, imax, jmin, jmax));
    }
    boxes
}

/// Winding along the pixel-center rectangle with the given corners,
/// counter-clockwise; `None` if any pixel on it is invalid.
fn ring_winding(phase: &ScalarField2D, i0: usize, i1: usize, j0: usize, j1: usize) -> Option<i64> {
    let mut path = Vec::new();
    path.extend((i0..i1).map(|i| (i, j0)));
    path.extend((j0..j1).map(|j| (i1, j)));
    path.extend((i0 + 1..=i1).rev().map(|i| (i, j1)));
    path.extend((j0 + 1..=j1).rev().map(|j| (i0, j)));
    if path.iter().any(|&(i, j)| !phase.is_valid(i, j)) {
        return None;
    }
    let mut s = 0.0;
    for k in 0..path.len() {
        let (a, b) = (path[k], path[(k + 1) % path.len()]);
        s += wrap(phase.get(b.0, b.1) - phase.get(a.0, a.1));
    }
    Some((s / TAU).round() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::ideal_azimuthal_phase;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn angle_form(grid: Grid2D, strength: f64, hole: Point2) -> SampledVectorField2D {
        SampledVectorField2D::from_fn(grid, |p| {
            let d = p - hole;
            let r2 = d.dot(d);
            (r2 > 0.0).then(|| (-strength * d.y / r2, strength * d.x / r2))
        })
    }

    fn square(n: usize, side: f64) -> Grid2D {
        Grid2D::new(n, n, side / (n - 1) as f64, Point2::new(-side / 2.0, -side / 2.0)).unwrap()
    }

    #[test]
    fn curl_of_uniform_and_rotation() {
        let g = square(17, 2.0);
        let uni = SampledVectorField2D::from_fn(g, |_| Some((3.0, -1.0)));
        let c = curl_2d(&uni).unwrap();
        assert!(c.values().iter().all(|v| v.abs() < 1e-12));
        assert!(!c.is_valid(0, 5) && !c.is_valid(16, 5) && c.is_valid(8, 8));
        let rot = SampledVectorField2D::from_fn(g, |p| Some((-p.y, p.x)));
        let c = curl_2d(&rot).unwrap();
        for j in 1..16 {
            for i in 1..16 {
                assert!((c.get(i, j) - 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn curl_needs_three_by_three() {
        let g = Grid2D::new(2, 5, 1.0, Point2::ORIGIN).unwrap();
        let f = SampledVectorField2D::from_fn(g, |_| Some((0.0, 0.0)));
        assert!(matches!(curl_2d(&f), Err(Error::Domain(_))));
    }

    fn max_curl_outside(n: usize, r_min: f64) -> f64 {
        let g = square(n, 2.0);
        let c = curl_2d(&angle_form(g, 1.0, Point2::ORIGIN)).unwrap();
        let mut m = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                if c.is_valid(i, j) && g.point(i, j).norm() >= r_min {
                    m = m.max(c.get(i, j).abs());
                }
            }
        }
        m
    }

    #[test]
    fn angle_form_curl_converges_at_second_order() {
        let errs: Vec<f64> = [65, 129, 257].iter().map(|&n| max_curl_outside(n, 0.5)).collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 1.9, "order {order}, errors {errs:?}");
        }
        // the origin pixel itself is a hole
        let c = curl_2d(&angle_form(square(65, 2.0), 1.0, Point2::ORIGIN)).unwrap();
        assert!(!c.is_valid(32, 32) && !c.is_valid(31, 32) && !c.is_valid(32, 33));
        assert!(c.is_valid(30, 32));
    }

    #[test]
    fn circulation_of_angle_form_is_radius_independent() {
        let g = square(257, 2.0);
        for s in [1.0, -2.5] {
            let f = angle_form(g, s, Point2::new(0.013, -0.021));
            for r in [0.2, 0.45, 0.9] {
                let lp = LoopSpec::new(Point2::new(0.013, -0.021), r, 1024).unwrap();
                let c = circulation(&f, &lp).unwrap();
                assert!((c - TAU * s).abs() < 1e-3 * TAU * s.abs(), "s={s} r={r}: {c}");
            }
        }
    }

    #[test]
    fn circulation_zero_for_exact_fields_and_contractible_loops() {
        let g = square(129, 2.0);
        let uni = SampledVectorField2D::from_fn(g, |_| Some((1.0, 2.0)));
        let lp = LoopSpec::new(Point2::new(0.1, 0.0), 0.5, 256).unwrap();
        assert!(circulation(&uni, &lp).unwrap().abs() < 1e-12);
        let f = angle_form(g, 1.0, Point2::ORIGIN);
        let off = LoopSpec::new(Point2::new(0.5, 0.4), 0.3, 512).unwrap();
        assert!(circulation(&f, &off).unwrap().abs() < 1e-3);
    }

    #[test]
    fn circulation_geometry_errors() {
        let g = square(65, 2.0);
        let f = angle_form(g, 1.0, Point2::ORIGIN);
        let out = LoopSpec::new(Point2::ORIGIN, 1.5, 64).unwrap();
        assert!(matches!(circulation(&f, &out), Err(Error::Geometry(_))));
        let tiny = LoopSpec::new(Point2::ORIGIN, 0.05, 64).unwrap();
        assert!(matches!(circulation(&f, &tiny), Err(Error::Geometry(_))));
        assert!(LoopSpec::new(Point2::ORIGIN, 0.5, 15).is_err());
        assert!(LoopSpec::new(Point2::ORIGIN, -0.5, 64).is_err());
    }

    // Closed (curl ≈ 0 away from the hole) yet not exact (nonzero circulation).
    #[test]
    fn angle_form_is_closed_but_not_exact() {
        assert!(max_curl_outside(257, 0.5) < 3e-3);
        let f = angle_form(square(129, 2.0), 1.0, Point2::ORIGIN);
        let c = circulation(&f, &LoopSpec::new(Point2::ORIGIN, 0.6, 512).unwrap()).unwrap();
        assert!(c > 6.0);
    }

    fn grid() -> Grid2D {
        Grid2D::centered(128, 128, 128e-9, Point2::ORIGIN).unwrap()
    }

    #[test]
    fn windings_of_simple_maps() {
        let g = grid();
        let lp = LoopSpec::new(Point2::new(0.3e-9, -0.2e-9), 30e-9, 64).unwrap();
        assert_eq!(winding_number(&ScalarField2D::zeros(g), &lp).unwrap(), 0);
        for ell in [1.0, 3.0, -4.0, 10.0] {
            let m = ideal_azimuthal_phase(ell, &g, Point2::ORIGIN).unwrap();
            assert_eq!(winding_number(&m, &lp).unwrap(), ell as i64);
        }
    }

    #[test]
    fn winding_resamples_steep_loops() {
        let g = Grid2D::centered(512, 512, 512e-9, Point2::ORIGIN).unwrap();
        let m = ideal_azimuthal_phase(40.0, &g, Point2::ORIGIN).unwrap();
        let lp = LoopSpec::new(Point2::new(0.5e-9, 0.5e-9), 200e-9, 16).unwrap();
        assert_eq!(winding_number(&m, &lp).unwrap(), 40);
    }

    #[test]
    fn singularity_on_loop_is_undersampled() {
        // vortex exactly at a loop sample
        let g = grid();
        let lp = LoopSpec::new(Point2::new(0.0, 0.5e-9), 20.5e-9, 64).unwrap();
        let at_sample = ideal_azimuthal_phase(1.0, &g, Point2::new(20.5e-9, 0.5e-9)).unwrap();
        assert!(matches!(winding_number(&at_sample, &lp), Err(Error::Undersampled(_))));
        // more phase than 4096 samples can follow
        let steep = ideal_azimuthal_phase(1500.0, &g, Point2::ORIGIN).unwrap();
        let around = LoopSpec::new(Point2::new(0.3e-9, 0.2e-9), 30e-9, 64).unwrap();
        assert!(matches!(winding_number(&steep, &around), Err(Error::Undersampled(_))));
    }

    #[test]
    fn winding_bridges_invalid_arcs() {
        let g = grid();
        let mut m = ideal_azimuthal_phase(3.0, &g, Point2::ORIGIN).unwrap();
        for j in 60..68 {
            for i in 64..128 {
                m.mark_invalid(i, j);
            }
        }
        let lp = LoopSpec::new(Point2::ORIGIN, 40e-9, 256).unwrap();
        assert_eq!(winding_number(&m, &lp).unwrap(), 3);
    }

    #[test]
    fn winding_loop_off_grid() {
        let lp = LoopSpec::new(Point2::ORIGIN, 70e-9, 64).unwrap();
        assert!(matches!(winding_number(&ScalarField2D::zeros(grid()), &lp), Err(Error::Geometry(_))));
    }

    #[test]
    fn plane_wave_has_no_vortices() {
        let g = grid();
        let tilt = ScalarField2D::from_fn(g, |p| Some(wrap(2e8 * p.x - 1e8 * p.y)));
        assert!(locate_vortices(&tilt).is_empty());
    }

    #[test]
    fn single_vortex_located() {
        let g = grid();
        for c in [Point2::new(3.3e-9, -7.8e-9), Point2::ORIGIN] {
            let m = ideal_azimuthal_phase(1.0, &g, c).unwrap();
            let v = locate_vortices(&m);
            assert_eq!(v.len(), 1, "{c:?}: {v:?}");
            assert_eq!(v[0].charge, 1);
            assert!(v[0].position.distance(c) <= g.pitch());
        }
    }

    #[test]
    fn dipole_pair_located_and_consistent() {
        let g = grid();
        let (c1, c2) = (Point2::new(-20.3e-9, 1.1e-9), Point2::new(19.6e-9, -2.4e-9));
        let m = ideal_azimuthal_phase(1.0, &g, c1)
            .unwrap()
            .add(&ideal_azimuthal_phase(-1.0, &g, c2).unwrap())
            .unwrap()
            .wrapped();
        let v = locate_vortices(&m);
        assert_eq!(v.len(), 2);
        assert_eq!(v.iter().map(|x| x.charge).sum::<i64>(), 0);
        let plus = v.iter().find(|x| x.charge == 1).unwrap();
        assert!(plus.position.distance(c1) <= g.pitch());
        let enclosing = LoopSpec::new(Point2::ORIGIN, 50e-9, 256).unwrap();
        assert_eq!(winding_number(&m, &enclosing).unwrap(), 0);
        let around_one = LoopSpec::new(c1, 10e-9, 128).unwrap();
        assert_eq!(winding_number(&m, &around_one).unwrap(), 1);
    }

    #[test]
    fn invalid_core_cluster_reports_charge() {
        let g = grid();
        let mut m = ideal_azimuthal_phase(4.0, &g, Point2::new(0.5e-9, 0.5e-9)).unwrap();
        for j in 62..67 {
            for i in 62..67 {
                m.mark_invalid(i, j);
            }
        }
        let v = locate_vortices(&m);
        assert_eq!(v.iter().map(|x| x.charge).sum::<i64>(), 4);
        assert!(v.iter().all(|x| x.position.norm() < 5e-9));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn additivity_and_consistency(
            l1 in -5i64..=5, l2 in -5i64..=5,
            x1 in -25.0f64..-5.0, y1 in -20.0f64..20.0,
            x2 in 5.0f64..25.0, y2 in -20.0f64..20.0,
        ) {
            let g = grid();
            let (c1, c2) = (Point2::new(x1 * 1e-9, y1 * 1e-9), Point2::new(x2 * 1e-9, y2 * 1e-9));
            let a = ideal_azimuthal_phase(l1 as f64, &g, c1).unwrap();
            let b = ideal_azimuthal_phase(l2 as f64, &g, c2).unwrap();
            let sum = a.add(&b).unwrap().wrapped();
            let lp = LoopSpec::new(Point2::ORIGIN, 55e-9, 1024).unwrap();
            let w = winding_number(&sum, &lp).unwrap();
            prop_assert_eq!(w, winding_number(&a, &lp).unwrap() + winding_number(&b, &lp).unwrap());
            prop_assert_eq!(w, l1 + l2);
            let inside: i64 = locate_vortices(&sum)
                .iter()
                .filter(|v| v.position.norm() < 55e-9)
                .map(|v| v.charge)
                .sum();
            prop_assert_eq!(inside, w);
        }

        #[test]
        fn smooth_maps_have_zero_winding(a in -3.0f64..3.0, b in -3.0f64..3.0, k in 1.0f64..5.0) {
            let g = grid();
            let m = ScalarField2D::from_fn(g, |p| {
                let (u, v) = (p.x * 2e7 * k, p.y * 2e7);
                Some(wrap(a * u.sin() + b * (u * v).cos() + PI * v))
            });
            let lp = LoopSpec::new(Point2::ORIGIN, 40e-9, 256).unwrap();
            prop_assert_eq!(winding_number(&m, &lp).unwrap(), 0);
            prop_assert_eq!(locate_vortices(&m).len(), 0);
        }
    }
}
