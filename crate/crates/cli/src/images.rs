//! 16-bit binary PGM (P5) previews. Rows are written top to bottom, so the
//! first row is the largest y. Scaling is recorded in a header comment and
//! returned for the manifest.

use std::f64::consts::PI;

use evortex_core::ScalarField2D;
use serde::Serialize;

pub const MAXVAL: u16 = 65535;

/// Linear map applied to produce the gray levels: value `min` is 0 and
/// `max` is 65535.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scaling {
    pub min: f64,
    pub max: f64,
}

fn pgm(nx: usize, ny: usize, comment: &str, levels: impl Iterator<Item = u16>) -> Vec<u8> {
    let mut out = format!("P5\n# {comment}\n{nx} {ny}\n{MAXVAL}\n").into_bytes();
    out.reserve(2 * nx * ny);
    for v in levels {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out
}

fn level(v: f64, s: Scaling) -> u16 {
    let span = s.max - s.min;
    if !(span > 0.0) {
        return 0;
    }
    let t = ((v - s.min) / span).clamp(0.0, 1.0);
    (t * MAXVAL as f64).round() as u16
}

/// Pixel order for a top-down image: rows from `ny − 1` to 0.
fn flipped(f: &ScalarField2D) -> impl Iterator<Item = (usize, usize)> + '_ {
    let (nx, ny) = (f.grid().nx(), f.grid().ny());
    (0..ny).rev().flat_map(move |j| (0..nx).map(move |i| (i, j)))
}

/// Min/max scaled image of the valid pixels; invalid pixels are black.
pub fn encode_scaled(f: &ScalarField2D) -> (Vec<u8>, Scaling) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (v, ok) in f.values().iter().zip(f.validity()) {
        if *ok {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
    }
    if !lo.is_finite() {
        lo = 0.0;
        hi = 0.0;
    }
    let s = Scaling { min: lo, max: hi };
    let levels = flipped(f).map(|(i, j)| if f.is_valid(i, j) { level(f.get(i, j), s) } else { 0 });
    let bytes = pgm(f.grid().nx(), f.grid().ny(), &format!("scale min={lo:e} max={hi:e}"), levels);
    (bytes, s)
}

/// Phase image mapping (−π, π] linearly onto the gray range. Invalid pixels
/// are 0 here and in the 8-bit validity mask returned alongside.
pub fn encode_phase(f: &ScalarField2D) -> (Vec<u8>, Vec<u8>) {
    let s = Scaling { min: -PI, max: PI };
    let w = f.wrapped();
    let levels = flipped(&w).map(|(i, j)| if w.is_valid(i, j) { level(w.get(i, j), s).max(1) } else { 0 });
    let (nx, ny) = (f.grid().nx(), f.grid().ny());
    let img = pgm(nx, ny, "phase min=-pi max=pi, 0 marks invalid pixels", levels);
    let mut mask = format!("P5\n# validity\n{nx} {ny}\n255\n").into_bytes();
    mask.extend(flipped(&w).map(|(i, j)| if w.is_valid(i, j) { 255u8 } else { 0 }));
    (img, mask)
}
