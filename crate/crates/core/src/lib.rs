//! Simulation core for electron vortex beams imprinted by fields that are
//! closed but not exact: magnetic monopoles, idealized azimuthal fields and a
//! two-wire electrostatic device.
//!
//! The crate is `no_std` (it needs `alloc`). It covers physical constants and
//! beam kinematics, phase masks, discrete topology on sampled maps, Fresnel
//! propagation, off-axis holography, and OAM analysis. File formats and the
//! command-line runner live in the `evortex` crate.

#![no_std]
// `!(x > 0.0)` guards are meant to reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analysis;
pub mod beam;
pub mod constants;
pub mod error;
pub mod fft;
pub mod fields;
pub mod geometry;
pub mod grid;
pub mod holography;
pub mod phase;
pub mod topology;
pub mod wave;

pub use beam::BeamParameters;
pub use constants::{PhysicalConstants, CODATA_2018};
pub use error::{Error, Result};
pub use geometry::{Point2, Vec3};
pub use grid::{ComplexField2D, Grid2D, ScalarField2D};
pub use num_complex::Complex64;
