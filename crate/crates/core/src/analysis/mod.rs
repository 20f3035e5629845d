//! OAM spectra, vortex-core metrology and device calibration.

mod calibration;
mod metrology;
mod spectrum;

pub use calibration::{calibrate, CalibrationResult, STANDARD_TIP_LOOP_RADIUS};
pub use metrology::{core_radius, radial_profile, spectrum_center, RadialProfile};
pub use spectrum::{mean_oam, oam_spectrum, OamSpectrum};
