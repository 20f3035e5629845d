use alloc::format;

use crate::beam::BeamParameters;
use crate::error::{Error, Result};
use crate::fields::{effective_topological_charge, DeviceGeometry};

/// Tip-loop radius used for calibration and winding readout unless
/// configured otherwise, m.
pub const STANDARD_TIP_LOOP_RADIUS: f64 = 450e-9;

/// Line charge density probed when the template carries none, C/m.
const DEFAULT_PROBE: f64 = 1e-10;
const MAX_REFINEMENTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationResult {
    /// Line charge density λ on the positive wire, C/m.
    pub control_value: f64,
    /// ℓ_eff of the calibrated device.
    pub achieved_ell: f64,
    /// Re-evaluations after the initial probe.
    pub iterations: usize,
    /// `|achieved_ell − target|`.
    pub residual: f64,
}

impl CalibrationResult {
    /// Wire voltage for a capacitance factor `kappa` in C/m per volt.
    pub fn voltage(&self, kappa: f64) -> Result<f64> {
        if !(kappa != 0.0) || !kappa.is_finite() {
            return Err(Error::Domain(format!("kappa must be finite and nonzero, got {kappa}")));
        }
        Ok(self.control_value / kappa)
    }
}

/// Line charge density that gives the device an effective charge of
/// `target_ell` on the tip loop of radius `loop_radius`.
///
/// ℓ_eff is exactly linear in λ, so one probe fixes the slope. The result is
/// re-evaluated and, should rounding leave it outside `tolerance`, refined
/// by further secant steps.
pub fn calibrate(
    template: &DeviceGeometry,
    beam: &BeamParameters,
    target_ell: i64,
    tolerance: f64,
    loop_radius: f64,
) -> Result<CalibrationResult> {
    if target_ell.abs() > 100 {
        return Err(Error::Domain(format!("target charge must satisfy |ell| <= 100, got {target_ell}")));
    }
    if !(tolerance > 1e-9 && tolerance < 0.1) {
        return Err(Error::Domain(format!("tolerance must lie in (1e-9, 0.1), got {tolerance}")));
    }
    let probe = if template.density() != 0.0 { template.density() } else { DEFAULT_PROBE };
    let ell_probe = effective_topological_charge(&template.with_density(probe), beam, loop_radius)?;
    let slope = ell_probe / probe;
    if !(slope.abs() > 0.0) || !slope.is_finite() || ell_probe.abs() < 1e-12 {
        return Err(Error::Calibration(format!(
            "effective charge does not respond to line charge (slope {slope:e} per C/m)"
        )));
    }
    let target = target_ell as f64;
    let mut lambda = target / slope;
    let mut iterations = 0;
    loop {
        let achieved = effective_topological_charge(&template.with_density(lambda), beam, loop_radius)?;
        iterations += 1;
        let residual = (achieved - target).abs();
        if residual <= tolerance {
            return Ok(CalibrationResult { control_value: lambda, achieved_ell: achieved, iterations, residual });
        }
        if iterations > MAX_REFINEMENTS {
            return Err(Error::Calibration(format!(
                "residual {residual:e} still above tolerance {tolerance:e} after {iterations} evaluations"
            )));
        }
        lambda -= (achieved - target) / slope;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::device_phase_mask;
    use crate::geometry::Point2;
    use crate::grid::Grid2D;
    use crate::topology::{winding_number, LoopSpec};
    use core::f64::consts::PI;

    fn beam() -> BeamParameters {
        BeamParameters::new(300e3).unwrap()
    }

    fn template() -> DeviceGeometry {
        DeviceGeometry::two_wire(Point2::ORIGIN, PI, 15e-6, 200e-9, 200e-9, 0.0).unwrap()
    }

    #[test]
    fn zero_target_gives_zero_density() {
        let r = calibrate(&template(), &beam(), 0, 1e-6, STANDARD_TIP_LOOP_RADIUS).unwrap();
        assert_eq!(r.control_value, 0.0);
        assert_eq!(r.achieved_ell, 0.0);
    }

    #[test]
    fn odd_symmetry() {
        for ell in [1, 7, 30] {
            let p = calibrate(&template(), &beam(), ell, 1e-6, STANDARD_TIP_LOOP_RADIUS).unwrap();
            let m = calibrate(&template(), &beam(), -ell, 1e-6, STANDARD_TIP_LOOP_RADIUS).unwrap();
            assert!((p.control_value + m.control_value).abs() <= 1e-15 * p.control_value.abs());
            assert!(p.residual < 1e-6 && m.residual < 1e-6);
        }
    }

    #[test]
    fn calibrated_masks_wind_to_target() {
        let g = Grid2D::centered(512, 512, 1.5e-6, Point2::new(-0.3e-9, 0.4e-9)).unwrap();
        for ell in [1, 5, 30, -7] {
            let cal = calibrate(&template(), &beam(), ell, 1e-6, STANDARD_TIP_LOOP_RADIUS).unwrap();
            let dev = template().with_density(cal.control_value);
            let mask = device_phase_mask(&dev, &beam(), &g).unwrap().wrapped();
            let lp = LoopSpec::new(dev.tip_midpoint(), STANDARD_TIP_LOOP_RADIUS, 1024).unwrap();
            assert_eq!(winding_number(&mask, &lp).unwrap(), ell);
        }
    }

    #[test]
    fn effective_charge_is_linear_in_density() {
        let b = beam();
        let xs = [-3e-10, -1e-10, 0.5e-10, 2e-10, 7e-10];
        let ys: alloc::vec::Vec<f64> = xs
            .iter()
            .map(|x| effective_topological_charge(&template().with_density(*x), &b, STANDARD_TIP_LOOP_RADIUS).unwrap())
            .collect();
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
        let r2 = sxy * sxy / (sxx * syy);
        assert!(r2 > 1.0 - 1e-10, "R² = {r2}");
    }

    #[test]
    fn argument_checks() {
        let b = beam();
        assert!(matches!(calibrate(&template(), &b, 101, 1e-6, 450e-9), Err(Error::Domain(_))));
        assert!(matches!(calibrate(&template(), &b, 1, 1e-10, 450e-9), Err(Error::Domain(_))));
        assert!(matches!(calibrate(&template(), &b, 1, 0.2, 450e-9), Err(Error::Domain(_))));
        assert!(matches!(calibrate(&template(), &b, 1, 1e-6, 100e-9), Err(Error::Geometry(_))));
    }

    #[test]
    fn voltage_conversion() {
        let r = CalibrationResult { control_value: 2e-10, achieved_ell: 1.0, iterations: 1, residual: 0.0 };
        assert!((r.voltage(1e-11).unwrap() - 20.0).abs() < 1e-12);
        assert!(r.voltage(0.0).is_err());
    }
}
