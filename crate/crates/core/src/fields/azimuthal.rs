use alloc::format;

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::grid::{Grid2D, ScalarField2D};
use crate::phase::wrap;

/// Wrapped helical phase `ell * φ` about `center`.
///
/// This is the mask an ideal azimuthal field (constant `E_φ` at every radius)
/// would imprint. A pixel sitting exactly on `center` has no defined azimuth
/// and is flagged invalid.
pub fn ideal_azimuthal_phase(ell: f64, grid: &Grid2D, center: Point2) -> Result<ScalarField2D> {
    if !ell.is_finite() {
        return Err(Error::Domain(format!("topological charge must be finite, got {ell}")));
    }
    Ok(helical(ell, grid, center))
}

pub(crate) fn helical(ell: f64, grid: &Grid2D, center: Point2) -> ScalarField2D {
    let mut field = ScalarField2D::from_fn(*grid, |p| Some(wrap(ell * (p - center).angle())));
    if let Some((i, j)) = grid.exact_sample(center) {
        field.mark_invalid(i, j);
    }
    field
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{winding_number, LoopSpec};

    fn grid() -> Grid2D {
        Grid2D::centered(128, 128, 128e-9, Point2::ORIGIN).unwrap()
    }

    #[test]
    fn zero_charge_is_flat() {
        let g = grid();
        let f = ideal_azimuthal_phase(0.0, &g, Point2::new(0.3e-9, 0.2e-9)).unwrap();
        assert!(f.values().iter().all(|v| *v == 0.0));
        assert_eq!(f.invalid_count(), 0);
    }

    #[test]
    fn center_pixel_flagged() {
        let g = grid();
        let f = ideal_azimuthal_phase(2.0, &g, Point2::ORIGIN).unwrap();
        assert_eq!(f.invalid_count(), 1);
        assert!(!f.is_valid(64, 64));
    }

    #[test]
    fn high_charge_winding() {
        let g = grid();
        let f = ideal_azimuthal_phase(-30.0, &g, Point2::ORIGIN).unwrap();
        let lp = LoopSpec::new(Point2::ORIGIN, 40e-9, 256).unwrap();
        assert_eq!(winding_number(&f, &lp).unwrap(), -30);
    }

    #[test]
    fn rejects_non_finite_charge() {
        assert!(ideal_azimuthal_phase(f64::NAN, &grid(), Point2::ORIGIN).is_err());
    }
}
