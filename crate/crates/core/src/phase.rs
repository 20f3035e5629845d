//! Phase wrapping conventions shared by every module.

use core::f64::consts::{PI, TAU};
#[allow(unused_imports)] // unused whenever std is linked
use num_traits::Float;

/// Wraps an angle into (−π, π]. An exact tie at ±π resolves to +π.
#[inline]
pub fn wrap(x: f64) -> f64 {
    let r = x - TAU * (x / TAU).round();
    if r <= -PI {
        r + TAU
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ties_go_to_plus_pi() {
        assert_eq!(wrap(PI), PI);
        assert_eq!(wrap(-PI), PI);
        assert_eq!(wrap(3.0 * PI), PI);
        assert_eq!(wrap(0.0), 0.0);
    }

    proptest! {
        #[test]
        fn wrapped_range_and_congruence(x in -1e3f64..1e3) {
            let w = wrap(x);
            prop_assert!(w > -PI && w <= PI);
            let k = (x - w) / TAU;
            prop_assert!((k - k.round()).abs() < 1e-9);
        }
    }
}
