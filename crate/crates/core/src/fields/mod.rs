//! Field sources and the phase masks they imprint on a transmitted beam.

mod azimuthal;
mod device;
mod monopole;

pub use azimuthal::ideal_azimuthal_phase;
pub use device::{
    device_phase_mask, effective_topological_charge, segment_projected_potential, DeviceGeometry, LineChargeSegment,
    DEFAULT_RHO0,
};
pub use monopole::{monopole_b_field, monopole_phase_analytic, monopole_phase_numeric, MonopoleSpec, QuadratureSpec};
