use alloc::string::String;

/// Failure modes of the simulation core.
///
/// Every variant carries enough context to tell the caller which
/// precondition was violated; the CLI surfaces these verbatim.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Evaluation at a field singularity (monopole position, on a line charge).
    #[error("singularity: {0}")]
    Singularity(String),
    /// Device or parameter set is internally inconsistent.
    #[error("configuration error: {0}")]
    Configuration(String),
    /// A loop or evaluation path leaves the valid region.
    #[error("geometry error: {0}")]
    Geometry(String),
    /// Sampling requirement (waist, Nyquist) not met by the grid.
    #[error("sampling error: {0}")]
    Sampling(String),
    /// Two fields that must share a grid do not.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// The Fresnel transfer function would alias on this grid.
    #[error(
        "aliasing: propagation distance {distance:e} m exceeds the admissible |z| <= {max_distance:e} m for this grid"
    )]
    Aliasing { distance: f64, max_distance: f64 },
    /// The hologram sideband could not be located near the nominal carrier.
    #[error("carrier detection failed: {0}")]
    CarrierDetection(String),
    /// Phase changes too quickly along a loop even at the sample cap.
    #[error("undersampled loop: {0}")]
    Undersampled(String),
    /// Requested angular resolution exceeds what the grid supports.
    #[error("resolution error: {0}")]
    Resolution(String),
    /// Intensity profile shows no dark core.
    #[error("no vortex core: {0}")]
    NoCore(String),
    /// The device control parameter cannot be calibrated.
    #[error("calibration error: {0}")]
    Calibration(String),
}

pub type Result<T> = core::result::Result<T, Error>;
