use thiserror::Error;

/// Error type shared by the geometry, tiling and packing layers.
///
/// The variants split along the boundaries callers care about: domain
/// errors are caller bugs, `NoSuchTiling`/`SphereRadius`/`BeyondCap` are
/// geometric nonexistence, and `Solver` means a numeric routine could not
/// certify a result.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NilError {
    #[error("invalid argument: {0}")]
    Domain(String),

    #[error("no regular prism tiling exists for (p, q) = ({p}, {q})")]
    NoSuchTiling { p: u32, q: u32 },

    #[error("geodesic spheres exist only for radii in [0, 2*pi]; got {radius}")]
    SphereRadius { radius: f64 },

    #[error("no geodesic of length <= 2*pi reaches the target")]
    BeyondCap,

    #[error("solver failure: {0}")]
    Solver(String),
}

impl NilError {
    pub fn domain(msg: impl Into<String>) -> Self {
        NilError::Domain(msg.into())
    }

    pub fn solver(msg: impl Into<String>) -> Self {
        NilError::Solver(msg.into())
    }
}
