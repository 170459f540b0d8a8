use thiserror::Error;

/// Errors raised by the spectral pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point ({0}, {1}) lies outside the parameter domain")]
    OutsideDomain(f64, f64),

    #[error("grid too small: n = {n}, need at least {min}")]
    GridTooSmall { n: usize, min: usize },

    #[error("matrix is not symmetric (relative asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive definite (pivot {pivot} = {value:.3e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("QL iteration did not converge for eigenvalue {0}")]
    NoConvergence(usize),

    #[error("{0} is only defined on the catenoid")]
    CatenoidOnly(&'static str),

    #[error("mode {0} is too large for the floating range of the harmonic profiles")]
    ModeOverflow(u32),

    #[error("boundary Gram matrix is degenerate on mode {0}")]
    DegenerateBoundaryGram(u32),

    #[error("interior Gram matrix is ill-conditioned on mode {mode} (condition {condition:.3e})")]
    GramConditioning { mode: u32, condition: f64 },

    #[error("eigenvalue {value:.3e} lies within the guard band {guard:.1e} of {threshold}")]
    GuardBand { value: f64, threshold: f64, guard: f64 },

    #[error("first eigenfunction changes sign")]
    GroundStateSign,

    #[error("mode tail is not certified: {0}")]
    TailNotCertified(String),

    #[error("Richardson extrapolation needs at least {0} grids")]
    TooFewGrids(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
