//! Error type shared by all numerical operations.

use thiserror::Error;

/// Errors raised by kernel evaluation, quadrature, and the radial solver.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension out of range: n = {n} (need n >= 2)")]
    DimensionOutOfRange { n: u32 },

    #[error("no exact kernel in even dimension n = {n}; only the Davies envelope is available")]
    EvenDimensionUnsupported { n: u32 },

    #[error("nonpositive time t = {t}")]
    NonpositiveTime { t: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: panel [{a}, {b}] still above tolerance {tol:e} at depth {depth}")]
    QuadratureNonconvergence { a: f64, b: f64, tol: f64, depth: u32 },

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("instability detected at t = {t}: {what}")]
    InstabilityDetected { t: f64, what: String },

    #[error("solution front reached the truncation boundary at t = {t} (r_max = {r_max})")]
    HorizonViolation { t: f64, r_max: f64 },

    #[error("mass deficit: total mass {total} below 0.9")]
    MassDeficit { total: f64 },

    #[error("comparison region r <= {r_limit} contains too few grid nodes")]
    EmptyRegion { r_limit: f64 },

    #[error("xi = {xi} lies below the coordinate cone boundary xi0 = {xi0}")]
    OutOfCone { xi: f64, xi0: f64 },

    #[error("initial data is not integrable: {0}")]
    NonintegrableData(String),

    #[error("no calibrated envelope for dimension n = {n}")]
    NoCalibratedEnvelope { n: u32 },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("profile i/o: {0}")]
    ProfileIo(String),
}

pub type Result<T> = std::result::Result<T, Error>;
