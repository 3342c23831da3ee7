//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by construction, discretization and spectral routines.
///
/// The variants split into two families: caller errors (bad arguments,
/// mismatched dimensions, under-resolved grids) and numerical failures
/// (non-convergence, spectral thresholds too close to an eigenvalue).
/// [`KhlError::is_numerical`] distinguishes them.
#[derive(Debug, Clone, Error)]
pub enum KhlError {
    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Vector or matrix dimensions do not match.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A probe or test vector is identically zero.
    #[error("zero vector not allowed here")]
    ZeroVector,

    /// A grid is too coarse (or a test function too wide) for the
    /// oscillation scale of the requested computation.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// The Jacobi sweep limit was exhausted before the off-diagonal mass
    /// dropped below tolerance.
    #[error("eigensolver did not converge: off-diagonal mass {off_mass:.3e} after {sweeps} sweeps")]
    NoConvergence { off_mass: f64, sweeps: usize },

    /// A spectral threshold lies closer to an eigenvalue than the guard
    /// distance; the projection is ill-conditioned at this truncation.
    #[error(
        "threshold {mu} is {distance:.3e} from the nearest eigenvalue, closer than guard {guard:.3e}"
    )]
    ThresholdTooClose { mu: f64, distance: f64, guard: f64 },
}

impl KhlError {
    /// True for failures of the numerics themselves, as opposed to
    /// invalid requests. Callers use this to pick exit codes.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            KhlError::NoConvergence { .. } | KhlError::ThresholdTooClose { .. }
        )
    }
}
