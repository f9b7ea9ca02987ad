//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be an odd positive integer, got {0}")]
    InvalidDim(i64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state is not normalizable: norm deviates from 1 by {0:.3e}")]
    NotNormalizable(f64),
    #[error("state is not a fiducial: max overlap deviation {max_dev:.3e} exceeds tolerance {tol:.3e}")]
    NotFiducial { max_dev: f64, tol: f64 },
    #[error("phase field violates the antisymmetry constraint at {point:?}")]
    InconsistentPhases { point: (i64, i64) },
    #[error("theta series requires Im(tau) > 0")]
    NonConvergent,
    #[error("grid resolution {got} is below the minimum {min} for d = {d}")]
    ResolutionTooLow { got: usize, min: usize, d: usize },
    #[error("zero finder isolated {found} zeros, expected {expected}")]
    ZeroCountMismatch { found: usize, expected: usize },
    #[error("constellation violates the centroid constraint: residual {0:.3e}")]
    CentroidViolation(f64),
    #[error("stellar sampling matrix is numerically singular")]
    SingularSampling,
    #[error("projection onto Zauner sector k = {k} annihilated the state")]
    ZeroProjection { k: u8 },
    #[error("eigenvector label is ambiguous: {what} is {dist:.3e} from its snap target")]
    LabelAmbiguous { what: &'static str, dist: f64 },
    #[error("point set is not an orbit of the Zauner map")]
    NotAnOrbit,
    #[error("unsupported export format {format} for {kind} grids")]
    UnsupportedFormat {
        format: &'static str,
        kind: &'static str,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
