use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ambient dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("degree {degree} exceeds ambient dimension {n}")]
    DegreeOverflow { degree: usize, n: usize },

    #[error("invalid multi-index {index:?} for ambient dimension {n}")]
    InvalidIndex { index: Vec<usize>, n: usize },

    #[error("interior product of a degree-0 form")]
    DegreeZeroContraction,

    #[error("matrix is not skew-symmetric")]
    NotSkew,

    #[error("matrix is not orthogonal")]
    NotOrthogonal,

    #[error("plane basis is not orthonormal")]
    NotOrthonormal,

    #[error("plane is not calibrated: lambda(W) = {0}")]
    NotCalibrated(String),

    #[error("subspace is not contained in the ambient algebra")]
    NotSubspace,

    #[error("shape error: {0}")]
    Shape(String),

    #[error("invalid package parameters: {0}")]
    InvalidPackage(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("not an immersion at u = {point:?}: smallest singular value {sigma:e}")]
    NotImmersion { point: Vec<f64>, sigma: f64 },

    #[error("frame flip between parameter points {from:?} and {to:?}")]
    FrameFlip { from: Vec<f64>, to: Vec<f64> },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
