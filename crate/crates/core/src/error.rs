use thiserror::Error;

/// Errors produced by fitting, evaluation and geometry queries.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("kernel {kernel} is not differentiable to order {order} at this displacement")]
    NonDifferentiableKernel { kernel: String, order: usize },

    #[error("points {first} and {second} coincide")]
    DuplicatePoints { first: usize, second: usize },

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("non-finite coordinate at point {index}")]
    NonFinite { index: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("length mismatch: expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("system is ill-conditioned: Cholesky failed after {attempts} attempts")]
    IllConditioned { attempts: usize },

    #[error("gradient norm {grad_norm:e} is below the threshold {tau:e}")]
    DegenerateGradient { grad_norm: f64, tau: f64 },

    #[error("degenerate gradient at evaluation point {index}: |grad u| = {grad_norm:e}")]
    DegenerateAt { index: usize, grad_norm: f64 },

    #[error("reference direction is zero")]
    ZeroReference,

    #[error("point is off the surface (residual {residual:e})")]
    OffSurfacePoint { residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed model file: {0}")]
    MalformedModelFile(String),

    #[error("malformed descriptor `{input}`: {reason}")]
    MalformedDescriptor { input: String, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
