//! Kernel interpolation and regression on point clouds.
//!
//! The kernel fit of the constant 1 on a sample of a hypersurface (the
//! signature function) serves as an implicit description of the surface.
//! Its gradient gives normals, its Hessian the shape operator, and together
//! with the kernel fit of data on the cloud they yield mesh-free surface
//! gradient and Laplace-Beltrami discretizations.

// `!(x >= t)` is used on purpose so that NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cloud;
pub mod contour;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod interpolant;
pub mod io;
pub mod kernels;
pub mod surface_ops;
pub mod testbeds;

pub use cloud::PointCloud;
pub use error::{Error, Result};
pub use geometry::{
    curvatures, implied_normal, level_stats, orient_frame, signature_model, weingarten, LevelStats, SurfaceFrame,
    DEFAULT_TAU_GRAD,
};
pub use interpolant::{fit, gpr_variance, gram, Model, SolveReport};
pub use kernels::{Jet, KernelSpec};
pub use surface_ops::{assemble_operator, laplace_beltrami, surface_gradient, OperatorKind, OperatorMatrix};
