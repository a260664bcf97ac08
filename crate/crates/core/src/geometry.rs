//! Geometry of the hypersurface implied by a signature function.
//!
//! The signature function is the kernel fit of the all-ones data on the
//! cloud. Its normalized gradient is taken as the surface normal and the
//! derivative of that normal field gives the shape operator.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::interpolant::{fit, Model, SolveReport};
use crate::kernels::KernelSpec;

/// Gradients shorter than this are treated as vanishing.
pub const DEFAULT_TAU_GRAD: f64 = 1e-10;

/// Per-point geometry read off the signature function.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceFrame {
    pub point: Vec<f64>,
    pub normal: DVector<f64>,
    pub grad_norm: f64,
    /// `(D^2u - D^2u nu nu^T) / |grad u|`, not symmetrized.
    pub weingarten: DMatrix<f64>,
    /// The `d - 1` principal curvatures, ascending.
    pub principal_curvatures: Vec<f64>,
    pub mean_curvature: f64,
    pub gauss_curvature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelStats {
    pub mean_level: f64,
    pub min_level: f64,
    pub max_level: f64,
    /// RMS of `u(X) - 1`.
    pub residual_rms: f64,
}

/// Kernel fit of the constant 1 on `cloud`.
pub fn signature_model(spec: &KernelSpec, cloud: &PointCloud, alpha: f64) -> Result<(Model, SolveReport)> {
    fit(spec, cloud, &vec![1.0; cloud.len()], alpha)
}

/// Unit normal `grad u / |grad u|` and `|grad u|`.
pub fn implied_normal(model: &Model, x: &[f64], tau_grad: f64) -> Result<(DVector<f64>, f64)> {
    let jet = model.evaluate_jet(x, 1)?;
    normalize_gradient(&jet.gradient, tau_grad)
}

fn normalize_gradient(g: &DVector<f64>, tau_grad: f64) -> Result<(DVector<f64>, f64)> {
    let n = g.norm();
    if !(n >= tau_grad) {
        return Err(Error::DegenerateGradient { grad_norm: n, tau: tau_grad });
    }
    Ok((g / n, n))
}

/// The derivative of the normal field, `(D^2u - D^2u nu nu^T) / |grad u|`.
pub fn weingarten(model: &Model, x: &[f64], tau_grad: f64) -> Result<DMatrix<f64>> {
    let jet = model.evaluate_jet(x, 2)?;
    let (nu, g) = normalize_gradient(&jet.gradient, tau_grad)?;
    Ok(weingarten_from(&jet.hessian, &nu, g))
}

fn weingarten_from(hess: &DMatrix<f64>, nu: &DVector<f64>, grad_norm: f64) -> DMatrix<f64> {
    (hess - hess * nu * nu.transpose()) / grad_norm
}

/// Symmetric tangential operator `P D^2u P / |grad u|`, `P = I - nu nu^T`.
pub fn shape_operator(hess: &DMatrix<f64>, nu: &DVector<f64>, grad_norm: f64) -> DMatrix<f64> {
    let d = nu.len();
    let p = DMatrix::identity(d, d) - nu * nu.transpose();
    let s = &p * hess * &p / grad_norm;
    // Symmetrize away roundoff.
    (&s + s.transpose()) * 0.5
}

/// Full frame at `x`: normal, shape operator and curvatures.
pub fn curvatures(model: &Model, x: &[f64], tau_grad: f64) -> Result<SurfaceFrame> {
    let jet = model.evaluate_jet(x, 2)?;
    let (nu, grad_norm) = normalize_gradient(&jet.gradient, tau_grad)?;
    let d = nu.len();
    let weingarten = weingarten_from(&jet.hessian, &nu, grad_norm);
    let mean_curvature = if d > 1 { weingarten.trace() / (d - 1) as f64 } else { 0.0 };

    let s = shape_operator(&jet.hessian, &nu, grad_norm);
    let eig = SymmetricEigen::new(s);
    let normal_index = (0..d)
        .max_by(|&a, &b| {
            let ca = eig.eigenvectors.column(a).dot(&nu).abs();
            let cb = eig.eigenvectors.column(b).dot(&nu).abs();
            ca.total_cmp(&cb)
        })
        .unwrap_or(0);
    let mut principal_curvatures: Vec<f64> =
        (0..d).filter(|&i| i != normal_index).map(|i| eig.eigenvalues[i]).collect();
    principal_curvatures.sort_by(f64::total_cmp);
    let gauss_curvature = principal_curvatures.iter().product();

    Ok(SurfaceFrame {
        point: x.to_vec(),
        normal: nu,
        grad_norm,
        weingarten,
        principal_curvatures,
        mean_curvature,
        gauss_curvature,
    })
}

/// Mean, extremes and RMS deviation from 1 of `u` over `cloud`.
pub fn level_stats(model: &Model, cloud: &PointCloud) -> Result<LevelStats> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let values = model.evaluate_many(cloud)?;
    let n = values.len() as f64;
    let mean_level = values.iter().sum::<f64>() / n;
    let min_level = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max_level = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let residual_rms = (values.iter().map(|u| (u - 1.0) * (u - 1.0)).sum::<f64>() / n).sqrt();
    // Keep the ordering invariant under summation roundoff.
    let mean_level = mean_level.clamp(min_level, max_level);
    Ok(LevelStats { mean_level, min_level, max_level, residual_rms })
}

/// Flips the frame so that the normal has a nonnegative component along
/// `reference`. Flipping negates the shape operator and every curvature.
pub fn orient_frame(frame: &SurfaceFrame, reference: &[f64]) -> Result<SurfaceFrame> {
    if reference.len() != frame.normal.len() {
        return Err(Error::DimensionMismatch { expected: frame.normal.len(), got: reference.len() });
    }
    if reference.iter().all(|r| *r == 0.0) {
        return Err(Error::ZeroReference);
    }
    let dot: f64 = frame.normal.iter().zip(reference).map(|(a, b)| a * b).sum();
    if dot >= 0.0 {
        return Ok(frame.clone());
    }
    let mut kappas: Vec<f64> = frame.principal_curvatures.iter().map(|k| -k).collect();
    kappas.sort_by(f64::total_cmp);
    let sign = if kappas.len().is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(SurfaceFrame {
        point: frame.point.clone(),
        normal: -&frame.normal,
        grad_norm: frame.grad_norm,
        weingarten: -&frame.weingarten,
        principal_curvatures: kappas,
        mean_curvature: -frame.mean_curvature,
        gauss_curvature: sign * frame.gauss_curvature,
    })
}
