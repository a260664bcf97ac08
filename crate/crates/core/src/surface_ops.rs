//! Surface gradient and Laplace-Beltrami operator of functions known only
//! on the cloud.
//!
//! The data are extended off the cloud by their kernel fit `u`, the normal
//! `nu` and `(d-1) H = tr(D nu)` come from the signature function, and
//!
//! ```text
//! grad_M u = grad u - (nu . grad u) nu
//! lap_M u  = tr(D^2 u) - nu^T D^2 u nu - (d-1) H (grad u . nu)
//! ```
//!
//! Both are linear in the data, so evaluating them on the kernel basis and
//! composing with `(alpha I + K)^{-1}` gives dense matrix discretizations.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::cloud::{displacement_into, PointCloud};
use crate::error::{Error, Result};
use crate::geometry::signature_model;
use crate::interpolant::{gram, Factorization, Model};
use crate::kernels::{Jet, KernelSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// Component `i` (zero based) of the surface gradient.
    SurfaceGradientComponent(usize),
    LaplaceBeltrami,
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorKind::SurfaceGradientComponent(i) => write!(f, "grad:{i}"),
            OperatorKind::LaplaceBeltrami => write!(f, "lb"),
        }
    }
}

/// Dense map from values on the centers to operator values at `rows`.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub kind: OperatorKind,
    pub rows: PointCloud,
    pub cols: PointCloud,
    pub matrix: DMatrix<f64>,
    pub spec: KernelSpec,
    pub alpha: f64,
}

impl OperatorMatrix {
    pub fn apply(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.matrix.ncols() {
            return Err(Error::LengthMismatch { expected: self.matrix.ncols(), got: values.len() });
        }
        let y = DVector::from_column_slice(values);
        Ok((&self.matrix * y).iter().copied().collect())
    }
}

/// Normal, gradient norm and `tr(D nu)` of the signature at `x`.
struct SignatureFrame {
    normal: DVector<f64>,
    trace_dnu: f64,
}

fn signature_frame(sig: &Model, x: &[f64], tau_grad: f64, order: usize) -> Result<SignatureFrame> {
    let jet = sig.evaluate_jet(x, order)?;
    let g = jet.gradient.norm();
    if !(g >= tau_grad) {
        return Err(Error::DegenerateGradient { grad_norm: g, tau: tau_grad });
    }
    let normal = &jet.gradient / g;
    let trace_dnu = if order >= 2 {
        // tr((D^2u - D^2u nu nu^T)/|grad u|) = (tr D^2u - nu^T D^2u nu)/|grad u|
        (jet.hessian.trace() - normal.dot(&(&jet.hessian * &normal))) / g
    } else {
        0.0
    };
    Ok(SignatureFrame { normal, trace_dnu })
}

fn tangential(grad: &DVector<f64>, nu: &DVector<f64>) -> DVector<f64> {
    grad - nu * nu.dot(grad)
}

fn lb_from_jet(jet: &Jet, frame: &SignatureFrame) -> f64 {
    let nu = &frame.normal;
    jet.hessian.trace() - nu.dot(&(&jet.hessian * nu)) - frame.trace_dnu * jet.gradient.dot(nu)
}

fn check_dims(sig: &Model, f_model: &Model, x: &[f64]) -> Result<()> {
    if sig.dim() != f_model.dim() {
        return Err(Error::DimensionMismatch { expected: sig.dim(), got: f_model.dim() });
    }
    if x.len() != sig.dim() {
        return Err(Error::DimensionMismatch { expected: sig.dim(), got: x.len() });
    }
    Ok(())
}

/// Tangential projection of `grad u_f` with the normal taken from `sig`.
pub fn surface_gradient(sig: &Model, f_model: &Model, x: &[f64], tau_grad: f64) -> Result<DVector<f64>> {
    check_dims(sig, f_model, x)?;
    let frame = signature_frame(sig, x, tau_grad, 1)?;
    let jet = f_model.evaluate_jet(x, 1)?;
    Ok(tangential(&jet.gradient, &frame.normal))
}

/// Laplace-Beltrami of `u_f` at `x`, with normal and mean curvature from `sig`.
pub fn laplace_beltrami(sig: &Model, f_model: &Model, x: &[f64], tau_grad: f64) -> Result<f64> {
    check_dims(sig, f_model, x)?;
    let frame = signature_frame(sig, x, tau_grad, 2)?;
    let jet = f_model.evaluate_jet(x, 2)?;
    Ok(lb_from_jet(&jet, &frame))
}

/// Pointwise operator values at every evaluation point. Degenerate points
/// are reported with their index.
pub fn apply_operator(
    sig: &Model,
    f_model: &Model,
    points: &PointCloud,
    kind: OperatorKind,
    tau_grad: f64,
) -> Result<Vec<f64>> {
    points
        .iter()
        .enumerate()
        .map(|(r, x)| {
            let v = match kind {
                OperatorKind::LaplaceBeltrami => laplace_beltrami(sig, f_model, x, tau_grad),
                OperatorKind::SurfaceGradientComponent(i) => {
                    if i >= x.len() {
                        return Err(Error::InvalidParameter(format!("gradient component {i} out of range")));
                    }
                    surface_gradient(sig, f_model, x, tau_grad).map(|g| g[i])
                }
            };
            v.map_err(|e| at_index(e, r))
        })
        .collect()
}

fn at_index(e: Error, index: usize) -> Error {
    match e {
        Error::DegenerateGradient { grad_norm, .. } => Error::DegenerateAt { index, grad_norm },
        other => other,
    }
}

/// Matrix discretization with the signature fitted on the same kernel,
/// centers and `alpha` as the data.
pub fn assemble_operator(
    spec: &KernelSpec,
    cloud: &PointCloud,
    alpha: f64,
    eval_points: &PointCloud,
    kind: OperatorKind,
    tau_grad: f64,
) -> Result<OperatorMatrix> {
    let (sig, _) = signature_model(spec, cloud, alpha)?;
    assemble_operator_with_signature(&sig, spec, cloud, alpha, eval_points, kind, tau_grad)
}

/// Matrix discretization for data fitted with `spec` and `alpha` on `cloud`,
/// with geometry from an arbitrary signature model.
pub fn assemble_operator_with_signature(
    sig: &Model,
    spec: &KernelSpec,
    cloud: &PointCloud,
    alpha: f64,
    eval_points: &PointCloud,
    kind: OperatorKind,
    tau_grad: f64,
) -> Result<OperatorMatrix> {
    let d = cloud.dim();
    if sig.dim() != d || eval_points.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: eval_points.dim().max(sig.dim()) });
    }
    if let OperatorKind::SurfaceGradientComponent(i) = kind {
        if i >= d {
            return Err(Error::InvalidParameter(format!("gradient component {i} out of range for d = {d}")));
        }
    }
    let m = cloud.len();
    let n = eval_points.len();
    let order = match kind {
        OperatorKind::LaplaceBeltrami => 2,
        OperatorKind::SurfaceGradientComponent(_) => 1,
    };

    // Transposed basis block: column r holds the operator at x_r applied to
    // every kernel translate.
    let mut basis_t = DMatrix::zeros(m, n);
    let mut dx = vec![0.0; d];
    for (r, x) in eval_points.iter().enumerate() {
        let frame = signature_frame(sig, x, tau_grad, order).map_err(|e| at_index(e, r))?;
        for (k, c) in cloud.iter().enumerate() {
            displacement_into(x, c, &mut dx);
            let jet = spec.jet(&dx, order)?;
            basis_t[(k, r)] = match kind {
                OperatorKind::LaplaceBeltrami => lb_from_jet(&jet, &frame),
                OperatorKind::SurfaceGradientComponent(i) => tangential(&jet.gradient, &frame.normal)[i],
            };
        }
    }

    let k = gram(spec, cloud);
    let factor = Factorization::new(&k, alpha)?;
    let mut sol = basis_t.clone();
    factor.solve_matrix_mut(&mut sol);
    // Same single refinement step as `fit`, so both paths agree closely.
    let shift = alpha + factor.report_jitter;
    let mut resid = &basis_t - (&k * &sol + &sol * shift);
    factor.solve_matrix_mut(&mut resid);
    sol += resid;

    Ok(OperatorMatrix {
        kind,
        rows: eval_points.clone(),
        cols: cloud.clone(),
        matrix: sol.transpose(),
        spec: *spec,
        alpha,
    })
}
