use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::AnalyticSurface;
use crate::error::{Error, Result};

/// Exact geometry at a surface point. Curvatures are the eigenvalues of
/// the derivative of `normal` on the tangent space, so a sphere with the
/// outward normal has curvature `+1/r`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub normal: Vec<f64>,
    /// Ascending.
    pub principal_curvatures: Vec<f64>,
    pub mean_curvature: f64,
    pub gauss_curvature: f64,
}

/// Sphere test function `f(x) = sin(pi (1 + 2 x3))` with its exact surface
/// gradient and Laplace-Beltrami on the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereTruth {
    pub value: f64,
    pub gradient: [f64; 3],
    pub laplace_beltrami: f64,
}

const ON_SURFACE_TOL: f64 = 1e-9;

pub fn sphere_test_function(x: &[f64]) -> Result<SphereTruth> {
    if x.len() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: x.len() });
    }
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if (r - 1.0).abs() > ON_SURFACE_TOL {
        return Err(Error::OffSurfacePoint { residual: r - 1.0 });
    }
    let arg = PI * (1.0 + 2.0 * x[2]);
    let (s, c) = arg.sin_cos();
    let g = 2.0 * PI * c;
    // Tangential projection of g e3: g (e3 - x3 x).
    let gradient = [-g * x[2] * x[0], -g * x[2] * x[1], g * (1.0 - x[2] * x[2])];
    let laplace_beltrami = 4.0 * PI * PI * (x[2] * x[2] - 1.0) * s - 4.0 * PI * x[2] * c;
    Ok(SphereTruth { value: s, gradient, laplace_beltrami })
}

/// Torus curvatures at poloidal angle `v` for the outward normal:
/// the tube circle gives `1/R2`, the other direction `cos v / (R1 + R2 cos v)`.
/// Returned ascending.
pub fn torus_curvatures(r1: f64, r2: f64, v: f64) -> [f64; 2] {
    let tube = 1.0 / r2;
    let ring = v.cos() / (r1 + r2 * v.cos());
    if tube <= ring {
        [tube, ring]
    } else {
        [ring, tube]
    }
}

/// `1 / (a^2 b^2 c^2 (x1^2/a^4 + x2^2/b^4 + x3^2/c^4)^2)`.
pub fn ellipsoid_gauss_curvature(a: f64, b: f64, c: f64, x: &[f64]) -> f64 {
    let s = x[0] * x[0] / a.powi(4) + x[1] * x[1] / b.powi(4) + x[2] * x[2] / c.powi(4);
    1.0 / (a * a * b * b * c * c * s * s)
}

/// Geometry of the level set `F = 0` from `grad F` and `D^2 F`, with the
/// normal `grad F / |grad F|`.
pub fn implicit_frame(grad: &[f64], hess: &DMatrix<f64>) -> GroundTruth {
    let d = grad.len();
    let g = DVector::from_column_slice(grad);
    let gn = g.norm();
    let nu = &g / gn;
    let p = DMatrix::identity(d, d) - &nu * nu.transpose();
    let s = &p * hess * &p / gn;
    let s = (&s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::new(s.clone());
    let drop = (0..d)
        .max_by(|&i, &j| {
            eig.eigenvectors.column(i).dot(&nu).abs().total_cmp(&eig.eigenvectors.column(j).dot(&nu).abs())
        })
        .unwrap();
    let mut kappas: Vec<f64> = (0..d).filter(|&i| i != drop).map(|i| eig.eigenvalues[i]).collect();
    kappas.sort_by(f64::total_cmp);
    let mean_curvature = if d > 1 { s.trace() / (d - 1) as f64 } else { 0.0 };
    GroundTruth {
        normal: nu.iter().copied().collect(),
        gauss_curvature: kappas.iter().product(),
        principal_curvatures: kappas,
        mean_curvature,
    }
}

/// Exact normal and curvatures of `surface` at `x`.
///
/// Closed surfaces and curves use the outward normal. The quadratic patch
/// uses the defining function `a/2 x^2 - b/2 y^2 - z`, whose normal at the
/// origin is `-e3` and whose curvatures there are `(a, -b)`.
pub fn analytic_frame(surface: &AnalyticSurface, x: &[f64]) -> Result<GroundTruth> {
    surface.validate()?;
    if x.len() != surface.dim() {
        return Err(Error::DimensionMismatch { expected: surface.dim(), got: x.len() });
    }
    let residual = surface.residual(x);
    if residual.abs() > ON_SURFACE_TOL {
        return Err(Error::OffSurfacePoint { residual });
    }
    let frame = match *surface {
        AnalyticSurface::Sphere { r } => {
            let n = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            GroundTruth {
                normal: x.iter().map(|v| v / n).collect(),
                principal_curvatures: vec![1.0 / r, 1.0 / r],
                mean_curvature: 1.0 / r,
                gauss_curvature: 1.0 / (r * r),
            }
        }
        AnalyticSurface::Torus { r1, r2 } => {
            let rho = (x[0] * x[0] + x[1] * x[1]).sqrt();
            let v = x[2].atan2(rho - r1);
            let kappas = torus_curvatures(r1, r2, v);
            let (cu, su) = (x[0] / rho, x[1] / rho);
            GroundTruth {
                normal: vec![v.cos() * cu, v.cos() * su, v.sin()],
                principal_curvatures: kappas.to_vec(),
                mean_curvature: 0.5 * (kappas[0] + kappas[1]),
                gauss_curvature: kappas[0] * kappas[1],
            }
        }
        AnalyticSurface::Ellipsoid { a, b, c } => {
            let grad = [2.0 * x[0] / (a * a), 2.0 * x[1] / (b * b), 2.0 * x[2] / (c * c)];
            let hess = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0 / (a * a), 2.0 / (b * b), 2.0 / (c * c)]));
            let mut f = implicit_frame(&grad, &hess);
            f.gauss_curvature = ellipsoid_gauss_curvature(a, b, c, x);
            f
        }
        AnalyticSurface::QuadraticPatch { a, b, .. } => {
            let grad = [a * x[0], -b * x[1], -1.0];
            let hess = DMatrix::from_diagonal(&DVector::from_vec(vec![a, -b, 0.0]));
            implicit_frame(&grad, &hess)
        }
        AnalyticSurface::Ellipse { a, b } | AnalyticSurface::SemiEllipse { a, b } => {
            let grad = [2.0 * x[0] / (a * a), 2.0 * x[1] / (b * b)];
            let hess = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0 / (a * a), 2.0 / (b * b)]));
            implicit_frame(&grad, &hess)
        }
        AnalyticSurface::CubicClosedCurve => {
            // F = 4 (y - x^3)^2 + x^2 - 1.
            let w = x[1] - x[0].powi(3);
            let grad = [-24.0 * w * x[0] * x[0] + 2.0 * x[0], 8.0 * w];
            let hxx = 72.0 * x[0].powi(4) - 48.0 * w * x[0] + 2.0;
            let hxy = -24.0 * x[0] * x[0];
            let hess = DMatrix::from_row_slice(2, 2, &[hxx, hxy, hxy, 8.0]);
            implicit_frame(&grad, &hess)
        }
        AnalyticSurface::Triangle { .. } | AnalyticSurface::Square { .. } => {
            return Err(Error::InvalidParameter("polygons have no smooth ground truth".into()));
        }
    };
    Ok(frame)
}
