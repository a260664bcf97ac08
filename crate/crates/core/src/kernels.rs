//! Radial kernels with closed-form value, gradient and Hessian.
//!
//! Every kernel is written as a profile `phi(s)` of the squared distance
//! `s = |x|^2`, so that
//!
//! ```text
//! grad K(x) = 2 phi'(s) x
//! hess K(x) = 2 phi'(s) I + 4 phi''(s) x x^T
//! ```

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Radial kernel family and its shape parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    /// `exp(-|x|^2 / (2 l^2))`.
    Gauss { length_scale: f64 },
    /// `exp(-|x|)`; only continuous at the origin.
    Laplace,
    /// `exp(-sqrt(|x|^2 + eps))`.
    RegularizedLaplace { epsilon: f64 },
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec::RegularizedLaplace { epsilon: 1.0 }
    }
}

/// Value and derivatives of a scalar field at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

impl Jet {
    pub fn zeros(dim: usize) -> Self {
        Jet { value: 0.0, gradient: DVector::zeros(dim), hessian: DMatrix::zeros(dim, dim) }
    }
}

impl KernelSpec {
    pub fn gauss(length_scale: f64) -> Result<Self> {
        let spec = KernelSpec::Gauss { length_scale };
        spec.validate()?;
        Ok(spec)
    }

    pub fn regularized_laplace(epsilon: f64) -> Result<Self> {
        let spec = KernelSpec::RegularizedLaplace { epsilon };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Gauss { length_scale } if !(length_scale > 0.0 && length_scale.is_finite()) => {
                Err(Error::InvalidParameter(format!("Gauss length scale must be positive, got {length_scale}")))
            }
            KernelSpec::RegularizedLaplace { epsilon } if !(epsilon > 0.0 && epsilon.is_finite()) => {
                Err(Error::InvalidParameter(format!("regularized Laplace epsilon must be positive, got {epsilon}")))
            }
            _ => Ok(()),
        }
    }

    /// Highest derivative order available everywhere.
    pub fn smoothness(&self) -> usize {
        match self {
            KernelSpec::Laplace => 0,
            _ => 2,
        }
    }

    /// `K(0)`, the constant diagonal of every Gram matrix.
    pub fn value_at_origin(&self) -> f64 {
        self.profile(0.0).0
    }

    /// Returns `(phi, phi', phi'')` at squared radius `s`.
    fn profile(&self, s: f64) -> (f64, f64, f64) {
        match *self {
            KernelSpec::Gauss { length_scale } => {
                let c = 1.0 / (2.0 * length_scale * length_scale);
                let phi = (-c * s).exp();
                (phi, -c * phi, c * c * phi)
            }
            KernelSpec::Laplace => {
                let r = s.sqrt();
                let phi = (-r).exp();
                // Derivatives are only meaningful for s > 0; callers guard.
                let d1 = -phi / (2.0 * r);
                let d2 = phi * (r + 1.0) / (4.0 * r * r * r);
                (phi, d1, d2)
            }
            KernelSpec::RegularizedLaplace { epsilon } => {
                let r = (s + epsilon).sqrt();
                let phi = (-r).exp();
                let d1 = -phi / (2.0 * r);
                let d2 = phi * (r + 1.0) / (4.0 * r * r * r);
                (phi, d1, d2)
            }
        }
    }

    pub fn value(&self, dx: &[f64]) -> f64 {
        self.profile(norm_sq(dx)).0
    }

    /// Exact jet of `x -> K(x)` up to `order` (0, 1 or 2).
    ///
    /// Entries above the requested order are left at zero.
    pub fn jet(&self, dx: &[f64], order: usize) -> Result<Jet> {
        let mut jet = Jet::zeros(dx.len());
        self.accumulate_jet(dx, order, 1.0, &mut jet)?;
        Ok(jet)
    }

    /// Adds `weight * jet(dx)` into `out`. This is the inner loop of model
    /// evaluation, so it avoids allocating.
    pub fn accumulate_jet(&self, dx: &[f64], order: usize, weight: f64, out: &mut Jet) -> Result<()> {
        let s = norm_sq(dx);
        self.check_order(s, order)?;
        let (phi, d1, d2) = self.profile(s);
        out.value += weight * phi;
        if order == 0 {
            return Ok(());
        }
        let g = 2.0 * d1 * weight;
        for (gi, &xi) in out.gradient.iter_mut().zip(dx) {
            *gi += g * xi;
        }
        if order == 1 {
            return Ok(());
        }
        let h = 4.0 * d2 * weight;
        let d = dx.len();
        for j in 0..d {
            for i in 0..d {
                out.hessian[(i, j)] += h * dx[i] * dx[j];
            }
            out.hessian[(j, j)] += g;
        }
        Ok(())
    }

    fn check_order(&self, s: f64, order: usize) -> Result<()> {
        if order > 2 {
            return Err(Error::NonDifferentiableKernel { kernel: self.to_string(), order });
        }
        if let KernelSpec::Laplace = self {
            if order >= 2 || (order == 1 && s == 0.0) {
                return Err(Error::NonDifferentiableKernel { kernel: self.to_string(), order });
            }
        }
        Ok(())
    }
}

fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Gauss { length_scale } => write!(f, "gauss:l={length_scale}"),
            KernelSpec::Laplace => write!(f, "laplace"),
            KernelSpec::RegularizedLaplace { epsilon } => write!(f, "laplace:eps={epsilon}"),
        }
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    /// Parses `gauss`, `gauss:l=<l>`, `laplace` and `laplace:eps=<eps>`.
    fn from_str(input: &str) -> Result<Self> {
        let bad = |reason: &str| Error::MalformedDescriptor { input: input.to_string(), reason: reason.to_string() };
        let (name, params) = match input.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (input.trim(), None),
        };
        let param = |key: &str| -> Result<Option<f64>> {
            let Some(p) = params else { return Ok(None) };
            let (k, v) = p.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            if k.trim() != key {
                return Err(bad(&format!("unknown parameter `{}`", k.trim())));
            }
            v.trim().parse::<f64>().map(Some).map_err(|_| bad("parameter is not a number"))
        };
        let spec = match name {
            "gauss" => KernelSpec::Gauss { length_scale: param("l")?.unwrap_or(1.0) },
            "laplace" => match param("eps")? {
                None => KernelSpec::Laplace,
                Some(0.0) => KernelSpec::Laplace,
                Some(epsilon) => KernelSpec::RegularizedLaplace { epsilon },
            },
            _ => return Err(bad("unknown kernel family")),
        };
        spec.validate().map_err(|e| bad(&e.to_string()))?;
        Ok(spec)
    }
}
