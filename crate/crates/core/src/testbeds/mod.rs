//! Analytic test surfaces, samplers and exact geometry used by the
//! experiments and the acceptance suite.

mod samplers;
mod truth;

use std::str::FromStr;

pub use samplers::*;
pub use truth::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticSurface {
    Sphere {
        r: f64,
    },
    /// Ring torus with center-circle radius `r1` and tube radius `r2`.
    Torus {
        r1: f64,
        r2: f64,
    },
    Ellipsoid {
        a: f64,
        b: f64,
        c: f64,
    },
    /// `z = a/2 x^2 - b/2 y^2` over `[-h, h]^2`.
    QuadraticPatch {
        a: f64,
        b: f64,
        half_extent: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    /// `(sin t, sin^3 t + cos t / 2)`.
    CubicClosedCurve,
    Triangle {
        vertices: [[f64; 2]; 3],
    },
    /// Axis-aligned, centered at the origin.
    Square {
        side: f64,
    },
    /// Upper half (`y >= 0`) of an ellipse.
    SemiEllipse {
        a: f64,
        b: f64,
    },
}

impl AnalyticSurface {
    /// Equilateral triangle inscribed in the unit circle.
    pub fn default_triangle() -> Self {
        let v = |k: f64| {
            let t = std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * k / 3.0;
            [t.cos(), t.sin()]
        };
        AnalyticSurface::Triangle { vertices: [v(0.0), v(1.0), v(2.0)] }
    }

    pub fn dim(&self) -> usize {
        match self {
            AnalyticSurface::Sphere { .. }
            | AnalyticSurface::Torus { .. }
            | AnalyticSurface::Ellipsoid { .. }
            | AnalyticSurface::QuadraticPatch { .. } => 3,
            _ => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
            }
        };
        match *self {
            AnalyticSurface::Sphere { r } => positive("r", r),
            AnalyticSurface::Torus { r1, r2 } => {
                positive("R1", r1)?;
                positive("R2", r2)?;
                if r1 <= r2 {
                    return Err(Error::InvalidParameter(format!(
                        "a ring torus requires R1 > R2, got R1={r1}, R2={r2}"
                    )));
                }
                Ok(())
            }
            AnalyticSurface::Ellipsoid { a, b, c } => {
                positive("a", a)?;
                positive("b", b)?;
                positive("c", c)
            }
            AnalyticSurface::QuadraticPatch { a, b, half_extent } => {
                positive("a", a)?;
                positive("b", b)?;
                positive("h", half_extent)
            }
            AnalyticSurface::Ellipse { a, b } | AnalyticSurface::SemiEllipse { a, b } => {
                positive("a", a)?;
                positive("b", b)
            }
            AnalyticSurface::CubicClosedCurve => Ok(()),
            AnalyticSurface::Triangle { vertices } => {
                let [p, q, r] = vertices;
                let area2 = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
                if area2.abs() > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter("triangle vertices are collinear".into()))
                }
            }
            AnalyticSurface::Square { side } => positive("side", side),
        }
    }

    /// Value of a defining function that vanishes exactly on the surface.
    /// Polygons return the distance to their boundary.
    pub fn residual(&self, x: &[f64]) -> f64 {
        match *self {
            AnalyticSurface::Sphere { r } => norm(x) - r,
            AnalyticSurface::Torus { r1, r2 } => {
                let rho = (x[0] * x[0] + x[1] * x[1]).sqrt();
                (rho - r1).powi(2) + x[2] * x[2] - r2 * r2
            }
            AnalyticSurface::Ellipsoid { a, b, c } => {
                (x[0] / a).powi(2) + (x[1] / b).powi(2) + (x[2] / c).powi(2) - 1.0
            }
            AnalyticSurface::QuadraticPatch { a, b, .. } => x[2] - (0.5 * a * x[0] * x[0] - 0.5 * b * x[1] * x[1]),
            AnalyticSurface::Ellipse { a, b } => (x[0] / a).powi(2) + (x[1] / b).powi(2) - 1.0,
            AnalyticSurface::SemiEllipse { a, b } => {
                let r = (x[0] / a).powi(2) + (x[1] / b).powi(2) - 1.0;
                if x[1] >= -1e-12 {
                    r
                } else {
                    r.abs() + x[1].abs()
                }
            }
            AnalyticSurface::CubicClosedCurve => {
                let c = 2.0 * (x[1] - x[0].powi(3));
                c * c + x[0] * x[0] - 1.0
            }
            AnalyticSurface::Triangle { .. } | AnalyticSurface::Square { .. } => {
                let verts = self.polygon_vertices().unwrap();
                polygon_distance(&verts, x)
            }
        }
    }

    pub(crate) fn polygon_vertices(&self) -> Option<Vec<[f64; 2]>> {
        match *self {
            AnalyticSurface::Triangle { vertices } => Some(vertices.to_vec()),
            AnalyticSurface::Square { side } => {
                let h = side / 2.0;
                Some(vec![[h, h], [-h, h], [-h, -h], [h, -h]])
            }
            _ => None,
        }
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn polygon_distance(verts: &[[f64; 2]], x: &[f64]) -> f64 {
    let n = verts.len();
    (0..n)
        .map(|i| {
            let p = verts[i];
            let q = verts[(i + 1) % n];
            let e = [q[0] - p[0], q[1] - p[1]];
            let w = [x[0] - p[0], x[1] - p[1]];
            let t = ((w[0] * e[0] + w[1] * e[1]) / (e[0] * e[0] + e[1] * e[1])).clamp(0.0, 1.0);
            let dx = w[0] - t * e[0];
            let dy = w[1] - t * e[1];
            (dx * dx + dy * dy).sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// A parsed surface descriptor such as `torus:R1=2,R2=0.5`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceDescriptor {
    pub surface: AnalyticSurface,
    /// Grid resolution for `quad:...,n=<n>`.
    pub grid_n: Option<usize>,
    /// Arc-length radius of the corner removed from `square:cut=<r>`.
    pub corner_cut: Option<f64>,
}

impl FromStr for SurfaceDescriptor {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let bad = |reason: String| Error::MalformedDescriptor { input: input.to_string(), reason };
        let (name, rest) = input.split_once(':').unwrap_or((input, ""));
        let mut params: Vec<(String, f64)> = Vec::new();
        for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| bad(format!("expected key=value, got `{item}`")))?;
            let v: f64 = v.trim().parse().map_err(|_| bad(format!("`{}` is not a number", v.trim())))?;
            params.push((k.trim().to_string(), v));
        }
        let allowed: &[&str] = match name.trim() {
            "sphere" => &["r"],
            "torus" => &["R1", "R2"],
            "ellipsoid" => &["a", "b", "c"],
            "quad" => &["a", "b", "h", "n"],
            "ellipse" | "semi-ellipse" => &["a", "b"],
            "cubic-curve" | "triangle" => &[],
            "square" => &["side", "cut"],
            other => return Err(bad(format!("unknown surface `{other}`"))),
        };
        if let Some((k, _)) = params.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            return Err(bad(format!("unknown parameter `{k}`")));
        }
        let get = |k: &str, default: f64| params.iter().find(|(p, _)| p == k).map_or(default, |(_, v)| *v);
        let has = |k: &str| params.iter().any(|(p, _)| p == k);

        let surface = match name.trim() {
            "sphere" => AnalyticSurface::Sphere { r: get("r", 1.0) },
            "torus" => AnalyticSurface::Torus { r1: get("R1", 2.0), r2: get("R2", 0.5) },
            "ellipsoid" => AnalyticSurface::Ellipsoid { a: get("a", 2.0), b: get("b", 0.5), c: get("c", 1.0) },
            "quad" => {
                AnalyticSurface::QuadraticPatch { a: get("a", 1.0), b: get("b", 2.0), half_extent: get("h", 0.5) }
            }
            "ellipse" => AnalyticSurface::Ellipse { a: get("a", 1.0), b: get("b", 0.5) },
            "semi-ellipse" => AnalyticSurface::SemiEllipse { a: get("a", 1.0), b: get("b", 0.5) },
            "cubic-curve" => AnalyticSurface::CubicClosedCurve,
            "triangle" => AnalyticSurface::default_triangle(),
            _ => AnalyticSurface::Square { side: get("side", 2.0) },
        };
        surface.validate().map_err(|e| bad(e.to_string()))?;

        let grid_n = if has("n") {
            let n = get("n", 0.0);
            if n.fract() != 0.0 || n < 2.0 {
                return Err(bad("n must be an integer >= 2".into()));
            }
            Some(n as usize)
        } else {
            None
        };
        let corner_cut = if has("cut") {
            let c = get("cut", 0.0);
            if !(c > 0.0) {
                return Err(bad("cut must be positive".into()));
            }
            Some(c)
        } else {
            None
        };
        Ok(SurfaceDescriptor { surface, grid_n, corner_cut })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_descriptors() {
        let d: SurfaceDescriptor = "torus:R1=2,R2=0.5".parse().unwrap();
        assert_eq!(d.surface, AnalyticSurface::Torus { r1: 2.0, r2: 0.5 });
        let d: SurfaceDescriptor = "quad:a=1,b=2,h=0.5,n=16".parse().unwrap();
        assert_eq!(d.grid_n, Some(16));
        assert_eq!(d.surface, AnalyticSurface::QuadraticPatch { a: 1.0, b: 2.0, half_extent: 0.5 });
        for ok in [
            "sphere:r=1",
            "ellipsoid:a=2,b=0.5,c=1",
            "ellipse:a=1,b=0.5",
            "cubic-curve",
            "triangle",
            "square",
            "semi-ellipse",
            "square:side=2,cut=0.3",
        ] {
            assert!(ok.parse::<SurfaceDescriptor>().is_ok(), "{ok}");
        }
    }

    #[test]
    fn rejects_bad_descriptors() {
        let err = "torus:R1=0.5,R2=2".parse::<SurfaceDescriptor>().unwrap_err();
        assert!(err.to_string().contains("R1 > R2"), "{err}");
        assert!("sphere:r=-1".parse::<SurfaceDescriptor>().is_err());
        assert!("sphere:q=1".parse::<SurfaceDescriptor>().is_err());
        assert!("blob".parse::<SurfaceDescriptor>().is_err());
        assert!("quad:n=1.5".parse::<SurfaceDescriptor>().is_err());
        assert!("sphere:r".parse::<SurfaceDescriptor>().is_err());
    }

    #[test]
    fn polygon_residual() {
        let sq = AnalyticSurface::Square { side: 2.0 };
        assert_eq!(sq.residual(&[1.0, 0.3]), 0.0);
        assert!((sq.residual(&[0.0, 0.0]) - 1.0).abs() < 1e-15);
    }
}
