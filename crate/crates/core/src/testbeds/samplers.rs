use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::AnalyticSurface;
use crate::cloud::{distance, PointCloud};
use crate::error::{Error, Result};

/// `(sqrt(5) - 1) / 2`.
pub const GOLDEN_RATIO_CONJUGATE: f64 = 0.618_033_988_749_894_9;

/// Seeded generator behind every randomized sampler. ChaCha8 has a
/// specified output stream, so clouds are reproducible across platforms.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn require_count(m: usize, min: usize) -> Result<()> {
    if m < min {
        return Err(Error::InvalidParameter(format!("need at least {min} points, got {m}")));
    }
    Ok(())
}

fn cloud(dim: usize, coords: Vec<f64>) -> Result<PointCloud> {
    PointCloud::new(dim, coords)
}

/// Fibonacci lattice on the unit sphere:
/// `z_k = 1 - (2k+1)/m`, `phi_k = 2 pi k psi` with `psi` the golden ratio conjugate.
pub fn fibonacci_sphere(m: usize) -> Result<PointCloud> {
    require_count(m, 1)?;
    let mut coords = Vec::with_capacity(3 * m);
    for k in 0..m {
        let z = 1.0 - (2 * k + 1) as f64 / m as f64;
        let phi = 2.0 * PI * (k as f64 * GOLDEN_RATIO_CONJUGATE).fract();
        let rho = (1.0 - z * z).max(0.0).sqrt();
        let p = [rho * phi.cos(), rho * phi.sin(), z];
        let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        coords.extend(p.iter().map(|c| c / n));
    }
    cloud(3, coords)
}

/// Fibonacci sphere scaled by `(a, b, c)`.
pub fn fibonacci_ellipsoid(m: usize, a: f64, b: f64, c: f64) -> Result<PointCloud> {
    AnalyticSurface::Ellipsoid { a, b, c }.validate()?;
    let s = fibonacci_sphere(m)?;
    s.map_points(|p| vec![a * p[0], b * p[1], c * p[2]]).and_then(|c| PointCloud::new(3, c.coords().to_vec()))
}

/// Point of the ring torus at toroidal angle `u` and poloidal angle `v`.
pub fn torus_point(r1: f64, r2: f64, u: f64, v: f64) -> [f64; 3] {
    let rho = r1 + r2 * v.cos();
    [rho * u.cos(), rho * u.sin(), r2 * v.sin()]
}

/// Fibonacci lattice on the torus:
/// `(u_k, v_k) = (2 pi frac(k psi), 2 pi (k + 1/2) / m)`.
pub fn fibonacci_torus(m: usize, r1: f64, r2: f64) -> Result<PointCloud> {
    require_count(m, 1)?;
    AnalyticSurface::Torus { r1, r2 }.validate()?;
    let mut coords = Vec::with_capacity(3 * m);
    for k in 0..m {
        let u = 2.0 * PI * (k as f64 * GOLDEN_RATIO_CONJUGATE).fract();
        let v = 2.0 * PI * (k as f64 + 0.5) / m as f64;
        coords.extend(torus_point(r1, r2, u, v));
    }
    cloud(3, coords)
}

/// Area-uniform torus sample: `(u, v)` uniform on `[0, 2 pi)^2`, accepted
/// with probability `(R1 + R2 cos v) / (R1 + R2)`.
pub fn torus_rejection_sample(m: usize, r1: f64, r2: f64, seed: u64) -> Result<PointCloud> {
    require_count(m, 1)?;
    AnalyticSurface::Torus { r1, r2 }.validate()?;
    let mut rng = rng_from_seed(seed);
    let mut coords = Vec::with_capacity(3 * m);
    while coords.len() < 3 * m {
        let u = 2.0 * PI * rng.random::<f64>();
        let v = 2.0 * PI * rng.random::<f64>();
        let w: f64 = rng.random();
        if w < (r1 + r2 * v.cos()) / (r1 + r2) {
            coords.extend(torus_point(r1, r2, u, v));
        }
    }
    cloud(3, coords)
}

fn random_unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 1e-300 {
            return g.into_iter().map(|v| v / n).collect();
        }
    }
}

/// Uniform points on the unit sphere by normalizing Gaussian vectors.
pub fn random_sphere(m: usize, seed: u64) -> Result<PointCloud> {
    require_count(m, 1)?;
    let mut rng = rng_from_seed(seed);
    let coords = (0..m).flat_map(|_| random_unit_vector(&mut rng, 3)).collect();
    cloud(3, coords)
}

/// Normalized Gaussian directions scaled componentwise by `(a, b, c)`.
pub fn ellipsoid_sample(m: usize, a: f64, b: f64, c: f64, seed: u64) -> Result<PointCloud> {
    AnalyticSurface::Ellipsoid { a, b, c }.validate()?;
    let s = random_sphere(m, seed)?;
    s.map_points(|p| vec![a * p[0], b * p[1], c * p[2]]).and_then(|c| PointCloud::new(3, c.coords().to_vec()))
}

fn lift_quadratic(a: f64, b: f64, x: f64, y: f64) -> [f64; 3] {
    [x, y, 0.5 * a * x * x - 0.5 * b * y * y]
}

/// `n x n` regular grid over `[-h, h]^2`, lifted to `z = a/2 x^2 - b/2 y^2`.
pub fn quadratic_patch_grid(a: f64, b: f64, half_extent: f64, n: usize) -> Result<PointCloud> {
    require_count(n, 2)?;
    AnalyticSurface::QuadraticPatch { a, b, half_extent }.validate()?;
    // Written so that mirrored nodes are exact negatives of each other.
    let node = |i: usize| half_extent * (2.0 * i as f64 - (n - 1) as f64) / (n - 1) as f64;
    let mut coords = Vec::with_capacity(3 * n * n);
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (node(i), node(j));
            coords.extend(lift_quadratic(a, b, x, y));
        }
    }
    cloud(3, coords)
}

/// Independent uniform `(x, y)` on `[-h, h]^2`, lifted to the patch.
pub fn quadratic_patch_random(a: f64, b: f64, half_extent: f64, m: usize, seed: u64) -> Result<PointCloud> {
    require_count(m, 1)?;
    AnalyticSurface::QuadraticPatch { a, b, half_extent }.validate()?;
    let mut rng = rng_from_seed(seed);
    let mut coords = Vec::with_capacity(3 * m);
    for _ in 0..m {
        let x = half_extent * (2.0 * rng.random::<f64>() - 1.0);
        let y = half_extent * (2.0 * rng.random::<f64>() - 1.0);
        coords.extend(lift_quadratic(a, b, x, y));
    }
    cloud(3, coords)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveSampling {
    /// `m` samples at equispaced parameter values (arc length for polygons).
    Equispaced,
    /// The first `m` of `of` equispaced samples: an incomplete piece of the curve.
    Subset { of: usize },
}

/// Point of a parametric curve. The semi-ellipse runs over `[0, pi]`, the
/// closed curves over `[0, 2 pi)`.
pub fn curve_point(surface: &AnalyticSurface, t: f64) -> Option<[f64; 2]> {
    match *surface {
        AnalyticSurface::Ellipse { a, b } | AnalyticSurface::SemiEllipse { a, b } => Some([a * t.cos(), b * t.sin()]),
        AnalyticSurface::CubicClosedCurve => Some([t.sin(), t.sin().powi(3) + 0.5 * t.cos()]),
        _ => None,
    }
}

/// Deterministic samples of a planar curve.
pub fn curve_sample(surface: &AnalyticSurface, m: usize, mode: CurveSampling) -> Result<PointCloud> {
    require_count(m, 3)?;
    surface.validate()?;
    let total = match mode {
        CurveSampling::Equispaced => m,
        CurveSampling::Subset { of } => {
            if of < m {
                return Err(Error::InvalidParameter(format!("subset of {of} cannot hold {m} points")));
            }
            of
        }
    };
    let points: Vec<[f64; 2]> = match surface {
        AnalyticSurface::Ellipse { .. } | AnalyticSurface::CubicClosedCurve => {
            (0..total).map(|k| curve_point(surface, 2.0 * PI * k as f64 / total as f64).unwrap()).collect()
        }
        AnalyticSurface::SemiEllipse { .. } => {
            (0..total).map(|k| curve_point(surface, PI * k as f64 / (total - 1) as f64).unwrap()).collect()
        }
        AnalyticSurface::Triangle { .. } | AnalyticSurface::Square { .. } => {
            polygon_samples(&surface.polygon_vertices().unwrap(), total)?.into_iter().map(|(p, _)| p).collect()
        }
        other => {
            return Err(Error::InvalidParameter(format!("{other:?} is not a planar curve")));
        }
    };
    cloud(2, points.iter().take(m).flat_map(|p| p.iter().copied()).collect())
}

/// Samples spread over the edges in proportion to their length, each edge
/// starting at its first vertex. Returns points with their arc-length
/// position measured from vertex 0.
fn polygon_samples(verts: &[[f64; 2]], m: usize) -> Result<Vec<([f64; 2], f64)>> {
    let n = verts.len();
    if m < n {
        return Err(Error::InvalidParameter(format!("a polygon with {n} vertices needs at least {n} samples")));
    }
    let lens: Vec<f64> = (0..n)
        .map(|i| {
            let (p, q) = (verts[i], verts[(i + 1) % n]);
            ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt()
        })
        .collect();
    let perimeter: f64 = lens.iter().sum();

    // Largest-remainder apportionment with at least one sample per edge.
    let quotas: Vec<f64> = lens.iter().map(|l| m as f64 * l / perimeter).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| (q.floor() as usize).max(1)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| (quotas[j] - quotas[j].floor()).total_cmp(&(quotas[i] - quotas[i].floor())));
    let mut assigned: usize = counts.iter().sum();
    let mut idx = 0;
    while assigned < m {
        counts[order[idx % n]] += 1;
        assigned += 1;
        idx += 1;
    }
    while assigned > m {
        let i = (0..n).filter(|&i| counts[i] > 1).max_by_key(|&i| counts[i]).unwrap();
        counts[i] -= 1;
        assigned -= 1;
    }

    let mut out = Vec::with_capacity(m);
    let mut start = 0.0;
    for i in 0..n {
        let (p, q) = (verts[i], verts[(i + 1) % n]);
        for j in 0..counts[i] {
            let t = j as f64 / counts[i] as f64;
            out.push(([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])], start + t * lens[i]));
        }
        start += lens[i];
    }
    Ok(out)
}

/// Square sample with every point within arc-length `radius` of the vertex
/// `(side/2, side/2)` removed.
pub fn square_with_corner_removed(side: f64, m: usize, radius: f64) -> Result<PointCloud> {
    let sq = AnalyticSurface::Square { side };
    sq.validate()?;
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter("corner radius must be positive".into()));
    }
    let verts = sq.polygon_vertices().unwrap();
    let perimeter = 4.0 * side;
    let kept: Vec<f64> = polygon_samples(&verts, m)?
        .into_iter()
        .filter(|(_, s)| s.min(perimeter - s) >= radius)
        .flat_map(|(p, _)| p)
        .collect();
    cloud(2, kept)
}

/// Moves every point by `r * theta`, `theta` uniform on the unit sphere and
/// `r` uniform on `[0, max_dist]`.
pub fn perturb(points: &PointCloud, max_dist: f64, seed: u64) -> Result<PointCloud> {
    if !(max_dist >= 0.0 && max_dist.is_finite()) {
        return Err(Error::InvalidParameter(format!("max_dist must be nonnegative, got {max_dist}")));
    }
    if max_dist == 0.0 {
        return Ok(points.clone());
    }
    let mut rng = rng_from_seed(seed);
    let dim = points.dim();
    let moved = points.map_points(|p| {
        let theta = random_unit_vector(&mut rng, dim);
        let r = max_dist * rng.random::<f64>();
        p.iter().zip(&theta).map(|(x, t)| x + r * t).collect()
    })?;
    PointCloud::new(dim, moved.coords().to_vec())
}

/// `max_{y in reference} min_{x in points} |x - y|`.
pub fn fill_distance(points: &PointCloud, reference: &PointCloud) -> Result<f64> {
    if reference.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if reference.dim() != points.dim() {
        return Err(Error::DimensionMismatch { expected: points.dim(), got: reference.dim() });
    }
    Ok(reference
        .iter()
        .map(|y| points.iter().map(|x| distance(x, y)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max))
}
