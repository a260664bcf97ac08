//! Tensor-grid sampling of a model and level-curve extraction in the plane.
//!
//! Level curves use marching squares with linear interpolation along cell
//! edges. In a saddle cell the average of the four corner values picks the
//! pairing of the crossings.

use std::collections::HashMap;
use std::str::FromStr;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::interpolant::Model;

/// Axis-aligned box in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundingBox {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl BoundingBox {
    pub fn new(min: Vec<f64>, max: Vec<f64>) -> Result<Self> {
        if min.len() != max.len() || min.is_empty() {
            return Err(Error::InvalidParameter("box corners must have the same positive dimension".into()));
        }
        if min.iter().chain(&max).any(|v| !v.is_finite()) || min.iter().zip(&max).any(|(a, b)| !(a < b)) {
            return Err(Error::InvalidParameter("box requires finite min < max in every coordinate".into()));
        }
        Ok(BoundingBox { min, max })
    }

    /// Bounding box of `cloud`, each side pushed out by `fraction` of its
    /// extent. Degenerate extents are widened to a unit length first.
    pub fn around(cloud: &PointCloud, fraction: f64) -> Result<Self> {
        if cloud.is_empty() {
            return Err(Error::EmptyCloud);
        }
        let (lo, hi) = cloud.bounding_box();
        let (mut min, mut max) = (Vec::new(), Vec::new());
        for (l, h) in lo.into_iter().zip(hi) {
            let w = if h > l { h - l } else { 1.0 };
            let c = 0.5 * (l + h);
            min.push(c - w * (0.5 + fraction));
            max.push(c + w * (0.5 + fraction));
        }
        Self::new(min, max)
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }
}

/// Parses `min1,max1,min2,max2,...`.
impl FromStr for BoundingBox {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::MalformedDescriptor { input: s.to_string(), reason: reason.to_string() };
        let v: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad("expected comma-separated numbers"))?;
        if v.is_empty() || !v.len().is_multiple_of(2) {
            return Err(bad("expected min,max pairs"));
        }
        let min = v.iter().step_by(2).copied().collect();
        let max = v.iter().skip(1).step_by(2).copied().collect();
        Self::new(min, max).map_err(|e| bad(&e.to_string()))
    }
}

/// Model values on a `resolution^d` tensor grid, first coordinate fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSample {
    pub bbox: BoundingBox,
    pub resolution: usize,
    pub values: Vec<f64>,
}

impl GridSample {
    pub fn node(&self, flat: usize) -> Vec<f64> {
        let mut rest = flat;
        (0..self.bbox.dim())
            .map(|k| {
                let i = rest % self.resolution;
                rest /= self.resolution;
                self.coordinate(k, i)
            })
            .collect()
    }

    fn coordinate(&self, axis: usize, i: usize) -> f64 {
        let (a, b) = (self.bbox.min[axis], self.bbox.max[axis]);
        a + (b - a) * i as f64 / (self.resolution - 1) as f64
    }

    /// Grid spacing along `axis`.
    pub fn spacing(&self, axis: usize) -> f64 {
        (self.bbox.max[axis] - self.bbox.min[axis]) / (self.resolution - 1) as f64
    }

    /// Rows `x1,...,xd,u`.
    pub fn to_csv(&self) -> String {
        let d = self.bbox.dim();
        let mut out: String = (1..=d).map(|i| format!("x{i},")).collect();
        out.push_str("u\n");
        for (flat, u) in self.values.iter().enumerate() {
            for x in self.node(flat) {
                out.push_str(&format!("{x:?},"));
            }
            out.push_str(&format!("{u:?}\n"));
        }
        out
    }
}

pub fn sample_grid(model: &Model, bbox: &BoundingBox, resolution: usize) -> Result<GridSample> {
    if bbox.dim() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), got: bbox.dim() });
    }
    if resolution < 2 {
        return Err(Error::InvalidParameter(format!("grid resolution must be at least 2, got {resolution}")));
    }
    let total = resolution
        .checked_pow(bbox.dim() as u32)
        .filter(|n| *n <= 1 << 26)
        .ok_or_else(|| Error::InvalidParameter("grid is too large".into()))?;
    let mut grid = GridSample { bbox: bbox.clone(), resolution, values: Vec::with_capacity(total) };
    for flat in 0..total {
        let x = grid.node(flat);
        grid.values.push(model.evaluate(&x)?);
    }
    Ok(grid)
}

/// A level curve as a vertex list. Closed curves repeat the first vertex
/// at the end.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
}

impl Polyline {
    pub fn is_closed(&self) -> bool {
        self.points.len() > 2 && self.points.first() == self.points.last()
    }
}

/// Grid edge identified by its two nodes, lower index first.
type EdgeKey = (usize, usize);

/// Level curves `u = level` of a planar grid.
pub fn extract_level_curves(grid: &GridSample, level: f64) -> Result<Vec<Polyline>> {
    if grid.bbox.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: grid.bbox.dim() });
    }
    if !level.is_finite() {
        return Err(Error::InvalidParameter("level must be finite".into()));
    }
    let n = grid.resolution;
    let idx = |i: usize, j: usize| i + n * j;
    let above = |k: usize| grid.values[k] > level;

    let mut crossings: HashMap<EdgeKey, [f64; 2]> = HashMap::new();
    let mut crossing = |a: usize, b: usize| -> EdgeKey {
        let key = (a.min(b), a.max(b));
        crossings.entry(key).or_insert_with(|| {
            let (pa, pb) = (grid.node(a), grid.node(b));
            let (ua, ub) = (grid.values[a], grid.values[b]);
            let t = (level - ua) / (ub - ua);
            [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])]
        });
        key
    };

    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            // Counter-clockwise corners and the edges leaving them.
            let c = [idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)];
            let case = (0..4).fold(0, |acc, k| acc | (usize::from(above(c[k])) << k));
            let e = |k: usize| (c[k], c[(k + 1) % 4]);
            let pairs: &[(usize, usize)] = match case {
                0 | 15 => &[],
                1 | 14 => &[(3, 0)],
                2 | 13 => &[(0, 1)],
                3 | 12 => &[(3, 1)],
                4 | 11 => &[(1, 2)],
                6 | 9 => &[(0, 2)],
                7 | 8 => &[(2, 3)],
                5 | 10 => {
                    let mean = c.iter().map(|&k| grid.values[k]).sum::<f64>() / 4.0;
                    // The diagonal pair on the same side as the average stays connected.
                    let center_matches_02 = (mean > level) == above(c[0]);
                    if center_matches_02 {
                        &[(3, 2), (0, 1)]
                    } else {
                        &[(3, 0), (1, 2)]
                    }
                }
                _ => unreachable!(),
            };
            for &(p, q) in pairs {
                let (a, b) = (e(p), e(q));
                segments.push((crossing(a.0, a.1), crossing(b.0, b.1)));
            }
        }
    }
    Ok(join_segments(&segments, &crossings))
}

fn join_segments(segments: &[(EdgeKey, EdgeKey)], at: &HashMap<EdgeKey, [f64; 2]>) -> Vec<Polyline> {
    let mut incident: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (s, (a, b)) in segments.iter().enumerate() {
        incident.entry(*a).or_default().push(s);
        incident.entry(*b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let walk = |start_seg: usize, start: EdgeKey, used: &mut Vec<bool>| {
        let mut keys = vec![start];
        let (mut seg, mut cur) = (start_seg, start);
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            cur = if a == cur { b } else { a };
            keys.push(cur);
            match incident[&cur].iter().find(|&&s| !used[s]) {
                Some(&next) => seg = next,
                None => break,
            }
        }
        Polyline { points: keys.iter().map(|k| at[k]).collect() }
    };

    let mut out = Vec::new();
    // Open curves start at crossings used by a single segment. Sorting keeps
    // the output independent of hash order.
    let mut ends: Vec<EdgeKey> = incident.iter().filter(|(_, v)| v.len() == 1).map(|(k, _)| *k).collect();
    ends.sort_unstable();
    for k in ends {
        let s = incident[&k][0];
        if !used[s] {
            out.push(walk(s, k, &mut used));
        }
    }
    for s in 0..segments.len() {
        if !used[s] {
            out.push(walk(s, segments[s].0, &mut used));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpolant::fit;
    use crate::kernels::KernelSpec;

    fn grid_of(f: impl Fn(f64, f64) -> f64, n: usize) -> GridSample {
        let bbox = BoundingBox::new(vec![-1.5, -1.5], vec![1.5, 1.5]).unwrap();
        let mut g = GridSample { bbox, resolution: n, values: vec![0.0; n * n] };
        for k in 0..n * n {
            let x = g.node(k);
            g.values[k] = f(x[0], x[1]);
        }
        g
    }

    #[test]
    fn circle_level_set_is_one_closed_curve() {
        let g = grid_of(|x, y| x * x + y * y, 61);
        let curves = extract_level_curves(&g, 1.0).unwrap();
        assert_eq!(curves.len(), 1);
        assert!(curves[0].is_closed());
        let h = g.spacing(0);
        for p in &curves[0].points {
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            assert!((r - 1.0).abs() < h * h, "{r}");
        }
    }

    #[test]
    fn two_components_and_open_curves() {
        let g = grid_of(|x, y| ((x - 0.8).powi(2) + y * y).min((x + 0.8).powi(2) + y * y), 61);
        let curves = extract_level_curves(&g, 0.25).unwrap();
        assert_eq!(curves.len(), 2);
        assert!(curves.iter().all(Polyline::is_closed));

        let g = grid_of(|x, _| x, 11);
        let curves = extract_level_curves(&g, 0.1).unwrap();
        assert_eq!(curves.len(), 1);
        assert!(!curves[0].is_closed());
        assert_eq!(curves[0].points.len(), 11);
    }

    #[test]
    fn saddle_uses_cell_average() {
        // Corner values 1, 0, 1, 0 around the cell: average 0.5.
        let bbox = BoundingBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let g = GridSample { bbox, resolution: 2, values: vec![1.0, 0.0, 0.0, 1.0] };
        let low = extract_level_curves(&g, 0.4).unwrap();
        let high = extract_level_curves(&g, 0.6).unwrap();
        assert_eq!(low.len(), 2);
        assert_eq!(high.len(), 2);
        // Below the average the high corners connect through the center, so
        // the segments cut off the low corners (1,0) and (0,1).
        let cuts = |cs: &[Polyline], corner: [f64; 2]| {
            cs.iter().any(|c| c.points.iter().all(|p| (p[0] - corner[0]).abs() + (p[1] - corner[1]).abs() <= 0.61))
        };
        assert!(cuts(&low, [1.0, 0.0]) && cuts(&low, [0.0, 1.0]));
        assert!(cuts(&high, [0.0, 0.0]) && cuts(&high, [1.0, 1.0]));
    }

    #[test]
    fn bbox_parsing_and_grid_size() {
        let b: BoundingBox = "-1,1,-2,2".parse().unwrap();
        assert_eq!(b.min, vec![-1.0, -2.0]);
        assert!("1,0".parse::<BoundingBox>().is_err());
        assert!("1,2,3".parse::<BoundingBox>().is_err());
        assert!("a,b".parse::<BoundingBox>().is_err());

        let cloud = PointCloud::new(2, vec![1.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, -1.0]).unwrap();
        let (model, _) = fit(&KernelSpec::default(), &cloud, &[1.0; 4], 0.0).unwrap();
        let bbox = BoundingBox::around(&cloud, 0.25).unwrap();
        assert_eq!(bbox.min, vec![-1.5, -1.5]);
        let g = sample_grid(&model, &bbox, 7).unwrap();
        assert_eq!(g.values.len(), 49);
        assert_eq!(g.to_csv().lines().count(), 50);
    }
}
