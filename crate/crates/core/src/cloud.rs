use crate::error::{Error, Result};

/// A finite set of distinct points in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    /// Builds a validated cloud: at least one point, finite coordinates,
    /// pairwise distinct.
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        let cloud = Self::new_unchecked_distinct(dim, coords)?;
        if cloud.is_empty() {
            return Err(Error::EmptyCloud);
        }
        cloud.check_distinct()?;
        Ok(cloud)
    }

    /// Like [`PointCloud::new`] but allows an empty cloud and skips the
    /// O(m^2) distinctness scan. Used for evaluation sets, where repeated
    /// points are harmless.
    pub fn new_unchecked_distinct(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::LengthMismatch { expected: coords.len() / dim * dim, got: coords.len() });
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index: i / dim });
        }
        Ok(PointCloud { dim, coords })
    }

    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let dim = points.first().map(|p| p.as_ref().len()).ok_or(Error::EmptyCloud)?;
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            coords.extend_from_slice(p);
        }
        Self::new(dim, coords)
    }

    pub fn empty(dim: usize) -> Self {
        PointCloud { dim, coords: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn map_points(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Result<Self> {
        let mut coords = Vec::with_capacity(self.coords.len());
        for p in self.iter() {
            let q = f(p);
            if q.len() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, got: q.len() });
            }
            coords.extend(q);
        }
        Self::new_unchecked_distinct(self.dim, coords)
    }

    /// Smallest pairwise distance (infinite for a single point).
    pub fn separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for j in 0..self.len() {
            for k in (j + 1)..self.len() {
                best = best.min(distance(self.point(j), self.point(k)));
            }
        }
        best
    }

    fn check_distinct(&self) -> Result<()> {
        // Sort by first coordinate so the scan only compares points that
        // tie on it.
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.point(a).partial_cmp(self.point(b)).unwrap());
        for w in order.windows(2) {
            if self.point(w[0]) == self.point(w[1]) {
                let (first, second) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(Error::DuplicatePoints { first, second });
            }
        }
        Ok(())
    }

    /// Axis-aligned bounding box as `(min, max)` per coordinate.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.iter() {
            for i in 0..self.dim {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        (lo, hi)
    }
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub(crate) fn displacement_into(a: &[f64], b: &[f64], out: &mut [f64]) {
    for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
        *o = x - y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_non_finite() {
        let err = PointCloud::from_points(&[[0.0, 1.0], [2.0, 3.0], [0.0, 1.0]]).unwrap_err();
        assert_eq!(err, Error::DuplicatePoints { first: 0, second: 2 });
        let err = PointCloud::new(2, vec![0.0, f64::NAN]).unwrap_err();
        assert_eq!(err, Error::NonFinite { index: 0 });
        assert_eq!(PointCloud::new(2, vec![]).unwrap_err(), Error::EmptyCloud);
        assert!(PointCloud::new(2, vec![1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn accessors() {
        let c = PointCloud::from_points(&[[0.0, 1.0], [2.0, 3.0]]).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.point(1), &[2.0, 3.0]);
        assert!((c.separation() - 8f64.sqrt()).abs() < 1e-15);
        assert_eq!(c.bounding_box(), (vec![0.0, 1.0], vec![2.0, 3.0]));
    }
}
