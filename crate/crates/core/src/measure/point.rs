use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn check_finite<T: Scalar>(coords: &[T]) -> Result<()> {
    if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
        return Err(Error::NonFinite(format!("coordinate {c}")));
    }
    Ok(())
}

/// A location in `R^d`, `d >= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Point<T> {
    coords: Vec<T>,
}

impl<T: Scalar> Point<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Empty("point coordinates"));
        }
        check_finite(&coords)?;
        Ok(Self { coords })
    }

    pub fn origin(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Self {
            coords: vec![T::zero(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }
}

impl<T> AsRef<[T]> for Point<T> {
    fn as_ref(&self) -> &[T] {
        &self.coords
    }
}

/// Borrowed view of one pattern inside a [`PointPattern`] or [`Sample`].
#[derive(Clone, Copy, Debug)]
pub struct PatternView<'a, T> {
    dim: usize,
    coords: &'a [T],
}

impl<'a, T: Scalar> PatternView<'a, T> {
    pub(crate) fn new(dim: usize, coords: &'a [T]) -> Self {
        debug_assert!(dim > 0 && coords.len() % dim == 0);
        Self { dim, coords }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of points `L`.
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, j: usize) -> &'a [T] {
        &self.coords[j * self.dim..(j + 1) * self.dim]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'a, T> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn flat(&self) -> &'a [T] {
        self.coords
    }

    pub fn to_owned(&self) -> PointPattern<T> {
        PointPattern {
            dim: self.dim,
            coords: self.coords.to_vec(),
        }
    }
}

/// One realization: a nonempty list of points of common dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct PointPattern<T> {
    dim: usize,
    coords: Vec<T>,
}

impl<T: Scalar> PointPattern<T> {
    pub fn new(points: Vec<Point<T>>) -> Result<Self> {
        let first = points.first().ok_or(Error::Empty("point pattern"))?;
        let dim = first.dim();
        let mut coords = Vec::with_capacity(dim * points.len());
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            coords.extend_from_slice(p.coords());
        }
        Ok(Self { dim, coords })
    }

    /// Builds a pattern from row-major coordinates.
    pub fn from_flat(dim: usize, coords: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if coords.is_empty() {
            return Err(Error::Empty("point pattern"));
        }
        if coords.len() % dim != 0 {
            return Err(Error::InvalidParameter(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        check_finite(&coords)?;
        Ok(Self { dim, coords })
    }

    /// Pattern of scalar points in `R`.
    pub fn from_scalars(values: &[T]) -> Result<Self> {
        Self::from_flat(1, values.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn view(&self) -> PatternView<'_, T> {
        PatternView {
            dim: self.dim,
            coords: &self.coords,
        }
    }

    pub fn point(&self, j: usize) -> &[T] {
        &self.coords[j * self.dim..(j + 1) * self.dim]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, T> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn flat(&self) -> &[T] {
        &self.coords
    }
}

/// `n` patterns stored contiguously, with `S_n = Σ L_i` and `S_{n,2} = Σ L_i^2` cached.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample<T> {
    dim: usize,
    coords: Vec<T>,
    /// Point offsets: pattern `i` owns points `offsets[i]..offsets[i + 1]`.
    offsets: Vec<usize>,
    s_n: u64,
    s_n2: u64,
}

impl<T: Scalar> Sample<T> {
    pub fn new(patterns: Vec<PointPattern<T>>) -> Result<Self> {
        let mut b = SampleBuilder::new(patterns.first().ok_or(Error::Empty("sample"))?.dim());
        for p in &patterns {
            b.push(p.view())?;
        }
        b.finish()
    }

    /// Sample of `L ≡ 1` patterns in `R`.
    pub fn from_scalars(values: &[T]) -> Result<Self> {
        let mut b = SampleBuilder::new(1);
        for v in values {
            b.push_flat(std::slice::from_ref(v))?;
        }
        b.finish()
    }

    /// Sample of patterns with exactly `k` points each, from row-major coordinates.
    pub fn from_fixed_counts(dim: usize, k: usize, coords: Vec<T>) -> Result<Self> {
        if dim == 0 || k == 0 {
            return Err(Error::InvalidParameter("dimension and count must be positive".into()));
        }
        let per = dim * k;
        if coords.is_empty() || coords.len() % per != 0 {
            return Err(Error::InvalidParameter(format!(
                "{} coordinates do not split into patterns of {k} points in dimension {dim}",
                coords.len()
            )));
        }
        check_finite(&coords)?;
        let n = coords.len() / per;
        let k64 = k as u64;
        Ok(Self {
            dim,
            coords,
            offsets: (0..=n).map(|i| i * k).collect(),
            s_n: n as u64 * k64,
            s_n2: n as u64 * k64 * k64,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn s_n(&self) -> u64 {
        self.s_n
    }

    pub fn s_n2(&self) -> u64 {
        self.s_n2
    }

    /// `S_n / n`, the empirical total mass.
    pub fn ratio(&self) -> T {
        T::from_count(self.s_n) / T::from_count(self.n() as u64)
    }

    pub fn count(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn pattern(&self, i: usize) -> PatternView<'_, T> {
        PatternView {
            dim: self.dim,
            coords: &self.coords[self.offsets[i] * self.dim..self.offsets[i + 1] * self.dim],
        }
    }

    pub fn patterns(&self) -> impl ExactSizeIterator<Item = PatternView<'_, T>> + '_ {
        (0..self.n()).map(move |i| self.pattern(i))
    }

    /// All `S_n` points, pattern by pattern.
    pub fn points(&self) -> std::slice::ChunksExact<'_, T> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn flat(&self) -> &[T] {
        &self.coords
    }

    /// Index of the pattern owning global point `k`.
    pub fn owner_of(&self, k: usize) -> usize {
        self.offsets.partition_point(|&o| o <= k) - 1
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// The first `m` patterns as a new sample.
    pub fn prefix(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.n() {
            return Err(Error::OutOfRange(format!("prefix length {m} of {}", self.n())));
        }
        let mut b = SampleBuilder::new(self.dim);
        for i in 0..m {
            b.push(self.pattern(i))?;
        }
        b.finish()
    }

    /// Applies `f` to every coordinate, keeping the pattern structure.
    pub fn map_coords(&self, mut f: impl FnMut(T) -> T) -> Result<Self> {
        let coords: Vec<T> = self.coords.iter().map(|&c| f(c)).collect();
        check_finite(&coords)?;
        Ok(Self {
            coords,
            ..self.clone()
        })
    }
}

/// Incremental [`Sample`] construction.
#[derive(Debug)]
pub struct SampleBuilder<T> {
    dim: usize,
    coords: Vec<T>,
    offsets: Vec<usize>,
    s_n: u64,
    s_n2: u64,
}

impl<T: Scalar> SampleBuilder<T> {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            coords: Vec::new(),
            offsets: vec![0],
            s_n: 0,
            s_n2: 0,
        }
    }

    pub fn with_capacity(dim: usize, patterns: usize, points: usize) -> Self {
        let mut offsets = Vec::with_capacity(patterns + 1);
        offsets.push(0);
        Self {
            dim,
            coords: Vec::with_capacity(points * dim),
            offsets,
            s_n: 0,
            s_n2: 0,
        }
    }

    pub fn push(&mut self, p: PatternView<'_, T>) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: p.dim(),
            });
        }
        self.push_flat(p.flat())
    }

    /// Appends a pattern given by row-major coordinates.
    pub fn push_flat(&mut self, coords: &[T]) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if coords.is_empty() {
            return Err(Error::Empty("point pattern"));
        }
        if coords.len() % self.dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: coords.len() % self.dim,
            });
        }
        check_finite(coords)?;
        let l = (coords.len() / self.dim) as u64;
        self.coords.extend_from_slice(coords);
        self.offsets.push(self.offsets.last().unwrap() + l as usize);
        self.s_n += l;
        self.s_n2 += l * l;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn finish(self) -> Result<Sample<T>> {
        if self.is_empty() {
            return Err(Error::Empty("sample"));
        }
        Ok(Sample {
            dim: self.dim,
            coords: self.coords,
            offsets: self.offsets,
            s_n: self.s_n,
            s_n2: self.s_n2,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_caches_counts() {
        let a = PointPattern::from_flat(1, vec![0.0]).unwrap();
        let b = PointPattern::from_flat(1, vec![0.1, 0.2, 0.3]).unwrap();
        let s = Sample::new(vec![a, b]).unwrap();
        assert_eq!(s.n(), 2);
        assert_eq!(s.s_n(), 4);
        assert_eq!(s.s_n2(), 10);
        assert_eq!(s.ratio(), 2.0);
        assert_eq!(s.pattern(1).len(), 3);
        assert_eq!(s.owner_of(0), 0);
        assert_eq!(s.owner_of(3), 1);
    }

    #[test]
    fn fixed_count_constructor_matches_builder() {
        let c = vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6];
        let a = Sample::from_fixed_counts(1, 2, c.clone()).unwrap();
        let b = Sample::new(c.chunks(2).map(|p| PointPattern::from_scalars(p).unwrap()).collect()).unwrap();
        assert_eq!(a, b);
        assert!(Sample::from_fixed_counts(2, 2, c).is_err());
    }

    #[test]
    fn rejects_bad_patterns() {
        assert!(PointPattern::<f64>::new(vec![]).is_err());
        assert!(Point::new(vec![f64::NAN]).is_err());
        let p = Point::new(vec![0.0, 1.0]).unwrap();
        let q = Point::new(vec![0.0]).unwrap();
        assert!(matches!(
            PointPattern::new(vec![p, q]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(Sample::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn mixed_dimension_sample_is_rejected() {
        let a = PointPattern::from_flat(1, vec![0.0]).unwrap();
        let b = PointPattern::from_flat(2, vec![0.0, 1.0]).unwrap();
        assert!(Sample::new(vec![a, b]).is_err());
    }
}
