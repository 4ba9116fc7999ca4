//! Branching random walks on Galton-Watson trees.
//!
//! A tree is stored flat in breadth-first order. Vertex `0` is the root at the
//! origin; the children of a vertex occupy a contiguous index range, and each
//! child stores its own displacement so child patterns are read off directly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{CountLaw, DisplacementLaw, RngStream};
use crate::measure::{pattern_integral, EvalFunction, PatternView, ReferenceMeasure, Sample, SampleBuilder};
use crate::scalar::{CompensatedSum, Scalar};

pub const DEFAULT_VERTEX_CAP: usize = 10_000_000;

const NO_PARENT: usize = usize::MAX;

/// Ulam-Harris label: the path of child ranks (starting at 1) from the root.
pub type Label = Vec<u32>;

/// One vertex as written to and read from a tree dump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord<T> {
    pub label: Label,
    pub pos: Vec<T>,
    pub disp: Vec<T>,
    pub gen: usize,
}

#[derive(Clone, Debug)]
pub struct BrwTree<T: Scalar> {
    dim: usize,
    /// `gen_start[j]..gen_start[j + 1]` indexes generation `j`.
    gen_start: Vec<usize>,
    parent: Vec<usize>,
    rank: Vec<u32>,
    /// `child_start[i]..child_start[i + 1]` are the children of `i`, for `i` before the last generation.
    child_start: Vec<usize>,
    positions: Vec<T>,
    displacements: Vec<T>,
    count: Option<CountLaw>,
    disp: Option<DisplacementLaw<T>>,
}

/// Grows `depth` generations below the root.
pub fn grow_tree<T: Scalar>(
    count: &CountLaw,
    disp: &DisplacementLaw<T>,
    depth: usize,
    rng: &mut RngStream,
    cap: usize,
) -> Result<BrwTree<T>> {
    count.validate()?;
    if depth < 1 {
        return Err(Error::InvalidParameter("tree depth must be at least 1".into()));
    }
    let d = disp.dim();
    let mut t = BrwTree {
        dim: d,
        gen_start: vec![0, 1],
        parent: vec![NO_PARENT],
        rank: vec![0],
        child_start: vec![1],
        positions: vec![T::zero(); d],
        displacements: vec![T::zero(); d],
        count: Some(count.clone()),
        disp: Some(disp.clone()),
    };
    let mut buf = Vec::with_capacity(d);
    for j in 0..depth {
        let (a, b) = (t.gen_start[j], t.gen_start[j + 1]);
        for v in a..b {
            let l = count.sample(rng) as usize;
            if t.parent.len() + l > cap {
                let mut sizes = t.generation_sizes();
                sizes.push(t.parent.len() - b);
                return Err(Error::CapExceeded {
                    cap,
                    generation: j + 1,
                    generation_sizes: sizes,
                });
            }
            for r in 0..l {
                buf.clear();
                disp.sample_into(rng, &mut buf);
                for k in 0..d {
                    let p = t.positions[v * d + k] + buf[k];
                    t.positions.push(p);
                }
                t.displacements.extend_from_slice(&buf);
                t.parent.push(v);
                t.rank.push(r as u32 + 1);
            }
            t.child_start.push(t.parent.len());
        }
        t.gen_start.push(t.parent.len());
    }
    Ok(t)
}

impl<T: Scalar> BrwTree<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Index of the last generation `J`.
    pub fn depth(&self) -> usize {
        self.gen_start.len() - 2
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn count_law(&self) -> Option<&CountLaw> {
        self.count.as_ref()
    }

    pub fn displacement_law(&self) -> Option<&DisplacementLaw<T>> {
        self.disp.as_ref()
    }

    pub fn generation_size(&self, j: usize) -> usize {
        self.gen_start[j + 1] - self.gen_start[j]
    }

    pub fn generation_sizes(&self) -> Vec<usize> {
        self.gen_start.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Breadth-first index range of generation `j`.
    pub fn generation(&self, j: usize) -> std::ops::Range<usize> {
        self.gen_start[j]..self.gen_start[j + 1]
    }

    pub fn generation_of(&self, i: usize) -> usize {
        self.gen_start.partition_point(|&s| s <= i) - 1
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        (self.parent[i] != NO_PARENT).then_some(self.parent[i])
    }

    pub fn position(&self, i: usize) -> &[T] {
        &self.positions[i * self.dim..(i + 1) * self.dim]
    }

    /// Displacement from the parent; zero at the root.
    pub fn displacement(&self, i: usize) -> &[T] {
        &self.displacements[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, mut i: usize) -> Label {
        let mut out = Vec::new();
        while self.parent[i] != NO_PARENT {
            out.push(self.rank[i]);
            i = self.parent[i];
        }
        out.reverse();
        out
    }

    /// Breadth-first index of a label.
    pub fn find(&self, label: &[u32]) -> Option<usize> {
        let mut i = 0;
        for &r in label {
            let c = self.children(i).ok()?;
            if r == 0 || r as usize > c.len() {
                return None;
            }
            i = c.start + r as usize - 1;
        }
        Some(i)
    }

    pub fn children(&self, i: usize) -> Result<std::ops::Range<usize>> {
        if i >= self.len() {
            return Err(Error::OutOfRange(format!("vertex {i} of {}", self.len())));
        }
        if i + 1 >= self.child_start.len() {
            return Err(Error::OutOfRange(format!(
                "vertex {i} is in the last generation; its children are unobserved"
            )));
        }
        Ok(self.child_start[i]..self.child_start[i + 1])
    }

    pub fn offspring(&self, i: usize) -> Result<usize> {
        Ok(self.children(i)?.len())
    }

    /// `Y_v`, the child displacements of vertex `i`, as a borrowed pattern.
    pub fn pattern(&self, i: usize) -> Result<PatternView<'_, T>> {
        let c = self.children(i)?;
        Ok(PatternView::new(self.dim, &self.displacements[c.start * self.dim..c.end * self.dim]))
    }

    pub fn vertex_pattern(&self, label: &[u32]) -> Result<crate::measure::PointPattern<T>> {
        let i = self
            .find(label)
            .ok_or_else(|| Error::OutOfRange(format!("no vertex with label {label:?}")))?;
        Ok(self.pattern(i)?.to_owned())
    }

    fn check_estimator_generation(&self, j: usize) -> Result<()> {
        if j >= self.depth() {
            return Err(Error::OutOfRange(format!(
                "generation {j} needs observed children, tree depth is {}",
                self.depth()
            )));
        }
        Ok(())
    }

    fn pattern_sum(&self, range: std::ops::Range<usize>, f: &EvalFunction<T>) -> Result<T> {
        let mut s = CompensatedSum::new();
        for i in range {
            s.add(pattern_integral(self.pattern(i)?, f)?);
        }
        Ok(s.value())
    }

    /// `(1/|V_j|) Σ_{v ∈ V_j} Y_v(f)`.
    pub fn lotka_nagaev(&self, j: usize, f: &EvalFunction<T>) -> Result<T> {
        self.check_estimator_generation(j)?;
        let r = self.generation(j);
        let n = T::from_count(r.len() as u64);
        Ok(self.pattern_sum(r, f)? / n)
    }

    /// `(1/T_j) Σ_{i ≤ T_j} Y_{v_i}(f)` over the first `T_j = |V_0| + … + |V_j|` vertices.
    pub fn harris(&self, j: usize, f: &EvalFunction<T>) -> Result<T> {
        self.check_estimator_generation(j)?;
        let t = self.gen_start[j + 1];
        Ok(self.pattern_sum(0..t, f)? / T::from_count(t as u64))
    }

    /// Number of vertices in generations `0..=j`.
    pub fn harris_count(&self, j: usize) -> usize {
        self.gen_start[j + 1]
    }

    /// Patterns of generation `j` as an i.i.d.-style sample.
    pub fn generation_sample(&self, j: usize) -> Result<Sample<T>> {
        self.check_estimator_generation(j)?;
        self.collect(self.generation(j))
    }

    /// Patterns of the first `T_j` vertices in breadth-first order.
    pub fn harris_sample(&self, j: usize) -> Result<Sample<T>> {
        self.check_estimator_generation(j)?;
        self.collect(0..self.gen_start[j + 1])
    }

    fn collect(&self, r: std::ops::Range<usize>) -> Result<Sample<T>> {
        let mut b = SampleBuilder::with_capacity(self.dim, r.len(), self.child_start[r.end] - self.child_start[r.start]);
        for i in r {
            b.push(self.pattern(i)?)?;
        }
        b.finish()
    }

    fn observed_range(&self) -> (T, T) {
        let stop = self.child_start[self.child_start.len() - 1];
        self.displacements[self.dim..stop * self.dim]
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &x| (lo.min(x), hi.max(x)))
    }

    /// `(m̂_j(θ), m̃_j(θ))`: both estimators applied to `x ↦ e^{θx}`.
    pub fn laplace_estimates(&self, j: usize, theta: T) -> Result<(T, T)> {
        if self.dim != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: self.dim,
            });
        }
        self.check_estimator_generation(j)?;
        let (lo, hi) = self.observed_range();
        let f = EvalFunction::exponential(theta, lo, hi)?;
        Ok((self.lotka_nagaev(j, &f)?, self.harris(j, &f)?))
    }

    /// `w^{1/2} (μ̂_j(f) − μ(f))` per function, with `w = |V_j|`, or `w = T_j`
    /// and the Harris estimator when `harris` is set.
    pub fn normalized_fluctuations(
        &self,
        j: usize,
        fs: &[EvalFunction<T>],
        r: &ReferenceMeasure<T>,
        harris: bool,
    ) -> Result<Vec<T>> {
        self.check_estimator_generation(j)?;
        let w = if harris { self.harris_count(j) } else { self.generation_size(j) };
        let root = T::from_count(w as u64).sqrt();
        fs.iter()
            .map(|f| {
                let est = if harris { self.harris(j, f)? } else { self.lotka_nagaev(j, f)? };
                Ok(root * (est - r.mass(f)?))
            })
            .collect()
    }

    pub fn records(&self) -> impl Iterator<Item = VertexRecord<T>> + '_ {
        (0..self.len()).map(move |i| VertexRecord {
            label: self.label(i),
            pos: self.position(i).to_vec(),
            disp: self.displacement(i).to_vec(),
            gen: self.generation_of(i),
        })
    }

    /// Rebuilds a tree from breadth-first vertex records, checking labels,
    /// generation structure and the position recursion.
    pub fn from_records(records: &[VertexRecord<T>]) -> Result<Self> {
        let root = records.first().ok_or(Error::Empty("tree dump"))?;
        let d = root.pos.len();
        if d == 0 {
            return Err(Error::InvalidParameter("zero-dimensional positions".into()));
        }
        if !root.label.is_empty() || root.gen != 0 || root.pos.iter().chain(&root.disp).any(|c| *c != T::zero()) {
            return Err(Error::InvalidParameter("first record must be the root at the origin".into()));
        }
        let mut t = BrwTree {
            dim: d,
            gen_start: vec![0],
            parent: Vec::with_capacity(records.len()),
            rank: Vec::with_capacity(records.len()),
            child_start: vec![],
            positions: Vec::with_capacity(records.len() * d),
            displacements: Vec::with_capacity(records.len() * d),
            count: None,
            disp: None,
        };
        let mut p = 0usize;
        for (i, rec) in records.iter().enumerate() {
            let bad = |m: String| Error::Parse { line: i + 1, message: m };
            if rec.pos.len() != d || rec.disp.len() != d {
                return Err(bad("dimension mismatch".into()));
            }
            if rec.label.len() != rec.gen {
                return Err(bad(format!("label {:?} does not match generation {}", rec.label, rec.gen)));
            }
            if i == 0 {
                t.parent.push(NO_PARENT);
                t.rank.push(0);
            } else {
                let plabel = &rec.label[..rec.label.len() - 1];
                while p < i && records[p].label != plabel {
                    if t.child_start.len() == p {
                        t.child_start.push(i);
                    }
                    p += 1;
                }
                if p >= i {
                    return Err(bad(format!("parent of {:?} not found in breadth-first order", rec.label)));
                }
                if t.child_start.len() == p {
                    t.child_start.push(i);
                }
                let rank = *rec.label.last().unwrap();
                let expected = (i - t.child_start[p]) as u32 + 1;
                if rank != expected {
                    return Err(bad(format!("child rank {rank}, expected {expected}")));
                }
                if rec.gen == t.gen_start.len() {
                    t.gen_start.push(i);
                }
                let g = rec.gen as f64;
                for k in 0..d {
                    let want = t.positions[p * d + k] + rec.disp[k];
                    let err = (rec.pos[k] - want).f64().abs();
                    if !(err <= 1e-12 * g * want.f64().abs().max(1.0)) {
                        return Err(bad(format!("position recursion broken at coordinate {k}")));
                    }
                }
                t.parent.push(p);
                t.rank.push(rank);
            }
            t.positions.extend_from_slice(&rec.pos);
            t.displacements.extend_from_slice(&rec.disp);
        }
        let n = records.len();
        t.gen_start.push(n);
        let last = t.depth();
        if last == 0 {
            return Err(Error::InvalidParameter("tree dump has no generation below the root".into()));
        }
        let inner = t.gen_start[last];
        while t.child_start.len() <= inner {
            t.child_start.push(n);
        }
        for v in 0..inner {
            if t.child_start[v + 1] <= t.child_start[v] {
                return Err(Error::InvalidParameter(format!(
                    "vertex {:?} before the last generation has no children",
                    records[v].label
                )));
            }
        }
        Ok(t)
    }
}

/// `m(θ) = E[L] E[e^{θX}]`.
pub fn true_laplace<T: Scalar>(count: &CountLaw, disp: &DisplacementLaw<T>, theta: T) -> Result<T> {
    Ok(T::lit(count.mean()) * disp.mgf(theta)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{reference_for, sample_count};
    use approx::assert_relative_eq;

    fn rng() -> RngStream {
        RngStream::new(7, 0)
    }

    #[test]
    fn binary_tree_sizes() {
        let t: BrwTree<f64> =
            grow_tree(&CountLaw::fixed(2).unwrap(), &DisplacementLaw::unit_cube(1), 3, &mut rng(), 100).unwrap();
        assert_eq!(t.generation_sizes(), vec![1, 2, 4, 8]);
        assert_eq!(t.label(0), Vec::<u32>::new());
        assert_eq!(t.label(14), vec![2, 2, 2]);
        assert_eq!(t.find(&[2, 1]), Some(5));
        for j in 0..3 {
            assert_eq!(t.lotka_nagaev(j, &EvalFunction::Constant(1.0)).unwrap(), 2.0);
            assert_eq!(t.harris(j, &EvalFunction::Constant(1.0)).unwrap(), 2.0);
        }
        assert!(t.lotka_nagaev(3, &EvalFunction::Constant(1.0)).is_err());
        assert!(t.pattern(7).is_err());
        assert_eq!(t.vertex_pattern(&[]).unwrap().len(), 2);
    }

    #[test]
    fn path_tree() {
        let disp = DisplacementLaw::point_mass(vec![1.0]).unwrap();
        let t: BrwTree<f64> = grow_tree(&CountLaw::fixed(1).unwrap(), &disp, 5, &mut rng(), 100).unwrap();
        assert_eq!(t.len(), 6);
        assert_eq!(t.position(5), &[5.0]);
        assert_eq!(t.vertex_pattern(&[]).unwrap().flat(), &[1.0]);
        let (m, h) = t.laplace_estimates(2, 0.7).unwrap();
        assert_relative_eq!(m, 0.7f64.exp(), max_relative = 1e-15);
        assert_relative_eq!(h, m, max_relative = 1e-15);
    }

    #[test]
    fn cap_is_enforced() {
        let e = grow_tree::<f64>(&CountLaw::fixed(2).unwrap(), &DisplacementLaw::unit_cube(1), 10, &mut rng(), 50)
            .unwrap_err();
        match e {
            Error::CapExceeded { cap, generation, generation_sizes } => {
                assert_eq!(cap, 50);
                assert_eq!(generation, 5);
                assert_eq!(&generation_sizes[..5], &[1, 2, 4, 8, 16]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_displacement_laplace() {
        let disp = DisplacementLaw::point_mass(vec![0.0]).unwrap();
        let t: BrwTree<f64> = grow_tree(&CountLaw::fixed(2).unwrap(), &disp, 3, &mut rng(), 100).unwrap();
        assert_eq!(t.laplace_estimates(1, 3.0).unwrap(), (2.0, 2.0));
        let r = reference_for(&CountLaw::fixed(2).unwrap(), &disp).unwrap();
        let w = t.normalized_fluctuations(1, &[EvalFunction::Constant(1.0)], &r, false).unwrap();
        assert_eq!(w, vec![0.0]);
    }

    #[test]
    fn true_laplace_closed_forms() {
        let u = DisplacementLaw::unit_cube(1);
        assert_relative_eq!(
            true_laplace(&CountLaw::fixed(2).unwrap(), &u, 1.0).unwrap(),
            2.0 * (1.0f64.exp() - 1.0),
            max_relative = 1e-14
        );
        let g = DisplacementLaw::gaussian(vec![0.0], vec![1.0]).unwrap();
        assert_relative_eq!(
            true_laplace(&CountLaw::fixed(1).unwrap(), &g, 1.0).unwrap(),
            0.5f64.exp(),
            max_relative = 1e-14
        );
        let sp = CountLaw::shifted_poisson(1.5).unwrap();
        assert_eq!(true_laplace(&sp, &g, 0.0).unwrap(), 2.5);
    }

    #[test]
    fn random_tree_estimators_match_samples() {
        let count = CountLaw::shifted_poisson(1.0).unwrap();
        let disp = DisplacementLaw::unit_cube(1);
        let t: BrwTree<f64> = grow_tree(&count, &disp, 6, &mut rng(), DEFAULT_VERTEX_CAP).unwrap();
        let f = EvalFunction::below(0.4);
        for j in 0..6 {
            let s = t.generation_sample(j).unwrap();
            assert_eq!(t.lotka_nagaev(j, &f).unwrap(), crate::measure::empirical_intensity(&s, &f).unwrap());
            let h = t.harris_sample(j).unwrap();
            assert_relative_eq!(
                t.harris(j, &f).unwrap(),
                crate::measure::empirical_intensity(&h, &f).unwrap(),
                max_relative = 1e-14
            );
            let sizes = t.generation_sizes();
            assert_eq!(sizes[j + 1], (t.generation(j)).map(|v| t.offspring(v).unwrap()).sum::<usize>());
        }
        let _ = sample_count(&count, &mut rng());
    }

    #[test]
    fn records_round_trip() {
        let count = CountLaw::pmf(vec![0.0, 0.5, 0.3, 0.2]).unwrap();
        let disp = DisplacementLaw::gaussian(vec![0.0, 1.0], vec![1.0, 2.0]).unwrap();
        let t: BrwTree<f64> = grow_tree(&count, &disp, 4, &mut rng(), 10_000).unwrap();
        let recs: Vec<_> = t.records().collect();
        let u = BrwTree::from_records(&recs).unwrap();
        assert_eq!(u.generation_sizes(), t.generation_sizes());
        assert_eq!(u.records().collect::<Vec<_>>(), recs);
        let mut broken = recs.clone();
        broken[3].pos[0] += 1e-3;
        assert!(BrwTree::from_records(&broken).is_err());
        let mut bad_rank = recs;
        bad_rank[2].label = vec![7];
        assert!(BrwTree::from_records(&bad_rank).is_err());
    }
}
