//! Half-space (Tukey) depth of finite measures.
//!
//! `D(x, μ) = inf_u μ{y : <y, u> <= <x, u>}` over unit `u`. Exact for atomic
//! measures in one and two dimensions, by projection cdfs for analytic
//! measures, and by direction sampling otherwise.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::generators::RngStream;
use crate::measure::{directions::direction, golden_max, Point, ReferenceMeasure, Sample};
use crate::scalar::{dot, Scalar};

const UNIT_TOL: f64 = 1e-9;
const PROJ_TOL: f64 = 1e-12;
const TIE_TOL: f64 = 1e-8;

/// A finite measure `Σ_i (w_i / scale) δ_{y_i}`.
///
/// Integer-valued weights keep every half-space count exact; division by
/// `scale` happens only when a mass is reported.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPoints<T> {
    dim: usize,
    coords: Vec<T>,
    weights: Vec<T>,
    scale: T,
}

impl<T: Scalar> WeightedPoints<T> {
    pub fn new(dim: usize, coords: Vec<T>, weights: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if coords.len() != dim * weights.len() {
            return Err(Error::DimensionMismatch {
                expected: dim * weights.len(),
                found: coords.len(),
            });
        }
        if coords.iter().chain(&weights).any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("weighted points".into()));
        }
        if weights.iter().any(|w| *w < T::zero()) {
            return Err(Error::InvalidParameter("negative weight".into()));
        }
        Ok(Self {
            dim,
            coords,
            weights,
            scale: T::one(),
        })
    }

    /// Same points with every mass divided by `scale`.
    pub fn with_scale(mut self, scale: T) -> Result<Self> {
        if !(scale > T::zero()) || !scale.is_finite() {
            return Err(Error::InvalidParameter(format!("mass scale {scale}")));
        }
        self.scale = scale;
        Ok(self)
    }

    /// The empirical intensity measure: unit weight per point, scale `n`.
    pub fn from_sample(s: &Sample<T>) -> Self {
        Self {
            dim: s.dim(),
            coords: s.flat().to_vec(),
            weights: vec![T::one(); s.s_n() as usize],
            scale: T::from_count(s.n() as u64),
        }
    }

    /// Atomic references as weighted points; `None` for continuous ones.
    pub fn from_reference(r: &ReferenceMeasure<T>) -> Option<Self> {
        if let ReferenceMeasure::Empirical(s) = r {
            return Some(Self::from_sample(s));
        }
        let atoms = r.atoms()?;
        let mut coords = Vec::with_capacity(atoms.len() * r.dim());
        let mut weights = Vec::with_capacity(atoms.len());
        for (p, w) in atoms {
            coords.extend_from_slice(p);
            weights.push(w);
        }
        Self::new(r.dim(), coords, weights).ok()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> T {
        self.weights[i]
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn total_mass(&self) -> T {
        self.weights.iter().fold(T::zero(), |a, &w| a + w) / self.scale
    }

    /// Multiplies every mass by `c`.
    pub fn rescaled(&self, c: T) -> Result<Self> {
        self.clone().with_scale(self.scale / c)
    }

    fn coord_scale(&self, x: &[T]) -> f64 {
        self.coords
            .iter()
            .chain(x)
            .fold(1.0f64, |m, c| m.max(c.f64().abs()))
    }

    /// Raw weight in the closed half-space at `x` with normal `u`, before scaling.
    fn raw_mass(&self, x: &[T], u: &[f64], tol: f64) -> T {
        let c: f64 = x.iter().zip(u).map(|(a, b)| a.f64() * b).sum();
        let mut s = T::zero();
        for i in 0..self.len() {
            let p: f64 = self.point(i).iter().zip(u).map(|(a, b)| a.f64() * b).sum();
            if p <= c + tol {
                s += self.weights[i];
            }
        }
        s
    }
}

/// Depth value with a minimizing direction.
#[derive(Clone, Debug, PartialEq)]
pub struct DepthResult<T> {
    pub depth: T,
    pub direction: Vec<T>,
    pub exact: bool,
    /// Number of distinct minimizing directions found, clustered at `1e-8` rad.
    pub tie_count: usize,
}

/// Depth evaluation method.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepthMethod {
    Exact1d,
    Exact2d,
    DirectionSampling(usize),
    Oracle,
}

fn check_unit<T: Scalar>(u: &[T]) -> Result<()> {
    let n = dot(u, u).sqrt().f64();
    if !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnitVector { norm: n });
    }
    Ok(())
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `μ(H_{x,u})` for the closed half-space `{y : <y, u> <= <x, u>}`.
pub fn halfspace_mass<T: Scalar>(measure: &ReferenceMeasure<T>, x: &[T], u: &[T]) -> Result<T> {
    check_dim(measure.dim(), x.len())?;
    check_dim(measure.dim(), u.len())?;
    check_unit(u)?;
    Ok(mass_unchecked(measure, x, u))
}

fn mass_unchecked<T: Scalar>(measure: &ReferenceMeasure<T>, x: &[T], u: &[T]) -> T {
    if let Some(wp) = WeightedPoints::from_reference(measure) {
        return wp_mass(&wp, x, u);
    }
    measure.projected_mass(u, dot(x, u), false)
}

/// Closed half-space mass of weighted points, with projection tolerance `1e-12 · coordinate scale`.
pub fn weighted_halfspace_mass<T: Scalar>(wp: &WeightedPoints<T>, x: &[T], u: &[T]) -> Result<T> {
    check_dim(wp.dim(), x.len())?;
    check_dim(wp.dim(), u.len())?;
    check_unit(u)?;
    Ok(wp_mass(wp, x, u))
}

fn wp_mass<T: Scalar>(wp: &WeightedPoints<T>, x: &[T], u: &[T]) -> T {
    let uf: Vec<f64> = u.iter().map(|c| c.f64()).collect();
    wp.raw_mass(x, &uf, PROJ_TOL * wp.coord_scale(x)) / wp.scale
}

/// Depth in `R` from the two closed half-lines at `x`.
pub fn depth_1d<T: Scalar>(measure: &ReferenceMeasure<T>, x: T) -> Result<DepthResult<T>> {
    check_dim(1, measure.dim())?;
    let up = mass_unchecked(measure, &[x], &[T::one()]);
    let down = mass_unchecked(measure, &[x], &[-T::one()]);
    let (depth, dir) = if down < up { (down, -T::one()) } else { (up, T::one()) };
    Ok(DepthResult {
        depth,
        direction: vec![dir],
        exact: true,
        tie_count: if up == down { 2 } else { 1 },
    })
}

#[inline]
fn half(v: [f64; 2]) -> u8 {
    if v[1] > 0.0 || (v[1] == 0.0 && v[0] > 0.0) {
        0
    } else {
        1
    }
}

#[inline]
fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Orders nonzero vectors by polar angle in `[0, 2π)` without trigonometry.
fn angle_cmp(a: [f64; 2], b: [f64; 2]) -> Ordering {
    half(a).cmp(&half(b)).then_with(|| 0.0.partial_cmp(&cross(a, b)).unwrap_or(Ordering::Equal))
}

/// A direction strictly inside the counterclockwise gap from `a` to `b`.
fn gap_bisector(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    let c = cross(a, b);
    if c > 0.0 {
        [a[0] + b[0], a[1] + b[1]]
    } else if c < 0.0 {
        [-(a[0] + b[0]), -(a[1] + b[1])]
    } else if a[0] * b[0] + a[1] * b[1] < 0.0 {
        [-a[1], a[0]]
    } else {
        // the gap is the full turn
        [-a[0], -a[1]]
    }
}

fn unit(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

/// Exact Tukey depth in `R^2` by an angular sweep of the normal around `x`.
///
/// A point `y ≠ x` lies in the closed half-plane with normal `u` exactly when
/// `<y - x, u> <= 0`, which holds on a closed half-turn of normal angles. The
/// closed count at a boundary angle dominates both neighbouring open cells, so
/// the infimum is the mass at `x` plus the smallest open-cell count.
pub fn depth_2d_exact<T: Scalar>(wp: &WeightedPoints<T>, x: &[T]) -> Result<DepthResult<T>> {
    check_dim(2, wp.dim())?;
    check_dim(2, x.len())?;
    let xs = [x[0].f64(), x[1].f64()];
    let tol = PROJ_TOL * wp.coord_scale(x);
    let mut at_x = T::zero();
    // (direction, weight, entering)
    let mut events: Vec<([f64; 2], T, bool)> = Vec::with_capacity(2 * wp.len());
    let mut others: Vec<([f64; 2], T)> = Vec::new();
    for i in 0..wp.len() {
        let p = wp.point(i);
        let v = [p[0].f64() - xs[0], p[1].f64() - xs[1]];
        let w = wp.weight(i);
        if w == T::zero() {
            continue;
        }
        if v[0].abs() <= tol && v[1].abs() <= tol {
            at_x += w;
            continue;
        }
        events.push(([-v[1], v[0]], w, true));
        events.push(([v[1], -v[0]], w, false));
        others.push((v, w));
    }
    if events.is_empty() {
        return Ok(DepthResult {
            depth: at_x / wp.scale,
            direction: vec![T::one(), T::zero()],
            exact: true,
            tie_count: 0,
        });
    }
    events.sort_by(|a, b| angle_cmp(a.0, b.0));
    // Groups of equal directions: (direction, entering weight, leaving weight).
    let mut groups: Vec<([f64; 2], T, T)> = Vec::new();
    for &(d, w, enter) in &events {
        match groups.last_mut() {
            Some(g) if angle_cmp(g.0, d) == Ordering::Equal => {
                if enter {
                    g.1 += w
                } else {
                    g.2 += w
                }
            }
            _ => groups.push(if enter { (d, w, T::zero()) } else { (d, T::zero(), w) }),
        }
    }
    let k = groups.len();
    let b0 = gap_bisector(groups[k - 1].0, groups[0].0);
    let mut c = T::zero();
    for &(v, w) in &others {
        if v[0] * b0[0] + v[1] * b0[1] < 0.0 {
            c += w;
        }
    }
    // cells[j] is the open arc after group j - 1 (cyclically)
    let mut cells: Vec<T> = Vec::with_capacity(k);
    cells.push(c);
    for g in groups.iter().take(k - 1) {
        c = c + g.1 - g.2;
        cells.push(c);
    }
    let min = cells.iter().cloned().fold(T::infinity(), T::min);
    let bis = |j: usize| {
        let prev = if j == 0 { k - 1 } else { j - 1 };
        unit(gap_bisector(groups[prev].0, groups[j].0))
    };
    let mut angles: Vec<f64> = (0..k)
        .filter(|&j| cells[j] == min)
        .map(|j| {
            let b = bis(j);
            b[1].atan2(b[0]).rem_euclid(TAU)
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    let mut ties = 0;
    for i in 0..angles.len() {
        let prev = if i == 0 { angles[angles.len() - 1] - TAU } else { angles[i - 1] };
        if angles.len() == 1 || angles[i] - prev > TIE_TOL {
            ties += 1;
        }
    }
    let jmin = (0..k).find(|&j| cells[j] == min).unwrap();
    let b = bis(jmin);
    Ok(DepthResult {
        depth: (at_x + min) / wp.scale,
        direction: vec![T::lit(b[0]), T::lit(b[1])],
        exact: true,
        tie_count: ties.max(1),
    })
}

fn rotate2(v: [f64; 2], a: f64) -> [f64; 2] {
    let (s, c) = a.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

/// Normals of hyperplanes through `x` and `d - 1` of the points, each nudged
/// off the hyperplane to both sides by `1e-7` rotations.
fn perturbed_normals<T: Scalar>(wp: &WeightedPoints<T>, x: &[T]) -> Vec<Vec<f64>> {
    const EPS: f64 = 1e-7;
    let xs: Vec<f64> = x.iter().map(|c| c.f64()).collect();
    let diffs: Vec<Vec<f64>> = (0..wp.len())
        .map(|i| wp.point(i).iter().zip(&xs).map(|(a, b)| a.f64() - b).collect::<Vec<f64>>())
        .filter(|v| v.iter().any(|c| *c != 0.0))
        .collect();
    let mut out = Vec::new();
    match wp.dim() {
        1 => {
            out.push(vec![1.0]);
            out.push(vec![-1.0]);
        }
        2 => {
            for v in &diffs {
                let n = unit([-v[1], v[0]]);
                for base in [n, [-n[0], -n[1]]] {
                    for a in [EPS, -EPS] {
                        let r = rotate2(base, a);
                        out.push(vec![r[0], r[1]]);
                    }
                }
            }
        }
        3 => {
            for i in 0..diffs.len() {
                for j in i + 1..diffs.len() {
                    let (a, b) = (&diffs[i], &diffs[j]);
                    let n = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
                    let nn = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
                    if nn <= 1e-14 * (norm3(a) * norm3(b)).max(1e-300) {
                        continue;
                    }
                    let n = [n[0] / nn, n[1] / nn, n[2] / nn];
                    // orthonormal basis of the plane spanned by a and b
                    let e1 = scale3(a, 1.0 / norm3(a));
                    let e2 = [n[1] * e1[2] - n[2] * e1[1], n[2] * e1[0] - n[0] * e1[2], n[0] * e1[1] - n[1] * e1[0]];
                    for sign in [1.0, -1.0] {
                        for s1 in [EPS, -EPS] {
                            for s2 in [EPS, -EPS] {
                                let mut v: Vec<f64> = (0..3).map(|k| sign * n[k] + s1 * e1[k] + s2 * e2[k]).collect();
                                let vn = norm3(&v);
                                v.iter_mut().for_each(|c| *c /= vn);
                                out.push(v);
                            }
                        }
                    }
                }
            }
        }
        _ => {}
    }
    out
}

fn norm3(v: &[f64]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn scale3(v: &[f64], s: f64) -> [f64; 3] {
    [v[0] * s, v[1] * s, v[2] * s]
}

/// Brute-force depth used as an independent check: perturbed hyperplane
/// normals through `x` plus `10^5` pseudo-random directions.
pub fn depth_oracle<T: Scalar>(wp: &WeightedPoints<T>, x: &[T]) -> Result<T> {
    check_dim(wp.dim(), x.len())?;
    if wp.dim() > 3 || wp.len() > 200 {
        return Err(Error::OutOfRange(format!(
            "oracle limited to d <= 3 and 200 points, got d = {} and {} points",
            wp.dim(),
            wp.len()
        )));
    }
    let tol = PROJ_TOL * wp.coord_scale(x);
    let mut best = T::infinity();
    for u in perturbed_normals(wp, x) {
        best = best.min(wp.raw_mass(x, &u, tol));
    }
    let mut rng = RngStream::new(0x0DEC_0DE5, wp.len() as u64);
    let d = wp.dim();
    let mut u = vec![0.0; d];
    for _ in 0..100_000 {
        if d == 1 {
            u[0] = if rng.random::<bool>() { 1.0 } else { -1.0 };
        } else {
            for c in u.iter_mut() {
                *c = StandardNormal.sample(&mut rng);
            }
            let n = u.iter().map(|c| c * c).sum::<f64>().sqrt();
            u.iter_mut().for_each(|c| *c /= n);
        }
        best = best.min(wp.raw_mass(x, &u, tol));
    }
    Ok(best / wp.scale)
}

/// Upper bound on the depth from `k` low-discrepancy directions, plus the
/// perturbed point normals when the measure has at most 64 atoms.
pub fn depth_approx<T: Scalar>(measure: &ReferenceMeasure<T>, x: &[T], k: usize) -> Result<DepthResult<T>> {
    let d = measure.dim();
    check_dim(d, x.len())?;
    if k == 0 {
        return Err(Error::InvalidParameter("need at least one direction".into()));
    }
    let wp = WeightedPoints::from_reference(measure);
    let mut dirs: Vec<Vec<f64>> = (0..k as u64).map(|i| direction(d, i)).collect();
    if let Some(wp) = &wp {
        if wp.len() <= 64 && d <= 3 {
            dirs.extend(perturbed_normals(wp, x));
        }
    }
    let eval = |u: &[f64]| -> T {
        match &wp {
            Some(wp) => wp.raw_mass(x, u, PROJ_TOL * wp.coord_scale(x)) / wp.scale,
            None => {
                let ut: Vec<T> = u.iter().map(|&c| T::lit(c)).collect();
                measure.projected_mass(&ut, dot(x, &ut), false)
            }
        }
    };
    let mut best = T::infinity();
    let mut arg = 0;
    let mut ties = 0;
    for (i, u) in dirs.iter().enumerate() {
        let m = eval(u);
        if m < best {
            best = m;
            arg = i;
            ties = 1;
        } else if m == best {
            ties += 1;
        }
    }
    Ok(DepthResult {
        depth: best,
        direction: dirs[arg].iter().map(|&c| T::lit(c)).collect(),
        exact: false,
        tie_count: ties,
    })
}

/// Depth of `x` under a continuous measure in `R^2`: a 720-angle grid refined by golden section.
pub fn depth_2d_analytic<T: Scalar>(measure: &ReferenceMeasure<T>, x: &[T]) -> Result<DepthResult<T>> {
    check_dim(2, measure.dim())?;
    check_dim(2, x.len())?;
    let h = |phi: f64| -> f64 {
        let (s, c) = phi.sin_cos();
        let u = [T::lit(c), T::lit(s)];
        measure.projected_mass(&u, dot(x, &u), false).f64()
    };
    let n = 720;
    let vals: Vec<f64> = (0..n).map(|i| h(TAU * i as f64 / n as f64)).collect();
    let i = (0..n).min_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b))).unwrap();
    let step = TAU / n as f64;
    let c = TAU * i as f64 / n as f64;
    let (t, v) = golden_max(|p| -h(p), c - step, c + step, 1e-12);
    let (phi, depth) = if -v < vals[i] { (t, -v) } else { (c, vals[i]) };
    Ok(DepthResult {
        depth: T::lit(depth.max(0.0)),
        direction: vec![T::lit(phi.cos()), T::lit(phi.sin())],
        exact: false,
        tie_count: 1,
    })
}

/// Depth by the best available method for the measure and dimension.
pub fn depth<T: Scalar>(measure: &ReferenceMeasure<T>, x: &[T]) -> Result<DepthResult<T>> {
    match measure.dim() {
        1 => depth_1d(measure, x[0]),
        2 => match WeightedPoints::from_reference(measure) {
            Some(wp) => depth_2d_exact(&wp, x),
            None => depth_2d_analytic(measure, x),
        },
        _ => depth_approx(measure, x, 4096),
    }
}

/// Maximizer of the depth over the box `[lo, hi]`: grid search, then a
/// Nelder-Mead refinement started from the best grid point.
pub fn deepest_point<T: Scalar>(
    measure: &ReferenceMeasure<T>,
    lo: &[T],
    hi: &[T],
    grid: usize,
) -> Result<(Point<T>, T)> {
    let d = measure.dim();
    check_dim(d, lo.len())?;
    check_dim(d, hi.len())?;
    if d > 3 {
        return Err(Error::OutOfRange("deepest point search needs d <= 3".into()));
    }
    if grid == 0 || lo.iter().zip(hi).any(|(a, b)| !(a <= b)) {
        return Err(Error::Empty("search region"));
    }
    let eval_depth = |x: &[f64]| -> f64 {
        let xt: Vec<T> = x.iter().map(|&c| T::lit(c)).collect();
        match d {
            3 => depth_approx(measure, &xt, 512).map(|r| r.depth.f64()).unwrap_or(0.0),
            _ => depth(measure, &xt).map(|r| r.depth.f64()).unwrap_or(0.0),
        }
    };
    let lof: Vec<f64> = lo.iter().map(|c| c.f64()).collect();
    let hif: Vec<f64> = hi.iter().map(|c| c.f64()).collect();
    let axis = |k: usize, i: usize| -> f64 {
        if grid == 1 {
            0.5 * (lof[k] + hif[k])
        } else {
            lof[k] + (hif[k] - lof[k]) * i as f64 / (grid - 1) as f64
        }
    };
    let total = grid.pow(d as u32);
    let mut best_x = vec![0.0; d];
    let mut best = f64::NEG_INFINITY;
    let mut x = vec![0.0; d];
    for idx in 0..total {
        let mut r = idx;
        for (k, xk) in x.iter_mut().enumerate() {
            *xk = axis(k, r % grid);
            r /= grid;
        }
        let v = eval_depth(&x);
        if v > best {
            best = v;
            best_x.clone_from(&x);
        }
    }
    let step: Vec<f64> = (0..d)
        .map(|k| if grid > 1 { (hif[k] - lof[k]) / (grid - 1) as f64 } else { 0.5 * (hif[k] - lof[k]) })
        .collect();
    if step.iter().any(|&s| s > 0.0) {
        let (nx, nv) = nelder_mead_max(&eval_depth, &best_x, &step, &lof, &hif, 200, 1e-10);
        if nv > best {
            best = nv;
            best_x = nx;
        }
    }
    let point = Point::new(best_x.into_iter().map(T::lit).collect())?;
    Ok((point, T::lit(best)))
}

fn nelder_mead_max(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    step: &[f64],
    lo: &[f64],
    hi: &[f64],
    max_iter: usize,
    tol: f64,
) -> (Vec<f64>, f64) {
    let d = x0.len();
    let clamp = |v: &mut Vec<f64>| {
        for k in 0..d {
            v[k] = v[k].clamp(lo[k], hi[k]);
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for k in 0..d {
        let mut v = x0.to_vec();
        v[k] += 0.5 * step[k];
        clamp(&mut v);
        let fv = f(&v);
        simplex.push((v, fv));
    }
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        let diam = simplex
            .iter()
            .skip(1)
            .map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if diam < tol {
            break;
        }
        let centroid: Vec<f64> = (0..d).map(|k| simplex[..d].iter().map(|(v, _)| v[k]).sum::<f64>() / d as f64).collect();
        let worst = simplex[d].clone();
        let towards = |t: f64| -> Vec<f64> {
            let mut v: Vec<f64> = (0..d).map(|k| centroid[k] + t * (worst.0[k] - centroid[k])).collect();
            clamp(&mut v);
            v
        };
        let xr = towards(-1.0);
        let fr = f(&xr);
        if fr > simplex[0].1 {
            let xe = towards(-2.0);
            let fe = f(&xe);
            simplex[d] = if fe > fr { (xe, fe) } else { (xr, fr) };
        } else if fr > simplex[d - 1].1 {
            simplex[d] = (xr, fr);
        } else {
            let xc = towards(0.5);
            let fc = f(&xc);
            if fc > worst.1 {
                simplex[d] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for item in simplex.iter_mut().skip(1) {
                    let v: Vec<f64> = (0..d).map(|k| best[k] + 0.5 * (item.0[k] - best[k])).collect();
                    let fv = f(&v);
                    *item = (v, fv);
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    simplex.swap_remove(0)
}

/// `max_x |D(x, ref) - D(x, μ_n)|` over the evaluation points; in `d = 1` the
/// points are augmented with the data points and the midpoints between them.
pub fn depth_sup_deviation<T: Scalar>(s: &Sample<T>, r: &ReferenceMeasure<T>, eval_points: &[Point<T>]) -> Result<T> {
    let d = s.dim();
    check_dim(d, r.dim())?;
    if d > 2 {
        return Err(Error::Unsupported(format!("exact depth deviation needs d <= 2, got {d}")));
    }
    if eval_points.is_empty() {
        return Err(Error::Empty("evaluation points"));
    }
    let emp = ReferenceMeasure::Empirical(s.clone());
    let mut xs: Vec<Vec<T>> = Vec::with_capacity(eval_points.len());
    for p in eval_points {
        check_dim(d, p.dim())?;
        xs.push(p.coords().to_vec());
    }
    if d == 1 {
        let mut v: Vec<T> = s.flat().to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        for w in v.windows(2) {
            xs.push(vec![(w[0] + w[1]) / T::lit(2.0)]);
        }
        xs.extend(v.into_iter().map(|c| vec![c]));
    }
    let emp_wp = WeightedPoints::from_sample(s);
    let mut best = T::zero();
    for x in &xs {
        let de = if d == 1 { depth_1d(&emp, x[0])?.depth } else { depth_2d_exact(&emp_wp, x)?.depth };
        let dr = depth(r, x)?.depth;
        best = best.max((de - dr).abs());
    }
    Ok(best)
}
