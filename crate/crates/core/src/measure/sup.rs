//! Supremum of `|μ_n(f) - μ(f)|` over function classes.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Scalar};

use super::directions::direction;
use super::function::{ClassKind, EvalFunction, FunctionClass, Orientation};
use super::ops::empirical_intensity;
use super::point::{Point, Sample};
use super::reference::ReferenceMeasure;

/// Result of a supremum search.
#[derive(Clone, Debug, PartialEq)]
pub struct SupDeviation<T> {
    pub value: T,
    /// A function at which the supremum is attained, or approached when `attained` is false.
    pub argmax: EvalFunction<T>,
    pub attained: bool,
    /// False when the search is only a lower bound (half-spaces in `d >= 3`).
    pub exact: bool,
}

/// Tuning of the non-exact searches.
#[derive(Clone, Debug)]
pub struct SupOptions {
    /// Quasi-random directions for half-spaces in `d >= 3`.
    pub directions: usize,
    /// Largest number of distinct points for which all hyperplane normals through point triples are added (`d = 3`).
    pub subset_normal_limit: usize,
    /// Grid over the exponential parameter before local refinement.
    pub theta_grid: usize,
    pub theta_tol: f64,
}

impl Default for SupOptions {
    fn default() -> Self {
        Self {
            directions: 4096,
            subset_normal_limit: 24,
            theta_grid: 1024,
            theta_tol: 1e-9,
        }
    }
}

pub fn sup_deviation<T: Scalar>(
    s: &Sample<T>,
    cls: &FunctionClass<T>,
    r: &ReferenceMeasure<T>,
) -> Result<SupDeviation<T>> {
    sup_deviation_with(s, cls, r, &SupOptions::default())
}

pub fn sup_deviation_with<T: Scalar>(
    s: &Sample<T>,
    cls: &FunctionClass<T>,
    r: &ReferenceMeasure<T>,
    opts: &SupOptions,
) -> Result<SupDeviation<T>> {
    if let Some(d) = cls.dim() {
        for found in [s.dim(), r.dim()] {
            if found != d {
                return Err(Error::DimensionMismatch { expected: d, found });
            }
        }
    }
    match cls.kind() {
        ClassKind::HalfLines => {
            // the scan merges equal locations itself
            let w = 1.0 / s.n() as f64;
            let cdf = continuous_cdf(r, &[1.0], 1.0);
            // sorting bare keys first is cheaper; the scan's sort then sees sorted input
            let mut ys: Vec<f64> = s.flat().iter().map(|y| y.f64()).collect();
            ys.sort_unstable_by(f64::total_cmp);
            let mut pts: Vec<(f64, f64, f64)> = ys.into_iter().map(|y| (y, w, 0.0)).collect();
            if let Some(atoms) = r.atoms() {
                pts.extend(atoms.into_iter().map(|(p, m)| {
                    let m = m.f64();
                    (p[0].f64(), (-m).max(0.0), m.max(0.0))
                }));
            }
            let line = half_line_scan(pts, cdf.as_deref(), cont_total(r, 1.0));
            Ok(line.into_sup(true))
        }
        ClassKind::HalfSpaces { dim } if *dim == 2 => half_plane_sup(s, r),
        ClassKind::HalfSpaces { dim } => half_space_sup_approx(s, r, *dim, opts),
        ClassKind::Exponentials { low, high, radius } => exponential_sup(s, r, *low, *high, *radius, opts),
        ClassKind::FiniteList(fs) => {
            let mut best: Option<SupDeviation<T>> = None;
            for f in fs {
                let v = (empirical_intensity(s, f)? - r.mass(f)?).abs();
                if best.as_ref().is_none_or(|b| v > b.value) {
                    best = Some(SupDeviation {
                        value: v,
                        argmax: f.clone(),
                        attained: true,
                        exact: true,
                    });
                }
            }
            Ok(best.expect("finite list is nonempty"))
        }
    }
}

/// `sup_H |Σ_i w_i 1(y_i ∈ H) - scale · μ(H)|` over closed half-lines `H`,
/// for signed weights `w_i`. Used for symmetrized measures.
pub fn signed_half_line_sup<T: Scalar>(
    points: &[(T, T)],
    r: Option<&ReferenceMeasure<T>>,
    scale: T,
) -> Result<SupDeviation<T>> {
    if let Some(r) = r {
        if r.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: r.dim(),
            });
        }
    }
    let mut pts: Vec<(f64, f64, f64)> = points
        .iter()
        .map(|&(y, w)| {
            let w = w.f64();
            (y.f64(), w.max(0.0), (-w).max(0.0))
        })
        .collect();
    let sc = scale.f64();
    if let Some(atoms) = r.and_then(|r| r.atoms()) {
        for (p, w) in atoms {
            let w = sc * w.f64();
            pts.push((p[0].f64(), (-w).max(0.0), w.max(0.0)));
        }
    }
    let cont = r.and_then(|r| continuous_cdf(r, &[1.0], sc));
    let total = r.map_or(0.0, |r| cont_total(r, sc));
    Ok(half_line_scan(pts, cont.as_deref(), total).into_sup(true))
}

type Cdf<'a> = dyn Fn(f64) -> f64 + 'a;

/// `c -> scale · μ{<y, u> <= c}` when `μ` has no atoms.
fn continuous_cdf<'a, T: Scalar>(r: &'a ReferenceMeasure<T>, u: &[f64], scale: f64) -> Option<Box<Cdf<'a>>> {
    if !r.is_continuous() {
        return None;
    }
    let ut: Vec<T> = u.iter().map(|&x| T::lit(x)).collect();
    Some(Box::new(move |c: f64| scale * r.projected_mass(&ut, T::lit(c), false).f64()))
}

fn cont_total<T: Scalar>(r: &ReferenceMeasure<T>, scale: f64) -> f64 {
    if r.is_continuous() {
        scale * r.total_mass().f64()
    } else {
        0.0
    }
}

/// A location with accumulated positive and negative mass.
struct Item {
    coords: Vec<f64>,
    pos: f64,
    neg: f64,
}

impl Item {
    fn weight(&self) -> f64 {
        self.pos - self.neg
    }
}

/// Data points with mass `data_w` each, minus the atoms of `r` scaled by `scale`,
/// merged by location. Locations whose masses cancel exactly are dropped.
fn merged_items<T: Scalar>(s: &Sample<T>, data_w: T, r: Option<&ReferenceMeasure<T>>, scale: T) -> Vec<Item> {
    let w = data_w.f64() / s.n() as f64;
    let mut raw: Vec<(Vec<f64>, f64, f64)> = s.points().map(|p| (p.iter().map(|c| c.f64()).collect(), w, 0.0)).collect();
    if let Some(atoms) = r.and_then(|r| r.atoms()) {
        let sc = scale.f64();
        for (p, m) in atoms {
            let m = sc * m.f64();
            raw.push((p.iter().map(|c| c.f64()).collect(), (-m).max(0.0), m.max(0.0)));
        }
    }
    raw.sort_by(|a, b| lex_cmp(&a.0, &b.0));
    let mut out: Vec<Item> = Vec::new();
    let mut i = 0;
    while i < raw.len() {
        let mut j = i;
        let mut pos = CompensatedSum::new();
        let mut neg = CompensatedSum::new();
        while j < raw.len() && raw[j].0 == raw[i].0 {
            pos.add(raw[j].1);
            neg.add(raw[j].2);
            j += 1;
        }
        let (p, n) = (pos.value(), neg.value());
        if p != n {
            out.push(Item {
                coords: raw[i].0.clone(),
                pos: p,
                neg: n,
            });
        }
        i = j;
    }
    out
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

#[derive(Clone, Copy, Debug)]
enum LineArg {
    Closed(f64, Orientation),
    Limit(f64, Orientation),
    Whole,
    Empty,
}

#[derive(Clone, Copy, Debug)]
struct LineSup {
    value: f64,
    arg: LineArg,
}

impl LineSup {
    fn into_sup<T: Scalar>(self, exact: bool) -> SupDeviation<T> {
        let (argmax, attained) = match self.arg {
            LineArg::Closed(t, o) => (half_line(T::lit(t), o), true),
            LineArg::Limit(t, o) => (half_line(T::lit(t), o), false),
            LineArg::Whole => (EvalFunction::Constant(T::one()), false),
            LineArg::Empty => (EvalFunction::Constant(T::zero()), false),
        };
        SupDeviation {
            value: T::lit(self.value),
            argmax,
            attained,
            exact,
        }
    }
}

fn half_line<T: Scalar>(threshold: T, orientation: Orientation) -> EvalFunction<T> {
    EvalFunction::HalfLine {
        threshold,
        orientation,
    }
}

/// Exact supremum over closed half-lines of `|A(H) - G(H)|`, where `A` is the
/// signed atomic measure given by `(value, pos, neg)` triples and `G` a
/// continuous monotone part given by its closed cdf and total.
///
/// Between consecutive atoms `A` is constant and `G` monotone, so the extremes
/// sit at atoms or their one-sided limits, plus the limits at `±∞`.
fn half_line_scan(mut pts: Vec<(f64, f64, f64)>, g: Option<&Cdf<'_>>, g_total: f64) -> LineSup {
    pts.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let mut vals: Vec<f64> = Vec::new();
    let mut cum: Vec<f64> = Vec::new();
    let mut pos = CompensatedSum::new();
    let mut neg = CompensatedSum::new();
    let mut i = 0;
    while i < pts.len() {
        let v = pts[i].0;
        while i < pts.len() && pts[i].0 == v {
            pos.add(pts[i].1);
            neg.add(pts[i].2);
            i += 1;
        }
        vals.push(v);
        cum.push(pos.value() - neg.value());
    }
    let m = vals.len();
    let gv: Vec<f64> = match g {
        Some(g) => vals.iter().map(|&v| g(v)).collect(),
        None => vec![0.0; m],
    };
    let a_total = cum.last().copied().unwrap_or(0.0);
    let delta = a_total - g_total;
    let mut best = LineSup {
        value: 0.0,
        arg: LineArg::Empty,
    };
    let mut offer = |v: f64, arg: LineArg| {
        if v > best.value {
            best = LineSup { value: v, arg };
        }
    };
    for k in 0..=m {
        let a_k = if k == 0 { 0.0 } else { cum[k - 1] };
        let g_next = if k == m { g_total } else { gv[k] };
        if k >= 1 {
            let x1 = a_k - gv[k - 1];
            offer(x1.abs(), LineArg::Closed(vals[k - 1], Orientation::Below));
            offer((delta - x1).abs(), LineArg::Limit(vals[k - 1], Orientation::Above));
        } else {
            offer(delta.abs(), LineArg::Whole);
        }
        let x2 = a_k - g_next;
        if k < m {
            offer(x2.abs(), LineArg::Limit(vals[k], Orientation::Below));
            offer((delta - x2).abs(), LineArg::Closed(vals[k], Orientation::Above));
        } else {
            offer(x2.abs(), LineArg::Whole);
        }
    }
    best
}

#[derive(Clone, Copy, Debug)]
struct PlaneArg {
    pivot: usize,
    phi: f64,
    attained: bool,
}

struct PlaneBest {
    value: f64,
    arg: Option<PlaneArg>,
    whole: bool,
}

impl PlaneBest {
    fn offer(&mut self, v: f64, arg: PlaneArg) {
        if v > self.value {
            self.value = v;
            self.arg = Some(arg);
            self.whole = false;
        }
    }
}

/// Exact supremum over closed half-planes.
///
/// For each pivot atom the closed and open counts are piecewise constant in
/// the normal angle, changing only when another atom crosses the boundary
/// line. On each angular cell the continuous part of the reference varies
/// smoothly and is minimized and maximized numerically.
fn half_plane_sup<T: Scalar>(s: &Sample<T>, r: &ReferenceMeasure<T>) -> Result<SupDeviation<T>> {
    let items = merged_items(s, T::one(), Some(r), T::one());
    let cont = r.is_continuous();
    let g_total = cont_total(r, 1.0);
    let g = |px: f64, py: f64, phi: f64| -> f64 {
        if !cont {
            return 0.0;
        }
        let (sn, cs) = phi.sin_cos();
        let u = [T::lit(cs), T::lit(sn)];
        r.projected_mass(&u, T::lit(px * cs + py * sn), false).f64()
    };
    let (g_lo, g_hi) = (0.0f64.min(g_total), 0.0f64.max(g_total));
    let total_w: f64 = items.iter().map(Item::weight).sum();
    let mut best = PlaneBest {
        value: 0.0,
        arg: None,
        whole: false,
    };
    let whole = (total_w - g_total).abs();
    if whole > 0.0 {
        best.value = whole;
        best.whole = true;
    }

    let mut events: Vec<(f64, f64, bool)> = Vec::with_capacity(2 * items.len());
    for (pi, p) in items.iter().enumerate() {
        let (px, py) = (p.coords[0], p.coords[1]);
        let wp = p.weight();
        events.clear();
        for (qi, q) in items.iter().enumerate() {
            if qi == pi {
                continue;
            }
            let a = (q.coords[1] - py).atan2(q.coords[0] - px);
            let e = (a + 0.5 * PI).rem_euclid(TAU);
            let x = (e + PI).rem_euclid(TAU);
            events.push((e, q.weight(), true));
            events.push((x, q.weight(), false));
        }
        let cell = |best: &mut PlaneBest, c: f64, a: f64, b: f64, ga: f64, gb: f64| {
            let vs = [(c + wp, true), (c, false)];
            if !cont {
                for (v, closed) in vs {
                    best.offer(
                        v.abs(),
                        PlaneArg {
                            pivot: pi,
                            phi: 0.5 * (a + b),
                            attained: closed,
                        },
                    );
                }
                return;
            }
            let bound = vs
                .iter()
                .map(|(v, _)| (v - g_lo).abs().max((v - g_hi).abs()))
                .fold(0.0, f64::max);
            if bound <= best.value {
                return;
            }
            let (tmin, gmin, tmax, gmax) = extremes(|phi| g(px, py, phi), a, b, ga, gb);
            for (v, closed) in vs {
                let interior = |t: f64| t > a && t < b;
                best.offer(
                    (v - gmin).abs(),
                    PlaneArg {
                        pivot: pi,
                        phi: tmin,
                        attained: closed && interior(tmin),
                    },
                );
                best.offer(
                    (v - gmax).abs(),
                    PlaneArg {
                        pivot: pi,
                        phi: tmax,
                        attained: closed && interior(tmax),
                    },
                );
            }
        };
        if events.is_empty() {
            let g0 = g(px, py, 0.0);
            cell(&mut best, 0.0, 0.0, TAU, g0, g0);
            continue;
        }
        events.sort_by(|a, b| a.0.total_cmp(&b.0));
        // Clusters of (numerically) equal event angles: (angle, entering mass, leaving mass).
        let mut clusters: Vec<(f64, f64, f64)> = Vec::new();
        for &(ang, w, enter) in events.iter() {
            match clusters.last_mut() {
                Some(cl) if ang - cl.0 <= 1e-12 => {
                    if enter {
                        cl.1 += w
                    } else {
                        cl.2 += w
                    }
                }
                _ => clusters.push(if enter { (ang, w, 0.0) } else { (ang, 0.0, w) }),
            }
        }
        let k = clusters.len();
        if k > 1 && clusters[k - 1].0 + TAU - clusters[0].0 <= 1e-12 {
            let last = clusters.pop().unwrap();
            clusters[0].1 += last.1;
            clusters[0].2 += last.2;
        }
        let k = clusters.len();
        // The widest gap starts the sweep; its count is taken directly.
        let mut start = k - 1;
        let mut widest = clusters[0].0 + TAU - clusters[k - 1].0;
        for i in 0..k - 1 {
            let gap = clusters[i + 1].0 - clusters[i].0;
            if gap > widest {
                widest = gap;
                start = i;
            }
        }
        let a0 = clusters[start].0;
        let mid = a0 + 0.5 * widest;
        let mut c = 0.0;
        for &(ang, w, enter) in events.iter() {
            if enter && (mid - ang).rem_euclid(TAU) <= PI {
                c += w;
            }
        }
        let gat: Vec<f64> = clusters.iter().map(|cl| g(px, py, cl.0)).collect();
        let next = (start + 1) % k;
        let b0 = if next == 0 { clusters[0].0 + TAU } else { clusters[next].0 };
        cell(&mut best, c, a0, b0, gat[start], gat[next]);
        for step in 1..=k {
            let i = (start + step) % k;
            let (ang, enter, leave) = clusters[i];
            best.offer(
                (c + enter + wp - gat[i]).abs(),
                PlaneArg {
                    pivot: pi,
                    phi: ang,
                    attained: true,
                },
            );
            best.offer(
                (c - leave - gat[i]).abs(),
                PlaneArg {
                    pivot: pi,
                    phi: ang,
                    attained: false,
                },
            );
            c += enter - leave;
            if step == k {
                break;
            }
            let j = (i + 1) % k;
            let b = if j == 0 { clusters[0].0 + TAU } else { clusters[j].0 };
            cell(&mut best, c, ang, b, gat[i], gat[j]);
        }
    }

    let (argmax, attained) = match best.arg {
        _ if best.whole => (EvalFunction::Constant(T::one()), false),
        None => (EvalFunction::Constant(T::zero()), false),
        Some(a) => {
            let p = &items[a.pivot];
            let point = Point::new(vec![T::lit(p.coords[0]), T::lit(p.coords[1])])?;
            let (sn, cs) = a.phi.sin_cos();
            let f = EvalFunction::HalfSpace(super::function::HalfSpace::normalized(point, &[T::lit(cs), T::lit(sn)])?);
            (f, a.attained)
        }
    };
    Ok(SupDeviation {
        value: T::lit(best.value),
        argmax,
        attained,
        exact: true,
    })
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximum of `h` on `[a, b]`.
pub(crate) fn golden_max(mut h: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = h(x1);
    let mut f2 = h(x2);
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = h(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = h(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Approximate minimizer and maximizer of a smooth `h` on `[a, b]`, given its endpoint values.
fn extremes(mut h: impl FnMut(f64) -> f64, a: f64, b: f64, ha: f64, hb: f64) -> (f64, f64, f64, f64) {
    let n = 8 + ((b - a) / (PI / 16.0)).ceil() as usize;
    let ts: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    let mut hs: Vec<f64> = Vec::with_capacity(n + 1);
    for (i, &t) in ts.iter().enumerate() {
        hs.push(if i == 0 {
            ha
        } else if i == n {
            hb
        } else {
            h(t)
        });
    }
    let imax = (0..=n).max_by(|&i, &j| hs[i].total_cmp(&hs[j]).then(j.cmp(&i))).unwrap();
    let imin = (0..=n).min_by(|&i, &j| hs[i].total_cmp(&hs[j]).then(i.cmp(&j))).unwrap();
    let tol = 1e-10;
    let (mut tmax, mut gmax) = (ts[imax], hs[imax]);
    let lo = imax.saturating_sub(1);
    let hi = (imax + 1).min(n);
    let (t, v) = golden_max(&mut h, ts[lo], ts[hi], tol);
    if v > gmax {
        tmax = t;
        gmax = v;
    }
    let (mut tmin, mut gmin) = (ts[imin], hs[imin]);
    let lo = imin.saturating_sub(1);
    let hi = (imin + 1).min(n);
    let (t, v) = golden_max(|x| -h(x), ts[lo], ts[hi], tol);
    if -v < gmin {
        tmin = t;
        gmin = -v;
    }
    (tmin, gmin, tmax, gmax)
}

/// Lower bound over half-spaces in `d >= 3` from a finite direction set.
fn half_space_sup_approx<T: Scalar>(
    s: &Sample<T>,
    r: &ReferenceMeasure<T>,
    d: usize,
    opts: &SupOptions,
) -> Result<SupDeviation<T>> {
    let items = merged_items(s, T::one(), Some(r), T::one());
    let mut dirs: Vec<Vec<f64>> = (0..opts.directions as u64).map(|i| direction(d, i)).collect();
    if d == 3 && items.len() <= opts.subset_normal_limit {
        for i in 0..items.len() {
            for j in i + 1..items.len() {
                for k in j + 1..items.len() {
                    let (a, b, c) = (&items[i].coords, &items[j].coords, &items[k].coords);
                    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
                    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
                    let n = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
                    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
                    if norm > 1e-12 {
                        dirs.push(n.iter().map(|x| x / norm).collect());
                    }
                }
            }
        }
    }
    let g_total = cont_total(r, 1.0);
    let mut best: Option<(LineSup, usize)> = None;
    for (di, u) in dirs.iter().enumerate() {
        let pts: Vec<(f64, f64, f64)> = items
            .iter()
            .map(|it| (it.coords.iter().zip(u).map(|(a, b)| a * b).sum(), it.pos, it.neg))
            .collect();
        let line = half_line_scan(pts, continuous_cdf(r, u, 1.0).as_deref(), g_total);
        if best.as_ref().is_none_or(|b| line.value > b.0.value) {
            best = Some((line, di));
        }
    }
    let (line, di) = best.ok_or(Error::InvalidParameter("no directions".into()))?;
    let u: Vec<T> = dirs[di].iter().map(|&x| T::lit(x)).collect();
    let to_half_space = |t: f64, o: Orientation| -> Result<EvalFunction<T>> {
        let sign = if o == Orientation::Below { 1.0 } else { -1.0 };
        let normal: Vec<T> = u.iter().map(|&x| x * T::lit(sign)).collect();
        let point: Vec<T> = u.iter().map(|&x| x * T::lit(t)).collect();
        super::function::HalfSpace::normalized(Point::new(point)?, &normal).map(EvalFunction::HalfSpace)
    };
    let (argmax, attained) = match line.arg {
        LineArg::Closed(t, o) => (to_half_space(t, o)?, true),
        LineArg::Limit(t, o) => (to_half_space(t, o)?, false),
        LineArg::Whole => (EvalFunction::Constant(T::one()), false),
        LineArg::Empty => (EvalFunction::Constant(T::zero()), false),
    };
    Ok(SupDeviation {
        value: T::lit(line.value),
        argmax,
        attained,
        exact: false,
    })
}

fn exponential_sup<T: Scalar>(
    s: &Sample<T>,
    r: &ReferenceMeasure<T>,
    low: T,
    high: T,
    radius: T,
    opts: &SupOptions,
) -> Result<SupDeviation<T>> {
    if let Some(y) = s.flat().iter().find(|&&y| y < low || y > high) {
        return Err(Error::OutOfRange(format!("{y} outside the exponential domain [{low}, {high}]")));
    }
    let ys: Vec<f64> = s.flat().iter().map(|y| y.f64()).collect();
    let n = s.n() as f64;
    let mut err: Option<Error> = None;
    let mut dev = |th: f64| -> f64 {
        let emp = ys.iter().map(|y| (th * y).exp()).collect::<CompensatedSum<f64>>().value() / n;
        let f = EvalFunction::Exponential {
            theta: T::lit(th),
            low,
            high,
        };
        match r.mass(&f) {
            Ok(m) => (emp - m.f64()).abs(),
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        }
    };
    let rad = radius.f64();
    let k = opts.theta_grid.max(2);
    let grid: Vec<f64> = if rad == 0.0 {
        vec![0.0]
    } else {
        (0..k).map(|i| -rad + 2.0 * rad * i as f64 / (k - 1) as f64).collect()
    };
    let vals: Vec<f64> = grid.iter().map(|&t| dev(t)).collect();
    let ib = (0..vals.len()).max_by(|&i, &j| vals[i].total_cmp(&vals[j]).then(j.cmp(&i))).unwrap();
    let (mut th, mut best) = (grid[ib], vals[ib]);
    if grid.len() > 1 {
        let lo = grid[ib.saturating_sub(1)];
        let hi = grid[(ib + 1).min(grid.len() - 1)];
        let (t, v) = golden_max(&mut dev, lo, hi, opts.theta_tol);
        if v > best {
            th = t;
            best = v;
        }
    }
    if let Some(e) = err {
        return Err(e);
    }
    Ok(SupDeviation {
        value: T::lit(best),
        argmax: EvalFunction::Exponential {
            theta: T::lit(th),
            low,
            high,
        },
        attained: true,
        exact: true,
    })
}
