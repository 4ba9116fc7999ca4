//! Closed-form deviation and covering bounds, Chernoff tails, and empirical
//! covers and packings of function classes on a fixed sample.
//!
//! Bound arithmetic is carried in log space; a linear value is attached only
//! when it is below `1e300`.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{CountLaw, RngStream};
use crate::measure::{golden_max, ClassKind, EvalFunction, FunctionClass, Point, Sample};
use crate::quadrature::integrate;
use crate::scalar::Scalar;

const LINEAR_LIMIT: f64 = 1e300;

/// A nonnegative quantity stored as its natural log.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogValue {
    pub ln: f64,
}

impl LogValue {
    pub fn from_ln(ln: f64) -> Self {
        Self { ln }
    }

    /// The linear value when it is representable.
    pub fn value(&self) -> Option<f64> {
        (self.ln < LINEAR_LIMIT.ln()).then(|| self.ln.exp())
    }
}

/// Sauer's bound `2 n^{v-1}` on the number of labelings of `n` points.
pub fn sauer_bound(n: u64, v: u32) -> Result<LogValue> {
    if n < 1 || v < 1 {
        return Err(Error::InvalidParameter(format!("sauer bound needs n, v >= 1, got {n}, {v}")));
    }
    Ok(LogValue::from_ln(2f64.ln() + (v - 1) as f64 * (n as f64).ln()))
}

/// The constant `c_v = max{c ∈ N : ln c >= c^{1/(v(v-1))}}` in the covering bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VcConstant {
    pub ln: f64,
    /// The defining set is empty and `c_v = 1` is substituted.
    pub fallback: bool,
}

/// Solves for `c_v` exactly in log space. With `y = ln c` the condition reads
/// `y >= exp(a y)`, `a = 1/(v(v-1))`; the left minus the right side is concave,
/// so the set is an interval of `y` whose right end is found by bisection.
pub fn vc_constant(v: u32) -> VcConstant {
    if v < 2 {
        return VcConstant { ln: 0.0, fallback: false };
    }
    let a = 1.0 / (v as f64 * (v as f64 - 1.0));
    let h = |y: f64| y - (a * y).exp();
    let peak = (1.0 / a).ln() / a;
    if h(peak) < 0.0 {
        log::warn!("c_v defining set is empty for v = {v}; using 1");
        return VcConstant { ln: 0.0, fallback: true };
    }
    let (mut lo, mut hi) = (peak, 2.0 * peak + 1.0);
    while h(hi) >= 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) >= 0.0 {
            lo = mid
        } else {
            hi = mid
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    // largest integer inside the interval when it is representable
    let ln = if lo < 700.0 {
        let mut c = lo.exp().floor();
        while c > 1.0 && h(c.ln()) < 0.0 {
            c -= 1.0;
        }
        c.ln()
    } else {
        lo
    };
    VcConstant { ln, fallback: false }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VcBoundParams {
    pub epsilon: f64,
    pub p: f64,
    /// Envelope bound `M`.
    pub bound: f64,
    pub v: u32,
    /// `S_n / n`.
    pub ratio: f64,
}

impl VcBoundParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.epsilon > 0.0
            && self.p >= 1.0
            && self.p.is_finite()
            && self.bound > 0.0
            && self.bound.is_finite()
            && self.v >= 1
            && self.ratio >= 1.0
            && self.ratio.is_finite();
        if !ok {
            return Err(Error::InvalidParameter(format!("covering bound parameters {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoveringBound {
    pub value: LogValue,
    /// `ε > M`: one function covers the class.
    pub trivial: bool,
    /// `c_v` is the larger term of the max.
    pub constant_branch: bool,
    pub constant_fallback: bool,
}

/// `max(c_v, (4 · ratio · (2M/ε)^p)^v)`, with `1` for `v = 1` and for `ε > M`.
pub fn vc_covering_bound(params: &VcBoundParams) -> Result<CoveringBound> {
    params.validate()?;
    let one = |trivial| CoveringBound {
        value: LogValue::from_ln(0.0),
        trivial,
        constant_branch: false,
        constant_fallback: false,
    };
    if params.epsilon > params.bound {
        return Ok(one(true));
    }
    if params.v == 1 {
        return Ok(one(false));
    }
    let c = vc_constant(params.v);
    let poly = params.v as f64
        * (4f64.ln() + params.ratio.ln() + params.p * (2.0 * params.bound / params.epsilon).ln());
    Ok(CoveringBound {
        value: LogValue::from_ln(poly.max(c.ln)),
        trivial: false,
        constant_branch: c.ln > poly,
        constant_fallback: c.fallback,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationBoundParams {
    pub epsilon: f64,
    pub n: f64,
    pub alpha: f64,
    pub beta: f64,
    pub v: u32,
    /// Bound on `P(S_n > αn)`.
    pub tail_sn: f64,
    /// Bound on `P(S_{n,2} > βn)`.
    pub tail_sn2: f64,
}

impl DeviationBoundParams {
    /// Sample-size condition `n >= 8 E[L^2] / ε^2` under which the bound holds.
    pub fn precondition(&self, second_moment: f64) -> bool {
        self.n >= 8.0 * second_moment / (self.epsilon * self.epsilon)
    }

    pub fn validate(&self) -> Result<()> {
        let pos = [self.epsilon, self.n, self.alpha, self.beta];
        let tails = [self.tail_sn, self.tail_sn2];
        if pos.iter().any(|x| !(*x > 0.0) || !x.is_finite())
            || self.v < 1
            || tails.iter().any(|t| !(0.0..=1.0).contains(t))
        {
            return Err(Error::InvalidParameter(format!("deviation bound parameters {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationBound {
    /// Log of `16 (αn)^{v-1} exp(-ε² n / (32 β))`.
    pub ln_main: f64,
    pub raw: f64,
    pub clamped: f64,
}

/// `16 (αn)^{v-1} exp(-ε² n / (32 β)) + tail_sn + tail_sn2`.
pub fn deviation_bound(params: &DeviationBoundParams) -> Result<DeviationBound> {
    params.validate()?;
    let p = params;
    let ln_main = 16f64.ln() + (p.v - 1) as f64 * (p.alpha * p.n).ln() - p.epsilon * p.epsilon * p.n / (32.0 * p.beta);
    let raw = ln_main.exp() + p.tail_sn + p.tail_sn2;
    Ok(DeviationBound {
        ln_main,
        raw,
        clamped: raw.clamp(0.0, 1.0),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMethod {
    /// `α` at or below the mean; the bound is `1`.
    Vacuous,
    /// `α` at or above the largest possible value; the probability is `0`.
    Support,
    Chernoff,
    /// The moment generating function is infinite; estimated by simulation.
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub value: f64,
    pub ln: f64,
    pub method: TailMethod,
    /// Minimizing `θ` for Chernoff bounds.
    pub theta: Option<f64>,
    /// Number of simulated sums for Monte Carlo estimates.
    pub draws: Option<u64>,
}

impl TailBound {
    fn fixed(value: f64, method: TailMethod) -> Self {
        Self {
            value,
            ln: value.ln(),
            method,
            theta: None,
            draws: None,
        }
    }
}

/// `(inf_{θ>0} e^{-θα} E[e^{θL}])^n`, or with `L²` when `squared`.
///
/// Returns `Ok(None)` when the required moment generating function is infinite
/// for every `θ > 0`.
pub fn chernoff_tail(law: &CountLaw, alpha: f64, n: u64, squared: bool) -> Result<Option<TailBound>> {
    law.validate()?;
    if n < 1 || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("tail at alpha {alpha}, n {n}")));
    }
    let mean = if squared { law.second_moment() } else { law.mean() };
    if alpha <= mean {
        return Ok(Some(TailBound::fixed(1.0, TailMethod::Vacuous)));
    }
    if let Some(m) = law.max_support() {
        let top = if squared { (m * m) as f64 } else { m as f64 };
        if alpha >= top {
            return Ok(Some(TailBound::fixed(0.0, TailMethod::Support)));
        }
    }
    let log_mgf = |t: f64| if squared { law.log_mgf_squared(t) } else { law.log_mgf(t) };
    if log_mgf(1e-9).is_none() {
        return Ok(None);
    }
    let g = |t: f64| log_mgf(t).map_or(f64::INFINITY, |m| m - t * alpha);
    // g is convex with g(0) = 0 and g'(0) < 0; expand until it turns up
    let mut hi = 1.0;
    while g(2.0 * hi) < g(hi) && hi < 1e12 {
        hi *= 2.0;
    }
    let mut hi = 2.0 * hi;
    while !g(hi).is_finite() && hi > 1e-12 {
        hi *= 0.5;
    }
    let (theta, neg) = golden_max(|t| -g(t), 0.0, hi, 1e-12 * hi.max(1.0));
    let ln = (n as f64 * (-neg).min(0.0)).min(0.0);
    Ok(Some(TailBound {
        value: ln.exp(),
        ln,
        method: TailMethod::Chernoff,
        theta: Some(theta),
        draws: None,
    }))
}

/// Largest number of simulated counts spent on one Monte Carlo tail.
pub const MONTE_CARLO_BUDGET: u64 = 100_000_000;

/// Chernoff tail, falling back to the frequency of `S > αn` over up to `10^5`
/// simulated sums (fewer when `n` is large, within [`MONTE_CARLO_BUDGET`]).
pub fn tail_bound(law: &CountLaw, alpha: f64, n: u64, squared: bool, rng: &mut RngStream) -> Result<TailBound> {
    if let Some(t) = chernoff_tail(law, alpha, n, squared)? {
        return Ok(t);
    }
    let draws = (MONTE_CARLO_BUDGET / n).clamp(1_000, 100_000);
    let lim = alpha * n as f64;
    let mut hits = 0u64;
    for _ in 0..draws {
        let mut s = 0.0;
        for _ in 0..n {
            let l = law.sample(rng) as f64;
            s += if squared { l * l } else { l };
        }
        if s > lim {
            hits += 1;
        }
    }
    let value = hits as f64 / draws as f64;
    Ok(TailBound {
        value,
        ln: value.ln(),
        method: TailMethod::MonteCarlo,
        theta: None,
        draws: Some(draws),
    })
}

/// One row of an emitted bound table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub n: u64,
    pub epsilon: f64,
    pub alpha: f64,
    pub beta: f64,
    pub v: u32,
    pub raw_bound: f64,
    pub clamped_bound: f64,
    pub tail_sn: f64,
    pub tail_sn2: f64,
    pub chernoff_used: bool,
}

/// Deviation bound for `n` patterns with both tails from [`tail_bound`].
pub fn bound_row(law: &CountLaw, epsilon: f64, n: u64, alpha: f64, beta: f64, v: u32, rng: &mut RngStream) -> Result<BoundRow> {
    let t1 = tail_bound(law, alpha, n, false, rng)?;
    let t2 = tail_bound(law, beta, n, true, rng)?;
    let b = deviation_bound(&DeviationBoundParams {
        epsilon,
        n: n as f64,
        alpha,
        beta,
        v,
        tail_sn: t1.value,
        tail_sn2: t2.value,
    })?;
    Ok(BoundRow {
        n,
        epsilon,
        alpha,
        beta,
        v,
        raw_bound: b.raw,
        clamped_bound: b.clamped,
        tail_sn: t1.value,
        tail_sn2: t2.value,
        chernoff_used: t1.method == TailMethod::Chernoff || t2.method == TailMethod::Chernoff,
    })
}

fn sorted_distinct(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// One half-line per distinct labeling of the sample points.
pub fn half_line_candidates<T: Scalar>(s: &Sample<T>) -> Result<Vec<EvalFunction<T>>> {
    if s.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: s.dim() });
    }
    let vals = sorted_distinct(s.flat().iter().map(|c| c.f64()).collect());
    let mut out = Vec::with_capacity(2 * vals.len());
    out.push(EvalFunction::below(T::lit(vals[0] - 1.0)));
    out.extend(vals.iter().map(|&v| EvalFunction::below(T::lit(v))));
    out.extend(vals[1..].iter().map(|&v| EvalFunction::above(T::lit(v))));
    Ok(out)
}

/// Half-planes `{y : <y, u> <= c}` for `directions` equally spaced normals and
/// up to `thresholds` projected data values per normal (all of them when `0`),
/// plus the empty labeling.
pub fn half_plane_candidates<T: Scalar>(s: &Sample<T>, directions: usize, thresholds: usize) -> Result<Vec<EvalFunction<T>>> {
    if s.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: s.dim() });
    }
    if directions == 0 {
        return Err(Error::InvalidParameter("need at least one direction".into()));
    }
    let mut out = Vec::new();
    for k in 0..directions {
        let phi = std::f64::consts::TAU * k as f64 / directions as f64;
        let u = [phi.cos(), phi.sin()];
        let proj = sorted_distinct(s.points().map(|y| y[0].f64() * u[0] + y[1].f64() * u[1]).collect());
        let m = proj.len();
        let picks: Vec<f64> = if thresholds == 0 || thresholds >= m {
            proj
        } else {
            (0..thresholds).map(|i| proj[(i + 1) * m / thresholds - 1]).collect()
        };
        if k == 0 {
            let c = picks[0] - 1.0;
            out.push(half_plane(u, c)?);
        }
        for c in picks {
            out.push(half_plane(u, c)?);
        }
    }
    Ok(out)
}

fn half_plane<T: Scalar>(u: [f64; 2], c: f64) -> Result<EvalFunction<T>> {
    let x = Point::new(vec![T::lit(c * u[0]), T::lit(c * u[1])])?;
    EvalFunction::half_space(x, vec![T::lit(u[0]), T::lit(u[1])])
}

/// Exponentials `e^{θ·}` on `[low, high]` for `k` equally spaced `θ ∈ [-radius, radius]`.
pub fn exponential_candidates<T: Scalar>(low: T, high: T, radius: T, k: usize) -> Result<Vec<EvalFunction<T>>> {
    if k == 0 {
        return Err(Error::InvalidParameter("empty theta grid".into()));
    }
    let r = radius.f64();
    (0..k)
        .map(|i| {
            let t = if k == 1 { 0.0 } else { -r + 2.0 * r * i as f64 / (k - 1) as f64 };
            EvalFunction::exponential(T::lit(t), low, high)
        })
        .collect()
}

/// Candidates covering the class on the sample, per the class kind.
pub fn class_candidates<T: Scalar>(s: &Sample<T>, cls: &FunctionClass<T>) -> Result<Vec<EvalFunction<T>>> {
    match cls.kind() {
        ClassKind::HalfLines => half_line_candidates(s),
        ClassKind::HalfSpaces { dim: 2 } => half_plane_candidates(s, 180, 0),
        ClassKind::HalfSpaces { dim } => Err(Error::Unsupported(format!("candidates for half-spaces in dimension {dim}"))),
        ClassKind::Exponentials { low, high, radius } => exponential_candidates(*low, *high, *radius, 2048),
        ClassKind::FiniteList(fs) => Ok(fs.clone()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverKind {
    GreedyCover,
    MaximalPacking,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverResult<T> {
    pub centers: Vec<EvalFunction<T>>,
    pub radius: T,
    pub size: usize,
    pub kind: CoverKind,
    /// Distinct candidate vectors on the sample.
    pub distinct: usize,
}

enum Rows {
    Bits { words: usize, data: Vec<u64> },
    Values { len: usize, data: Vec<f64> },
}

/// Candidates evaluated on every sample point, deduplicated, with the
/// `e_{n,p}` distance between them.
struct Evaluated<T> {
    rows: Rows,
    keep: Vec<usize>,
    n: f64,
    p: f64,
    matrix: OnceLock<Vec<f64>>,
    _t: std::marker::PhantomData<T>,
}

impl<T: Scalar> Evaluated<T> {
    fn new(s: &Sample<T>, cls: &FunctionClass<T>, candidates: &[EvalFunction<T>], p: T) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::Empty("candidate set"));
        }
        let p = p.f64();
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("pseudo-distance order {p} < 1")));
        }
        if let Some(d) = cls.dim() {
            if d != s.dim() {
                return Err(Error::DimensionMismatch { expected: d, found: s.dim() });
            }
        }
        let m = s.s_n() as usize;
        let bits = candidates.iter().all(|f| f.is_indicator());
        let mut keep = Vec::new();
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        let rows = if bits {
            let words = m.div_ceil(64);
            let mut data = Vec::new();
            for (i, f) in candidates.iter().enumerate() {
                f.check_dim(s.dim())?;
                let mut row = vec![0u64; words];
                for (k, y) in s.points().enumerate() {
                    if f.eval(y)? != T::zero() {
                        row[k / 64] |= 1 << (k % 64);
                    }
                }
                if seen.insert(row.clone()) {
                    keep.push(i);
                    data.extend_from_slice(&row);
                }
            }
            Rows::Bits { words, data }
        } else {
            let mut data = Vec::new();
            for (i, f) in candidates.iter().enumerate() {
                f.check_dim(s.dim())?;
                let row: Vec<f64> = s.points().map(|y| f.eval(y).map(|v| v.f64())).collect::<Result<_>>()?;
                if seen.insert(row.iter().map(|v| v.to_bits()).collect()) {
                    keep.push(i);
                    data.extend_from_slice(&row);
                }
            }
            Rows::Values { len: m, data }
        };
        Ok(Self {
            rows,
            keep,
            n: s.n() as f64,
            p,
            matrix: OnceLock::new(),
            _t: std::marker::PhantomData,
        })
    }

    fn len(&self) -> usize {
        self.keep.len()
    }

    /// `e_{n,p}(a, b)^p` (or the max for `p = ∞`), comparable to [`Self::level`].
    fn gap(&self, a: usize, b: usize) -> f64 {
        match &self.rows {
            Rows::Bits { words, data } => {
                let (x, y) = (&data[a * words..(a + 1) * words], &data[b * words..(b + 1) * words]);
                let c: u32 = x.iter().zip(y).map(|(u, v)| (u ^ v).count_ones()).sum();
                if self.p.is_infinite() {
                    (c > 0) as u8 as f64
                } else {
                    c as f64 / self.n
                }
            }
            Rows::Values { len, data } => {
                let (x, y) = (&data[a * len..(a + 1) * len], &data[b * len..(b + 1) * len]);
                if self.p.is_infinite() {
                    x.iter().zip(y).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
                } else {
                    let mut acc = crate::scalar::CompensatedSum::new();
                    for (u, v) in x.iter().zip(y) {
                        acc.add((u - v).abs().powf(self.p));
                    }
                    acc.value() / self.n
                }
            }
        }
    }

    /// `ε` on the scale of [`Self::gap`].
    fn level(&self, eps: f64) -> f64 {
        if self.p.is_infinite() {
            eps
        } else {
            eps.powf(self.p)
        }
    }

    /// Sequential net: a candidate becomes a center unless an earlier center is within `eps`.
    fn net(&self, eps: f64, strict_gap: bool) -> Vec<usize> {
        let lvl = self.level(eps);
        let mut centers: Vec<usize> = Vec::new();
        for i in 0..self.len() {
            let close = centers.iter().rev().any(|&c| {
                let g = self.gap(c, i);
                if strict_gap {
                    g <= lvl * (1.0 + 1e-12)
                } else {
                    g <= lvl
                }
            });
            if !close {
                centers.push(i);
            }
        }
        centers
    }

    /// All pairwise gaps, row-major, computed once.
    fn matrix(&self) -> &[f64] {
        self.matrix.get_or_init(|| {
            let k = self.len();
            let mut m = vec![0.0; k * k];
            for i in 0..k {
                for j in i + 1..k {
                    let g = self.gap(i, j);
                    m[i * k + j] = g;
                    m[j * k + i] = g;
                }
            }
            m
        })
    }

    /// Greedy set cover: repeatedly take the candidate whose ball holds the most
    /// uncovered ones, ties to the lowest index.
    fn set_cover(&self, eps: f64) -> Vec<usize> {
        let k = self.len();
        let lvl = self.level(eps) * (1.0 + 1e-12);
        let m = self.matrix();
        let balls: Vec<Vec<u32>> = (0..k)
            .map(|i| (0..k).filter(|&j| m[i * k + j] <= lvl).map(|j| j as u32).collect())
            .collect();
        let mut covered = vec![false; k];
        let mut left = k;
        let mut heap: BinaryHeap<(usize, Reverse<usize>)> = (0..k).map(|i| (balls[i].len(), Reverse(i))).collect();
        let mut centers = Vec::new();
        while left > 0 {
            let (g, Reverse(i)) = heap.pop().expect("uncovered candidates remain");
            let now = balls[i].iter().filter(|&&j| !covered[j as usize]).count();
            if now < g {
                heap.push((now, Reverse(i)));
                continue;
            }
            for &j in &balls[i] {
                if !covered[j as usize] {
                    covered[j as usize] = true;
                    left -= 1;
                }
            }
            centers.push(i);
        }
        centers
    }
}

/// Above this many distinct candidates the cover is the sequential net instead of greedy set cover.
pub const SET_COVER_LIMIT: usize = 2500;

fn check_eps<T: Scalar>(epsilon: T) -> Result<f64> {
    let e = epsilon.f64();
    if !(e > 0.0) || !e.is_finite() {
        return Err(Error::InvalidParameter(format!("radius {e}")));
    }
    Ok(e)
}

/// An `ε`-cover of the candidates under `e_{n,p}`; its size bounds the covering number from above.
pub fn greedy_cover<T: Scalar>(
    s: &Sample<T>,
    cls: &FunctionClass<T>,
    candidates: &[EvalFunction<T>],
    epsilon: T,
    p: T,
) -> Result<CoverResult<T>> {
    let eps = check_eps(epsilon)?;
    let ev = Evaluated::new(s, cls, candidates, p)?;
    Ok(cover_result(&ev, candidates, cover_indices(&ev, eps), epsilon, CoverKind::GreedyCover))
}

fn cover_indices<T: Scalar>(ev: &Evaluated<T>, eps: f64) -> Vec<usize> {
    if ev.len() <= SET_COVER_LIMIT {
        ev.set_cover(eps)
    } else {
        ev.net(eps, true)
    }
}

/// Greedy sequential packing: candidates pairwise more than `ε` apart. Its
/// size bounds the packing number from below.
pub fn maximal_packing<T: Scalar>(
    s: &Sample<T>,
    cls: &FunctionClass<T>,
    candidates: &[EvalFunction<T>],
    epsilon: T,
    p: T,
) -> Result<CoverResult<T>> {
    let eps = check_eps(epsilon)?;
    let ev = Evaluated::new(s, cls, candidates, p)?;
    let idx = ev.net(eps, false);
    Ok(cover_result(&ev, candidates, idx, epsilon, CoverKind::MaximalPacking))
}

fn cover_result<T: Scalar>(
    ev: &Evaluated<T>,
    candidates: &[EvalFunction<T>],
    idx: Vec<usize>,
    radius: T,
    kind: CoverKind,
) -> CoverResult<T> {
    CoverResult {
        size: idx.len(),
        centers: idx.into_iter().map(|i| candidates[ev.keep[i]].clone()).collect(),
        radius,
        kind,
        distinct: ev.len(),
    }
}

/// Entropy integral estimate with the covering sizes it used.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyIntegral {
    pub value: f64,
    /// `(ε, greedy cover size)` on the grid points at or below `δ`.
    pub sizes: Vec<(f64, usize)>,
}

/// `∫_0^δ sqrt(ln N(ε)) dε` with `N` the greedy cover size under `e_{n,2}`.
///
/// Sizes are taken on a log grid of `grid` points fixed from `2M` downward
/// (independent of `δ`), replaced by their monotone envelope, and integrated
/// by the trapezoid rule; below the grid the integrand is held constant.
pub fn entropy_integral<T: Scalar>(
    s: &Sample<T>,
    cls: &FunctionClass<T>,
    candidates: &[EvalFunction<T>],
    delta: T,
    grid: usize,
) -> Result<EntropyIntegral> {
    let delta = check_eps(delta)?;
    if grid < 2 {
        return Err(Error::InvalidParameter("entropy grid needs at least two points".into()));
    }
    let ev = Evaluated::new(s, cls, candidates, T::lit(2.0))?;
    let top = 2.0 * cls.bound().f64();
    // ε_k = top · 10^{-6 k / (grid - 1)}, decreasing
    let eps: Vec<f64> = (0..grid).map(|k| top * 10f64.powf(-6.0 * k as f64 / (grid - 1) as f64)).collect();
    let sizes: Vec<usize> = eps.iter().map(|&e| if e > top / 2.0 { 1 } else { cover_indices(&ev, e).len() }).collect();
    let mut h: Vec<f64> = sizes.iter().map(|&n| (n.max(1) as f64).ln().sqrt()).collect();
    for k in 1..grid {
        h[k] = h[k].max(h[k - 1]);
    }
    let mut value = 0.0;
    for k in 0..grid - 1 {
        let (b, a) = (eps[k], eps[k + 1]);
        if a >= delta {
            continue;
        }
        let hi = b.min(delta);
        let interp = |x: f64| h[k + 1] + (h[k] - h[k + 1]) * (x - a) / (b - a);
        value += 0.5 * (hi - a) * (interp(hi) + h[k + 1]);
    }
    let last = eps[grid - 1];
    value += last.min(delta) * h[grid - 1];
    Ok(EntropyIntegral {
        value,
        sizes: eps.iter().copied().zip(sizes).filter(|(e, _)| *e <= delta).collect(),
    })
}

/// Closed-form bound on the entropy integral implied by the covering bound at `p = 2`:
/// `δ(√ln c_v + √(2v ln 2) + √(v ln ratio)) + √(2v) ∫_0^δ √(ln₊(2M/ε)) dε`.
pub fn vc_entropy_bound(delta: f64, v: u32, ratio: f64, bound: f64) -> Result<f64> {
    if !(delta > 0.0) || v < 1 || !(ratio >= 1.0) || !(bound > 0.0) {
        return Err(Error::InvalidParameter("entropy bound parameters".into()));
    }
    let vf = v as f64;
    let c = vc_constant(v).ln;
    let lin = delta * (c.sqrt() + (2.0 * vf * 2f64.ln()).sqrt() + (vf * ratio.ln()).sqrt());
    // ε = δ e^{-t} removes the endpoint singularity
    let l0 = (2.0 * bound / delta).ln();
    let tail = integrate(|t| delta * (-t).exp() * (l0 + t).max(0.0).sqrt(), 0.0, 60.0, 1e-13 * delta);
    Ok(lin + (2.0 * vf).sqrt() * tail)
}
