use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};

use super::point::Point;

const UNIT_TOL: f64 = 1e-12;

/// Side of a threshold kept by a half-line indicator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `1(y <= t)`
    Below,
    /// `1(y >= t)`
    Above,
}

impl Orientation {
    pub fn sign(self) -> i8 {
        match self {
            Orientation::Below => 1,
            Orientation::Above => -1,
        }
    }
}

/// Closed half-space `{y : <y, u> <= <x, u>}` with boundary point `x` and unit normal `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpace<T> {
    point: Point<T>,
    normal: Vec<T>,
    offset: T,
}

impl<T: Scalar> HalfSpace<T> {
    pub fn new(point: Point<T>, normal: Vec<T>) -> Result<Self> {
        if normal.len() != point.dim() {
            return Err(Error::DimensionMismatch {
                expected: point.dim(),
                found: normal.len(),
            });
        }
        let norm = dot(&normal, &normal).sqrt();
        if !norm.is_finite() || (norm - T::one()).abs().f64() > UNIT_TOL.max(4.0 * T::epsilon().f64()) {
            return Err(Error::NotUnitVector { norm: norm.f64() });
        }
        let offset = dot(point.coords(), &normal);
        Ok(Self {
            point,
            normal,
            offset,
        })
    }

    /// Half-space with the normal rescaled to unit length first.
    pub fn normalized(point: Point<T>, direction: &[T]) -> Result<Self> {
        let norm = dot(direction, direction).sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::InvalidParameter("zero or non-finite direction".into()));
        }
        Self::new(point, direction.iter().map(|&c| c / norm).collect())
    }

    pub fn point(&self) -> &Point<T> {
        &self.point
    }

    pub fn normal(&self) -> &[T] {
        &self.normal
    }

    /// `<x, u>`, the threshold on projections.
    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn contains(&self, y: &[T]) -> bool {
        dot(y, &self.normal) <= self.offset
    }
}

/// A test function given by an explicit table of point values.
#[derive(Clone, Debug, PartialEq)]
pub struct Table<T> {
    dim: usize,
    entries: Vec<(Vec<T>, T)>,
    bound: T,
}

impl<T: Scalar> Table<T> {
    pub fn new(dim: usize, entries: Vec<(Vec<T>, T)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let mut bound = T::zero();
        for (x, v) in &entries {
            if x.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: x.len(),
                });
            }
            if !v.is_finite() || x.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite("table entry".into()));
            }
            bound = bound.max(v.abs());
        }
        if bound == T::zero() {
            bound = T::one();
        }
        Ok(Self { dim, entries, bound })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(Vec<T>, T)] {
        &self.entries
    }

    pub fn lookup(&self, y: &[T]) -> Option<T> {
        self.entries.iter().find(|(x, _)| x.as_slice() == y).map(|(_, v)| *v)
    }
}

/// A bounded test function `f: R^d -> R`.
#[derive(Clone, Debug, PartialEq)]
pub enum EvalFunction<T> {
    HalfSpace(HalfSpace<T>),
    HalfLine { threshold: T, orientation: Orientation },
    /// `y -> exp(theta * y)` on the domain `[low, high]` of `R`.
    Exponential { theta: T, low: T, high: T },
    Constant(T),
    Tabulated(Table<T>),
}

impl<T: Scalar> EvalFunction<T> {
    pub fn half_space(x: Point<T>, u: Vec<T>) -> Result<Self> {
        HalfSpace::new(x, u).map(Self::HalfSpace)
    }

    pub fn below(threshold: T) -> Self {
        Self::HalfLine {
            threshold,
            orientation: Orientation::Below,
        }
    }

    pub fn above(threshold: T) -> Self {
        Self::HalfLine {
            threshold,
            orientation: Orientation::Above,
        }
    }

    pub fn exponential(theta: T, low: T, high: T) -> Result<Self> {
        if !(low <= high) || !theta.is_finite() || !low.is_finite() || !high.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "exponential with theta {theta} on [{low}, {high}]"
            )));
        }
        Ok(Self::Exponential { theta, low, high })
    }

    pub fn tabulated(dim: usize, entries: Vec<(Vec<T>, T)>) -> Result<Self> {
        Table::new(dim, entries).map(Self::Tabulated)
    }

    /// Required input dimension, if the function fixes one.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::HalfSpace(h) => Some(h.dim()),
            Self::HalfLine { .. } | Self::Exponential { .. } => Some(1),
            Self::Constant(_) => None,
            Self::Tabulated(t) => Some(t.dim()),
        }
    }

    /// Sup-norm bound `M`.
    pub fn bound(&self) -> T {
        match self {
            Self::HalfSpace(_) | Self::HalfLine { .. } => T::one(),
            Self::Exponential { theta, low, high } => (*theta * *low).max(*theta * *high).exp(),
            Self::Constant(c) => c.abs().max(T::min_positive_value()),
            Self::Tabulated(t) => t.bound,
        }
    }

    pub fn is_indicator(&self) -> bool {
        matches!(self, Self::HalfSpace(_) | Self::HalfLine { .. })
    }

    pub fn check_dim(&self, d: usize) -> Result<()> {
        match self.dim() {
            Some(e) if e != d => Err(Error::DimensionMismatch { expected: e, found: d }),
            _ => Ok(()),
        }
    }

    /// `f(y)`, with `|f(y)| <= M` checked.
    pub fn eval(&self, y: &[T]) -> Result<T> {
        self.check_dim(y.len())?;
        let v = match self {
            Self::HalfSpace(h) => indicator(h.contains(y)),
            Self::HalfLine {
                threshold,
                orientation,
            } => indicator(match orientation {
                Orientation::Below => y[0] <= *threshold,
                Orientation::Above => y[0] >= *threshold,
            }),
            Self::Exponential { theta, low, high } => {
                if y[0] < *low || y[0] > *high {
                    return Err(Error::OutOfRange(format!(
                        "{} outside the exponential domain [{low}, {high}]",
                        y[0]
                    )));
                }
                (*theta * y[0]).exp()
            }
            Self::Constant(c) => *c,
            Self::Tabulated(t) => t
                .lookup(y)
                .ok_or_else(|| Error::OutOfRange(format!("no table entry for {y:?}")))?,
        };
        if v.is_nan() {
            return Err(Error::NonFinite(format!("f({y:?})")));
        }
        let m = self.bound();
        if v.abs() > m * (T::one() + T::lit(1e-12)) {
            return Err(Error::BoundExceeded {
                value: v.f64(),
                bound: m.f64(),
            });
        }
        Ok(v)
    }
}

#[inline]
fn indicator<T: Scalar>(b: bool) -> T {
    if b {
        T::one()
    } else {
        T::zero()
    }
}

/// Shape of a [`FunctionClass`].
#[derive(Clone, Debug, PartialEq)]
pub enum ClassKind<T> {
    HalfSpaces { dim: usize },
    HalfLines,
    /// `{ y -> exp(theta y) : |theta| <= radius }` on `[low, high]`.
    Exponentials { low: T, high: T, radius: T },
    FiniteList(Vec<EvalFunction<T>>),
}

/// A parameterized family of test functions with envelope bound `M` and VC dimension `v`.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionClass<T> {
    kind: ClassKind<T>,
    bound: T,
    vc_dim: u32,
}

impl<T: Scalar> FunctionClass<T> {
    pub fn half_spaces(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if dim == 1 {
            return Ok(Self::half_lines());
        }
        Ok(Self {
            kind: ClassKind::HalfSpaces { dim },
            bound: T::one(),
            vc_dim: dim as u32 + 1,
        })
    }

    pub fn half_lines() -> Self {
        Self {
            kind: ClassKind::HalfLines,
            bound: T::one(),
            vc_dim: 2,
        }
    }

    pub fn exponentials(low: T, high: T, radius: T) -> Result<Self> {
        if !(low <= high) || !(radius >= T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "exponential class on [{low}, {high}] with radius {radius}"
            )));
        }
        let bound = (radius * low.abs().max(high.abs())).exp();
        if !bound.is_finite() {
            return Err(Error::InvalidParameter("exponential envelope overflows".into()));
        }
        Ok(Self {
            kind: ClassKind::Exponentials { low, high, radius },
            bound,
            vc_dim: 3,
        })
    }

    pub fn finite(functions: Vec<EvalFunction<T>>, vc_dim: u32) -> Result<Self> {
        if functions.is_empty() {
            return Err(Error::Empty("function list"));
        }
        if vc_dim == 0 {
            return Err(Error::InvalidParameter("VC dimension must be at least 1".into()));
        }
        let dims: Vec<usize> = functions.iter().filter_map(|f| f.dim()).collect();
        if let Some(&d) = dims.first() {
            if let Some(&e) = dims.iter().find(|&&e| e != d) {
                return Err(Error::DimensionMismatch { expected: d, found: e });
            }
        }
        let bound = functions.iter().map(|f| f.bound()).fold(T::zero(), T::max);
        Ok(Self {
            kind: ClassKind::FiniteList(functions),
            bound,
            vc_dim,
        })
    }

    pub fn kind(&self) -> &ClassKind<T> {
        &self.kind
    }

    pub fn bound(&self) -> T {
        self.bound
    }

    pub fn vc_dim(&self) -> u32 {
        self.vc_dim
    }

    pub fn dim(&self) -> Option<usize> {
        match &self.kind {
            ClassKind::HalfSpaces { dim } => Some(*dim),
            ClassKind::HalfLines | ClassKind::Exponentials { .. } => Some(1),
            ClassKind::FiniteList(fs) => fs.iter().find_map(|f| f.dim()),
        }
    }

    pub fn is_indicator_class(&self) -> bool {
        match &self.kind {
            ClassKind::HalfSpaces { .. } | ClassKind::HalfLines => true,
            ClassKind::Exponentials { .. } => false,
            ClassKind::FiniteList(fs) => fs.iter().all(|f| f.is_indicator()),
        }
    }
}
