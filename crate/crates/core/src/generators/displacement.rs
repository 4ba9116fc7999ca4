use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::EvalFunction;
use crate::quadrature;
use crate::scalar::{dot, Scalar};

use super::rng::RngStream;

const WEIGHT_TOL: f64 = 1e-12;
const QUAD_TOL: f64 = 1e-12;

/// A weighted atom of a discrete displacement law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom<T> {
    pub point: Vec<T>,
    pub weight: T,
}

/// Law of a single displacement `X` in `R^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RawDisplacement<T>",
    into = "RawDisplacement<T>",
    bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>")
)]
pub enum DisplacementLaw<T: Scalar> {
    /// Uniform on the box `[low, high]`.
    Uniform { low: Vec<T>, high: Vec<T> },
    /// Independent normal coordinates.
    Gaussian { mean: Vec<T>, variance: Vec<T> },
    Discrete { atoms: Vec<Atom<T>> },
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawDisplacement<T> {
    Uniform { low: Vec<T>, high: Vec<T> },
    Gaussian { mean: Vec<T>, variance: Vec<T> },
    Discrete { atoms: Vec<Atom<T>> },
}

impl<T: Scalar> TryFrom<RawDisplacement<T>> for DisplacementLaw<T> {
    type Error = Error;

    fn try_from(raw: RawDisplacement<T>) -> Result<Self> {
        match raw {
            RawDisplacement::Uniform { low, high } => Self::uniform(low, high),
            RawDisplacement::Gaussian { mean, variance } => Self::gaussian(mean, variance),
            RawDisplacement::Discrete { atoms } => Self::discrete(atoms),
        }
    }
}

impl<T: Scalar> From<DisplacementLaw<T>> for RawDisplacement<T> {
    fn from(law: DisplacementLaw<T>) -> Self {
        match law {
            DisplacementLaw::Uniform { low, high } => RawDisplacement::Uniform { low, high },
            DisplacementLaw::Gaussian { mean, variance } => RawDisplacement::Gaussian { mean, variance },
            DisplacementLaw::Discrete { atoms } => RawDisplacement::Discrete { atoms },
        }
    }
}

fn finite_vec<T: Scalar>(v: &[T], what: &str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::InvalidParameter(format!("{what} is empty")));
    }
    if v.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite(what.to_string()));
    }
    Ok(())
}

/// Standard normal cdf.
pub(crate) fn normal_cdf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
}

/// `P(Σ w_k V_k <= t)` for independent uniforms `V_k` on `[0, 1]` and weights `w_k >= 0`.
fn uniform_sum_cdf(weights: &mut Vec<f64>, t: f64, strict: bool) -> f64 {
    let wmax = weights.iter().cloned().fold(0.0, f64::max);
    weights.retain(|&w| w > 1e-15 * wmax);
    if weights.is_empty() {
        return f64::from(u8::from(if strict { t > 0.0 } else { t >= 0.0 }));
    }
    weights.sort_by(|a, b| a.total_cmp(b));
    sorted_uniform_sum_cdf(weights, t)
}

/// Same as [`uniform_sum_cdf`] with positive weights sorted ascending.
fn sorted_uniform_sum_cdf(w: &[f64], t: f64) -> f64 {
    let total: f64 = w.iter().sum();
    if t <= 0.0 {
        return 0.0;
    }
    if t >= total {
        return 1.0;
    }
    match w.len() {
        1 => t / w[0],
        2 => {
            let (a, b) = (w[0], w[1]);
            if t <= a {
                t * t / (2.0 * a * b)
            } else if t <= b {
                (t - 0.5 * a) / b
            } else {
                let r = a + b - t;
                1.0 - r * r / (2.0 * a * b)
            }
        }
        d if w[0] < 0.1 * w[d - 1] => {
            // Condition on the smallest term; inclusion-exclusion would cancel badly here.
            let rule = gl32();
            let mut s = 0.0;
            for (x, g) in rule.nodes.iter().zip(&rule.weights) {
                let v = 0.5 * (x + 1.0);
                s += 0.5 * g * sorted_uniform_sum_cdf(&w[1..], t - w[0] * v);
            }
            s.clamp(0.0, 1.0)
        }
        d => {
            let mut s = 0.0;
            for mask in 0u32..(1 << d) {
                let shift: f64 = (0..d).filter(|k| mask & (1 << k) != 0).map(|k| w[k]).sum();
                let r = t - shift;
                if r > 0.0 {
                    let term = r.powi(d as i32);
                    if mask.count_ones() % 2 == 0 {
                        s += term;
                    } else {
                        s -= term;
                    }
                }
            }
            let mut denom: f64 = w.iter().product();
            for k in 2..=d {
                denom *= k as f64;
            }
            (s / denom).clamp(0.0, 1.0)
        }
    }
}

fn gl32() -> &'static quadrature::Rule {
    static RULE: std::sync::OnceLock<quadrature::Rule> = std::sync::OnceLock::new();
    RULE.get_or_init(|| quadrature::gauss_legendre(32))
}

impl<T: Scalar> DisplacementLaw<T> {
    pub fn uniform(low: Vec<T>, high: Vec<T>) -> Result<Self> {
        finite_vec(&low, "uniform low corner")?;
        finite_vec(&high, "uniform high corner")?;
        if low.len() != high.len() {
            return Err(Error::DimensionMismatch {
                expected: low.len(),
                found: high.len(),
            });
        }
        if low.iter().zip(&high).any(|(a, b)| !(a < b)) {
            return Err(Error::InvalidParameter("uniform box needs low < high".into()));
        }
        Ok(Self::Uniform { low, high })
    }

    /// Uniform on `[0, 1]^d`.
    pub fn unit_cube(dim: usize) -> Self {
        Self::Uniform {
            low: vec![T::zero(); dim],
            high: vec![T::one(); dim],
        }
    }

    pub fn gaussian(mean: Vec<T>, variance: Vec<T>) -> Result<Self> {
        finite_vec(&mean, "gaussian mean")?;
        finite_vec(&variance, "gaussian variance")?;
        if mean.len() != variance.len() {
            return Err(Error::DimensionMismatch {
                expected: mean.len(),
                found: variance.len(),
            });
        }
        if variance.iter().any(|v| !(*v > T::zero())) {
            return Err(Error::InvalidParameter("gaussian variances must be positive".into()));
        }
        Ok(Self::Gaussian { mean, variance })
    }

    pub fn discrete(atoms: Vec<Atom<T>>) -> Result<Self> {
        let first = atoms.first().ok_or(Error::Empty("discrete atoms"))?;
        let d = first.point.len();
        let mut total = 0.0;
        for a in &atoms {
            finite_vec(&a.point, "atom")?;
            if a.point.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: a.point.len(),
                });
            }
            if !(a.weight >= T::zero()) || !a.weight.is_finite() {
                return Err(Error::InvalidParameter(format!("atom weight {}", a.weight)));
            }
            total += a.weight.f64();
        }
        let tol = WEIGHT_TOL.max(16.0 * T::epsilon().f64());
        if (total - 1.0).abs() > tol {
            return Err(Error::InvalidParameter(format!("atom weights sum to {total}")));
        }
        Ok(Self::Discrete { atoms })
    }

    /// Unit point mass at `point`.
    pub fn point_mass(point: Vec<T>) -> Result<Self> {
        Self::discrete(vec![Atom {
            point,
            weight: T::one(),
        }])
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Uniform { low, .. } => low.len(),
            Self::Gaussian { mean, .. } => mean.len(),
            Self::Discrete { atoms } => atoms[0].point.len(),
        }
    }

    pub fn is_continuous(&self) -> bool {
        !matches!(self, Self::Discrete { .. })
    }

    pub fn atoms(&self) -> Option<&[Atom<T>]> {
        match self {
            Self::Discrete { atoms } => Some(atoms),
            _ => None,
        }
    }

    /// Appends one draw of `X` to `out`.
    pub fn sample_into(&self, rng: &mut RngStream, out: &mut Vec<T>) {
        match self {
            Self::Uniform { low, high } => {
                for (a, b) in low.iter().zip(high) {
                    let u: f64 = rng.random();
                    out.push(*a + (*b - *a) * T::lit(u));
                }
            }
            Self::Gaussian { mean, variance } => {
                for (m, v) in mean.iter().zip(variance) {
                    let z: f64 = StandardNormal.sample(rng);
                    out.push(*m + v.sqrt() * T::lit(z));
                }
            }
            Self::Discrete { atoms } => {
                let u: f64 = rng.random();
                let mut cum = 0.0;
                let mut pick = atoms.len() - 1;
                for (i, a) in atoms.iter().enumerate() {
                    cum += a.weight.f64();
                    if u < cum {
                        pick = i;
                        break;
                    }
                }
                out.extend_from_slice(&atoms[pick].point);
            }
        }
    }

    /// `P(<X, u> <= c)`, or `P(<X, u> < c)` when `strict`.
    pub fn projection_cdf(&self, u: &[T], c: T, strict: bool) -> T {
        debug_assert_eq!(u.len(), self.dim());
        match self {
            Self::Uniform { low, high } if u.len() == 1 => {
                let (w, a) = (u[0].f64() * (high[0] - low[0]).f64(), u[0].f64() * low[0].f64());
                let t = c.f64() - a.min(a + w);
                let w = w.abs();
                T::lit(if w == 0.0 {
                    f64::from(u8::from(if strict { t > 0.0 } else { t >= 0.0 }))
                } else {
                    (t / w).clamp(0.0, 1.0)
                })
            }
            Self::Uniform { low, high } => {
                let mut base = 0.0;
                let mut weights = Vec::with_capacity(u.len());
                for ((&uk, &a), &b) in u.iter().zip(low).zip(high) {
                    let w = uk.f64() * (b - a).f64();
                    base += uk.f64() * a.f64();
                    if w < 0.0 {
                        base += w;
                    }
                    weights.push(w.abs());
                }
                T::lit(uniform_sum_cdf(&mut weights, c.f64() - base, strict))
            }
            Self::Gaussian { mean, variance } => {
                let m: f64 = dot(mean, u).f64();
                let v: f64 = u.iter().zip(variance).map(|(&uk, &s)| (uk * uk * s).f64()).sum();
                if v == 0.0 {
                    let t = c.f64() - m;
                    return T::lit(f64::from(u8::from(if strict { t > 0.0 } else { t >= 0.0 })));
                }
                T::lit(normal_cdf((c.f64() - m) / v.sqrt()))
            }
            Self::Discrete { atoms } => atoms
                .iter()
                .filter(|a| {
                    let p = dot(&a.point, u);
                    if strict {
                        p < c
                    } else {
                        p <= c
                    }
                })
                .fold(T::zero(), |s, a| s + a.weight),
        }
    }

    /// `E[e^{θX}]` in `d = 1` by closed form.
    pub fn mgf(&self, theta: T) -> Result<T> {
        if self.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: self.dim(),
            });
        }
        let v = match self {
            Self::Uniform { low, high } => {
                let (a, b) = (low[0].f64(), high[0].f64());
                let th = theta.f64();
                let h = th * (b - a);
                if h == 0.0 {
                    1.0
                } else {
                    (th * a).exp() * h.exp_m1() / h
                }
            }
            Self::Gaussian { mean, variance } => {
                let th = theta.f64();
                (th * mean[0].f64() + 0.5 * th * th * variance[0].f64()).exp()
            }
            Self::Discrete { atoms } => atoms
                .iter()
                .map(|a| a.weight.f64() * (theta * a.point[0]).f64().exp())
                .sum(),
        };
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("moment generating function at {theta}")));
        }
        Ok(T::lit(v))
    }

    /// `E[f(X)]`.
    pub fn expect(&self, f: &EvalFunction<T>) -> Result<T> {
        f.check_dim(self.dim())?;
        if let Self::Discrete { atoms } = self {
            let mut s = T::zero();
            for a in atoms {
                if a.weight > T::zero() {
                    s += a.weight * f.eval(&a.point)?;
                }
            }
            return Ok(s);
        }
        match f {
            EvalFunction::Constant(c) => Ok(*c),
            EvalFunction::HalfSpace(h) => Ok(self.projection_cdf(h.normal(), h.offset(), false)),
            EvalFunction::HalfLine {
                threshold,
                orientation,
            } => Ok(match orientation {
                crate::measure::Orientation::Below => self.projection_cdf(&[T::one()], *threshold, false),
                crate::measure::Orientation::Above => {
                    self.projection_cdf(&[-T::one()], -*threshold, false)
                }
            }),
            EvalFunction::Exponential { theta, .. } => match self {
                Self::Uniform { low, high } => {
                    let (a, b) = (low[0].f64(), high[0].f64());
                    let th = theta.f64();
                    let v = quadrature::integrate(|y| (th * y).exp(), a, b, QUAD_TOL * (b - a)) / (b - a);
                    Ok(T::lit(v))
                }
                _ => self.mgf(*theta),
            },
            EvalFunction::Tabulated(_) => Err(Error::Unsupported(
                "tabulated functions need a discrete displacement law".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn uniform_projection_in_two_dimensions() {
        let law = DisplacementLaw::<f64>::unit_cube(2);
        assert_relative_eq!(law.projection_cdf(&[1.0, 0.0], 0.5, false), 0.5);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // x + y <= 1 cuts the square in half
        assert_relative_eq!(law.projection_cdf(&[s, s], s, false), 0.5, epsilon = 1e-15);
        // x + y <= 0.5 : area 1/8
        assert_relative_eq!(law.projection_cdf(&[s, s], 0.5 * s, false), 0.125, epsilon = 1e-15);
        // -x <= -0.25 : x >= 0.25
        assert_relative_eq!(law.projection_cdf(&[-1.0, 0.0], -0.25, false), 0.75);
    }

    #[test]
    fn uniform_projection_matches_monte_carlo_in_three_dimensions() {
        let law = DisplacementLaw::<f64>::unit_cube(3);
        let u = [0.48, -0.6, 0.64];
        let c = 0.1;
        let exact = law.projection_cdf(&u, c, false);
        let mut rng = RngStream::new(5, 0);
        let mut buf = Vec::new();
        let n = 200_000;
        let mut hit = 0;
        for _ in 0..n {
            buf.clear();
            law.sample_into(&mut rng, &mut buf);
            if dot(&buf, &u) <= c {
                hit += 1;
            }
        }
        let p = hit as f64 / n as f64;
        assert!((p - exact).abs() < 4.0 * (exact * (1.0 - exact) / n as f64).sqrt());
    }

    #[test]
    fn gaussian_projection() {
        let law = DisplacementLaw::gaussian(vec![1.0, 0.0], vec![4.0, 1.0]).unwrap();
        assert_relative_eq!(law.projection_cdf(&[1.0, 0.0], 1.0, false), 0.5, epsilon = 1e-15);
        assert_relative_eq!(
            law.projection_cdf(&[1.0, 0.0], 3.0, false),
            normal_cdf(1.0),
            epsilon = 1e-15
        );
    }

    #[test]
    fn mgf_routes_agree() {
        let law = DisplacementLaw::uniform(vec![-0.5], vec![1.5]).unwrap();
        for th in [-3.0f64, -0.1, 0.0, 0.7, 4.0] {
            let f = EvalFunction::exponential(th, -0.5, 1.5).unwrap();
            let q = law.expect(&f).unwrap();
            let c = law.mgf(th).unwrap();
            assert!((q - c).abs() < 1e-12 * c.max(1.0), "{th}: {q} vs {c}");
        }
        let g = DisplacementLaw::gaussian(vec![0.0], vec![1.0]).unwrap();
        assert_relative_eq!(g.mgf(1.0).unwrap(), 0.5f64.exp());
    }

    #[test]
    fn discrete_strict_and_closed() {
        let law = DisplacementLaw::discrete(vec![
            Atom { point: vec![0.0], weight: 0.25 },
            Atom { point: vec![1.0], weight: 0.75 },
        ])
        .unwrap();
        assert_eq!(law.projection_cdf(&[1.0], 0.0, false), 0.25);
        assert_eq!(law.projection_cdf(&[1.0], 0.0, true), 0.0);
        assert!(DisplacementLaw::discrete(vec![Atom { point: vec![0.0], weight: 0.5 }]).is_err());
    }

    #[test]
    fn json_form() {
        let law: DisplacementLaw<f64> =
            serde_json::from_str(r#"{"kind":"uniform","low":[0],"high":[1]}"#).unwrap();
        assert_eq!(law, DisplacementLaw::unit_cube(1));
        let bad: std::result::Result<DisplacementLaw<f64>, _> =
            serde_json::from_str(r#"{"kind":"uniform","low":[1],"high":[0]}"#);
        assert!(bad.is_err());
        let d: DisplacementLaw<f64> =
            serde_json::from_str(r#"{"kind":"discrete","atoms":[{"point":[0.0],"weight":1.0}]}"#).unwrap();
        assert_eq!(d.dim(), 1);
    }
}
