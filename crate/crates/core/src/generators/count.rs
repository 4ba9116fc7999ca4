use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gh128;

use super::rng::RngStream;

const PMF_TOL: f64 = 1e-12;
/// Above this intensity the zero-truncated Poisson draw switches from inversion to rejection of zeros.
const INVERSION_LIMIT: f64 = 30.0;

/// `ln(e^t - 1)` for `t > 0`.
pub(crate) fn ln_expm1(t: f64) -> f64 {
    if t > 30.0 {
        t + (-(-t).exp()).ln_1p()
    } else {
        t.exp_m1().ln()
    }
}

fn ln_factorial(k: u64) -> f64 {
    statrs::function::gamma::ln_gamma(k as f64 + 1.0)
}

fn log_sum_exp(terms: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = terms.into_iter().collect();
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY || m == f64::INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Law of the Cox intensity `T`; given `T = t`, `L` is zero-truncated Poisson(t).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mixing {
    /// Atoms `(t_i, w_i)`.
    Discrete { atoms: Vec<(f64, f64)> },
    /// `T = exp(m + s Z)`, `Z` standard normal.
    LogNormal { m: f64, s: f64 },
}

impl Mixing {
    pub fn point(t: f64) -> Self {
        Mixing::Discrete {
            atoms: vec![(t, 1.0)],
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Mixing::Discrete { atoms } => {
                if atoms.is_empty() {
                    return Err(Error::Empty("mixing atoms"));
                }
                let mut total = 0.0;
                for &(t, w) in atoms {
                    if !(t > 0.0) || !t.is_finite() || !(w >= 0.0) || !w.is_finite() {
                        return Err(Error::InvalidParameter(format!("mixing atom ({t}, {w})")));
                    }
                    total += w;
                }
                if (total - 1.0).abs() > PMF_TOL {
                    return Err(Error::InvalidParameter(format!(
                        "mixing weights sum to {total}"
                    )));
                }
            }
            Mixing::LogNormal { m, s } => {
                if !m.is_finite() || !(*s >= 0.0) || !s.is_finite() {
                    return Err(Error::InvalidParameter(format!("log-normal mixing ({m}, {s})")));
                }
            }
        }
        Ok(())
    }

    /// `E[g(T)]`, exact for discrete mixing and by 128-node Gauss-Hermite otherwise.
    fn expect(&self, mut g: impl FnMut(f64) -> f64) -> f64 {
        match self {
            Mixing::Discrete { atoms } => atoms.iter().map(|&(t, w)| w * g(t)).sum(),
            Mixing::LogNormal { m, s } => {
                let r = gh128();
                let norm = std::f64::consts::PI.sqrt();
                r.nodes
                    .iter()
                    .zip(&r.weights)
                    .map(|(&x, &w)| w * g((m + s * std::f64::consts::SQRT_2 * x).exp()))
                    .sum::<f64>()
                    / norm
            }
        }
    }

    fn draw(&self, rng: &mut RngStream) -> f64 {
        match self {
            Mixing::Discrete { atoms } => {
                let u: f64 = rng.random();
                let mut cum = 0.0;
                for &(t, w) in atoms {
                    cum += w;
                    if u < cum {
                        return t;
                    }
                }
                atoms.iter().rev().find(|a| a.1 > 0.0).unwrap_or(&atoms[0]).0
            }
            Mixing::LogNormal { m, s } => {
                let z: f64 = StandardNormal.sample(rng);
                (m + s * z).exp()
            }
        }
    }
}

/// Offspring / pattern-size law. Support is contained in `{1, 2, ...}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawCountLaw", into = "RawCountLaw")]
pub enum CountLaw {
    Fixed { k: u64 },
    /// `L - 1 ~ Poisson(lambda)`.
    ShiftedPoisson { lambda: f64 },
    Cox { mixing: Mixing },
    /// `probs[k - 1] = P(L = k)`.
    Pmf { probs: Vec<f64> },
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawCountLaw {
    Fixed { k: u64 },
    ShiftedPoisson { lambda: f64 },
    Cox { mixing: Mixing },
    Pmf { probs: Vec<f64> },
}

impl TryFrom<RawCountLaw> for CountLaw {
    type Error = Error;

    fn try_from(raw: RawCountLaw) -> Result<Self> {
        let law = match raw {
            RawCountLaw::Fixed { k } => CountLaw::Fixed { k },
            RawCountLaw::ShiftedPoisson { lambda } => CountLaw::ShiftedPoisson { lambda },
            RawCountLaw::Cox { mixing } => CountLaw::Cox { mixing },
            RawCountLaw::Pmf { probs } => CountLaw::Pmf { probs },
        };
        law.validate()?;
        Ok(law)
    }
}

impl From<CountLaw> for RawCountLaw {
    fn from(law: CountLaw) -> Self {
        match law {
            CountLaw::Fixed { k } => RawCountLaw::Fixed { k },
            CountLaw::ShiftedPoisson { lambda } => RawCountLaw::ShiftedPoisson { lambda },
            CountLaw::Cox { mixing } => RawCountLaw::Cox { mixing },
            CountLaw::Pmf { probs } => RawCountLaw::Pmf { probs },
        }
    }
}

/// Mean and second moment of a count law, with its moment generating function where finite.
#[derive(Clone, Debug)]
pub struct CountMoments {
    pub mean: f64,
    pub second_moment: f64,
    law: CountLaw,
}

impl CountMoments {
    pub fn variance(&self) -> f64 {
        self.second_moment - self.mean * self.mean
    }

    pub fn has_mgf(&self) -> bool {
        self.law.log_mgf(0.0).is_some()
    }

    /// `E[e^{θL}]`, `None` when the law has no usable mgf.
    pub fn mgf(&self, theta: f64) -> Option<f64> {
        self.law.log_mgf(theta).map(f64::exp)
    }
}

pub fn count_moments(law: &CountLaw) -> CountMoments {
    CountMoments {
        mean: law.mean(),
        second_moment: law.second_moment(),
        law: law.clone(),
    }
}

/// `P(L = k)` for Cox counts: `E[T^k / (k! (e^T - 1))]`.
pub fn cox_pmf(k: u64, mixing: &Mixing) -> Result<f64> {
    if k < 1 {
        return Err(Error::OutOfRange("cox_pmf needs k >= 1".into()));
    }
    mixing.validate()?;
    Ok(mixing.expect(|t| zt_poisson_pmf(k, t)))
}

fn zt_poisson_pmf(k: u64, t: f64) -> f64 {
    if k <= 20 && t <= 30.0 {
        let mut fact = 1.0;
        for i in 2..=k {
            fact *= i as f64;
        }
        t.powi(k as i32) / (fact * t.exp_m1())
    } else {
        (k as f64 * t.ln() - ln_factorial(k) - ln_expm1(t)).exp()
    }
}

/// `E[L]` and `E[L^2]` for zero-truncated Poisson(t).
fn zt_poisson_moments(t: f64) -> (f64, f64) {
    let q = -(-t).exp_m1();
    (t / q, (t + t * t) / q)
}

fn sample_poisson(lambda: f64, rng: &mut RngStream) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    let d = Poisson::new(lambda).expect("positive finite Poisson mean");
    d.sample(rng) as u64
}

fn sample_zt_poisson(t: f64, rng: &mut RngStream) -> u64 {
    if t > INVERSION_LIMIT {
        loop {
            let k = sample_poisson(t, rng);
            if k > 0 {
                return k;
            }
        }
    }
    let u: f64 = rng.random();
    let mut k = 1u64;
    let mut p = if t > 0.0 { t / t.exp_m1() } else { 1.0 };
    let mut cum = p;
    while u >= cum {
        k += 1;
        p *= t / k as f64;
        let next = cum + p;
        if next == cum || k >= 10_000 {
            break;
        }
        cum = next;
    }
    k
}

impl CountLaw {
    pub fn fixed(k: u64) -> Result<Self> {
        let law = CountLaw::Fixed { k };
        law.validate()?;
        Ok(law)
    }

    pub fn shifted_poisson(lambda: f64) -> Result<Self> {
        let law = CountLaw::ShiftedPoisson { lambda };
        law.validate()?;
        Ok(law)
    }

    pub fn cox(mixing: Mixing) -> Result<Self> {
        let law = CountLaw::Cox { mixing };
        law.validate()?;
        Ok(law)
    }

    pub fn pmf(probs: Vec<f64>) -> Result<Self> {
        let law = CountLaw::Pmf { probs };
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CountLaw::Fixed { k } => {
                if *k < 1 {
                    return Err(Error::InvalidParameter("fixed count must be at least 1".into()));
                }
            }
            CountLaw::ShiftedPoisson { lambda } => {
                if !(*lambda >= 0.0) || !lambda.is_finite() {
                    return Err(Error::InvalidParameter(format!("Poisson mean {lambda}")));
                }
            }
            CountLaw::Cox { mixing } => mixing.validate()?,
            CountLaw::Pmf { probs } => {
                if probs.is_empty() {
                    return Err(Error::Empty("count pmf"));
                }
                if probs.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
                    return Err(Error::InvalidParameter("negative pmf entry".into()));
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > PMF_TOL {
                    return Err(Error::InvalidParameter(format!("pmf sums to {total}")));
                }
            }
        }
        Ok(())
    }

    pub fn sample(&self, rng: &mut RngStream) -> u64 {
        match self {
            CountLaw::Fixed { k } => *k,
            CountLaw::ShiftedPoisson { lambda } => 1 + sample_poisson(*lambda, rng),
            CountLaw::Cox { mixing } => {
                let t = mixing.draw(rng);
                sample_zt_poisson(t, rng)
            }
            CountLaw::Pmf { probs } => {
                let u: f64 = rng.random();
                let mut cum = 0.0;
                for (i, &p) in probs.iter().enumerate() {
                    cum += p;
                    if u < cum {
                        return i as u64 + 1;
                    }
                }
                probs.iter().rposition(|&p| p > 0.0).unwrap_or(0) as u64 + 1
            }
        }
    }

    /// `P(L = k)`.
    pub fn pmf_at(&self, k: u64) -> f64 {
        if k == 0 {
            return 0.0;
        }
        match self {
            CountLaw::Fixed { k: c } => f64::from(u8::from(k == *c)),
            CountLaw::ShiftedPoisson { lambda } => {
                let j = k - 1;
                if *lambda == 0.0 {
                    return f64::from(u8::from(j == 0));
                }
                (j as f64 * lambda.ln() - lambda - ln_factorial(j)).exp()
            }
            CountLaw::Cox { mixing } => mixing.expect(|t| zt_poisson_pmf(k, t)),
            CountLaw::Pmf { probs } => probs.get(k as usize - 1).copied().unwrap_or(0.0),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            CountLaw::Fixed { k } => *k as f64,
            CountLaw::ShiftedPoisson { lambda } => 1.0 + lambda,
            CountLaw::Cox { mixing } => mixing.expect(|t| zt_poisson_moments(t).0),
            CountLaw::Pmf { probs } => probs.iter().enumerate().map(|(i, p)| (i + 1) as f64 * p).sum(),
        }
    }

    pub fn second_moment(&self) -> f64 {
        match self {
            CountLaw::Fixed { k } => (*k as f64).powi(2),
            CountLaw::ShiftedPoisson { lambda } => lambda * lambda + 3.0 * lambda + 1.0,
            CountLaw::Cox { mixing } => mixing.expect(|t| zt_poisson_moments(t).1),
            CountLaw::Pmf { probs } => probs
                .iter()
                .enumerate()
                .map(|(i, p)| ((i + 1) as f64).powi(2) * p)
                .sum(),
        }
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.second_moment() - m * m
    }

    /// Largest value in the support, when bounded.
    pub fn max_support(&self) -> Option<u64> {
        match self {
            CountLaw::Fixed { k } => Some(*k),
            CountLaw::ShiftedPoisson { lambda } if *lambda == 0.0 => Some(1),
            CountLaw::Pmf { probs } => probs.iter().rposition(|&p| p > 0.0).map(|i| i as u64 + 1),
            _ => None,
        }
    }

    /// `ln E[e^{θL}]`; `None` when no closed form is available.
    pub fn log_mgf(&self, theta: f64) -> Option<f64> {
        match self {
            CountLaw::Fixed { k } => Some(theta * *k as f64),
            CountLaw::ShiftedPoisson { lambda } => Some(theta + lambda * theta.exp_m1()),
            CountLaw::Cox {
                mixing: Mixing::Discrete { atoms },
            } => Some(log_sum_exp(atoms.iter().filter(|a| a.1 > 0.0).map(|&(t, w)| {
                w.ln() + ln_expm1(t * theta.exp()) - ln_expm1(t)
            }))),
            CountLaw::Cox {
                mixing: Mixing::LogNormal { .. },
            } => None,
            CountLaw::Pmf { probs } => Some(log_sum_exp(
                probs
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p > 0.0)
                    .map(|(i, &p)| p.ln() + theta * (i + 1) as f64),
            )),
        }
    }

    /// `ln E[e^{θL^2}]`; finite for bounded laws only.
    pub fn log_mgf_squared(&self, theta: f64) -> Option<f64> {
        match self {
            CountLaw::Fixed { k } => Some(theta * (*k as f64).powi(2)),
            CountLaw::ShiftedPoisson { lambda } if *lambda == 0.0 => Some(theta),
            CountLaw::Pmf { probs } => Some(log_sum_exp(
                probs
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p > 0.0)
                    .map(|(i, &p)| p.ln() + theta * ((i + 1) as f64).powi(2)),
            )),
            _ => None,
        }
    }
}
