use crate::error::{Error, Result};
use crate::generators::DisplacementLaw;
use crate::scalar::{dot, Scalar};

use super::function::EvalFunction;
use super::ops::empirical_intensity;
use super::point::Sample;

/// An intensity measure with computable masses.
#[derive(Clone, Debug, PartialEq)]
pub enum ReferenceMeasure<T: Scalar> {
    /// `μ = E[L] · law(X)` for points independent of the count.
    MixedBinomial {
        total_mass: T,
        second_moment: T,
        displacement: DisplacementLaw<T>,
    },
    /// The empirical intensity measure of a sample.
    Empirical(Sample<T>),
}

impl<T: Scalar> ReferenceMeasure<T> {
    pub fn mixed_binomial(total_mass: T, second_moment: T, displacement: DisplacementLaw<T>) -> Result<Self> {
        if !(total_mass > T::zero()) || !total_mass.is_finite() {
            return Err(Error::InvalidParameter(format!("total mass {total_mass}")));
        }
        Ok(Self::MixedBinomial {
            total_mass,
            second_moment,
            displacement,
        })
    }

    /// Point mass of weight `mass` at `point`.
    pub fn point_mass(point: Vec<T>, mass: T) -> Result<Self> {
        Self::mixed_binomial(mass, mass * mass, DisplacementLaw::point_mass(point)?)
    }

    pub fn empirical(sample: Sample<T>) -> Self {
        Self::Empirical(sample)
    }

    pub fn total_mass(&self) -> T {
        match self {
            Self::MixedBinomial { total_mass, .. } => *total_mass,
            Self::Empirical(s) => s.ratio(),
        }
    }

    /// `E[L^2]` of the generating count, or `S_{n,2} / n` for empirical measures.
    pub fn second_moment(&self) -> T {
        match self {
            Self::MixedBinomial { second_moment, .. } => *second_moment,
            Self::Empirical(s) => T::from_count(s.s_n2()) / T::from_count(s.n() as u64),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::MixedBinomial { displacement, .. } => displacement.dim(),
            Self::Empirical(s) => s.dim(),
        }
    }

    /// True when the measure has no atoms.
    pub fn is_continuous(&self) -> bool {
        match self {
            Self::MixedBinomial { displacement, .. } => displacement.is_continuous(),
            Self::Empirical(_) => false,
        }
    }

    /// The atoms and their masses, for purely atomic measures.
    pub fn atoms(&self) -> Option<Vec<(&[T], T)>> {
        match self {
            Self::MixedBinomial {
                total_mass,
                displacement,
                ..
            } => displacement
                .atoms()
                .map(|a| a.iter().map(|a| (a.point.as_slice(), *total_mass * a.weight)).collect()),
            Self::Empirical(s) => {
                let w = T::one() / T::from_count(s.n() as u64);
                Some(s.points().map(|p| (p, w)).collect())
            }
        }
    }

    /// `μ(f)`.
    pub fn mass(&self, f: &EvalFunction<T>) -> Result<T> {
        f.check_dim(self.dim())?;
        match self {
            Self::MixedBinomial {
                total_mass,
                displacement,
                ..
            } => match f {
                EvalFunction::Constant(c) => Ok(*c * *total_mass),
                _ => Ok(*total_mass * displacement.expect(f)?),
            },
            Self::Empirical(s) => empirical_intensity(s, f),
        }
    }

    /// `μ{y : <y, u> <= c}`, or with `<` when `strict`.
    pub fn projected_mass(&self, u: &[T], c: T, strict: bool) -> T {
        match self {
            Self::MixedBinomial {
                total_mass,
                displacement,
                ..
            } => *total_mass * displacement.projection_cdf(u, c, strict),
            Self::Empirical(s) => {
                let inside = s
                    .points()
                    .filter(|p| {
                        let v = dot(p, u);
                        if strict {
                            v < c
                        } else {
                            v <= c
                        }
                    })
                    .count();
                T::from_count(inside as u64) / T::from_count(s.n() as u64)
            }
        }
    }

    /// `E[f(X)]` for the normalized law, when a displacement law is present.
    pub fn normalized_mean(&self, f: &EvalFunction<T>) -> Result<T> {
        Ok(self.mass(f)? / self.total_mass())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{reference_for, CountLaw};

    #[test]
    fn constants_scale_with_total_mass() {
        let r = ReferenceMeasure::mixed_binomial(2.5, 7.0, DisplacementLaw::<f64>::unit_cube(2)).unwrap();
        assert_eq!(r.mass(&EvalFunction::Constant(2.0)).unwrap(), 5.0);
        assert!(ReferenceMeasure::mixed_binomial(0.0, 0.0, DisplacementLaw::<f64>::unit_cube(1)).is_err());
    }

    #[test]
    fn spec_masses() {
        let disp = DisplacementLaw::<f64>::unit_cube(1);
        let r = reference_for(&CountLaw::fixed(2).unwrap(), &disp).unwrap();
        assert_eq!(r.mass(&EvalFunction::below(0.25)).unwrap(), 0.5);
        let r = reference_for(&CountLaw::fixed(1).unwrap(), &disp).unwrap();
        let e = r.mass(&EvalFunction::exponential(1.0, 0.0, 1.0).unwrap()).unwrap();
        assert!((e - (1f64.exp() - 1.0)).abs() < 1e-14);
        assert!(r.mass(&EvalFunction::tabulated(1, vec![]).unwrap()).is_err());
    }

    #[test]
    fn empirical_reference_matches_intensity() {
        let s = Sample::from_scalars(&[0.1, 0.5, 0.9]).unwrap();
        let r = ReferenceMeasure::empirical(s);
        assert_eq!(r.projected_mass(&[1.0], 0.5, false), 2.0 / 3.0);
        assert_eq!(r.projected_mass(&[1.0], 0.5, true), 1.0 / 3.0);
        assert_eq!(r.atoms().unwrap().iter().map(|a| a.1).sum::<f64>(), 1.0);
    }
}
