//! Count and displacement laws and the samplers built on them.

mod count;
mod displacement;
mod rng;

pub use count::{count_moments, cox_pmf, CountLaw, CountMoments, Mixing};
pub use displacement::{Atom, DisplacementLaw};
pub use rng::{mix_tags, RngStream};

use crate::error::{Error, Result};
use crate::measure::{PointPattern, ReferenceMeasure, Sample, SampleBuilder};
use crate::scalar::Scalar;

pub fn sample_count(law: &CountLaw, rng: &mut RngStream) -> u64 {
    law.sample(rng)
}

/// Draws `L`, then `L` i.i.d. displacements.
pub fn sample_pattern<T: Scalar>(
    count: &CountLaw,
    disp: &DisplacementLaw<T>,
    rng: &mut RngStream,
) -> PointPattern<T> {
    let l = count.sample(rng) as usize;
    let mut coords = Vec::with_capacity(l * disp.dim());
    for _ in 0..l {
        disp.sample_into(rng, &mut coords);
    }
    PointPattern::from_flat(disp.dim(), coords).expect("sampled pattern is valid")
}

/// `n` independent patterns drawn sequentially from one stream.
pub fn sample_sample<T: Scalar>(
    n: usize,
    count: &CountLaw,
    disp: &DisplacementLaw<T>,
    rng: &mut RngStream,
) -> Result<Sample<T>> {
    if n < 1 {
        return Err(Error::InvalidParameter("sample size must be at least 1".into()));
    }
    let d = disp.dim();
    if let CountLaw::Fixed { k } = count {
        let total = n * *k as usize;
        let mut coords = Vec::with_capacity(total * d);
        for _ in 0..total {
            disp.sample_into(rng, &mut coords);
        }
        return Sample::from_fixed_counts(d, *k as usize, coords);
    }
    let mut b = SampleBuilder::with_capacity(d, n, (count.mean().ceil() as usize).max(1) * n);
    let mut buf = Vec::new();
    for _ in 0..n {
        buf.clear();
        let l = count.sample(rng);
        for _ in 0..l {
            disp.sample_into(rng, &mut buf);
        }
        b.push_flat(&buf)?;
    }
    b.finish()
}

/// The intensity measure `E[L] · law(X)` of the mixed binomial process.
pub fn reference_for<T: Scalar>(count: &CountLaw, disp: &DisplacementLaw<T>) -> Result<ReferenceMeasure<T>> {
    count.validate()?;
    let m = count_moments(count);
    if !m.mean.is_finite() || !(m.mean > 0.0) {
        return Err(Error::InvalidParameter(format!("count mean {}", m.mean)));
    }
    Ok(ReferenceMeasure::MixedBinomial {
        total_mass: T::lit(m.mean),
        second_moment: T::lit(m.second_moment),
        displacement: disp.clone(),
    })
}
