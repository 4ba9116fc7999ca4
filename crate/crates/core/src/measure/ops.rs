use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Scalar};

use super::function::EvalFunction;
use super::point::{PatternView, Sample};
use super::reference::ReferenceMeasure;

/// `Y(f) = Σ_j f(X_j)`.
pub fn pattern_integral<T: Scalar>(y: PatternView<'_, T>, f: &EvalFunction<T>) -> Result<T> {
    f.check_dim(y.dim())?;
    let mut acc = CompensatedSum::new();
    for x in y.points() {
        acc.add(f.eval(x)?);
    }
    Ok(acc.value())
}

/// Per-pattern integrals `Y_i(f)`.
pub fn pattern_integrals<T: Scalar>(s: &Sample<T>, f: &EvalFunction<T>) -> Result<Vec<T>> {
    s.patterns().map(|p| pattern_integral(p, f)).collect()
}

/// `μ_n(f) = (1/n) Σ_i Y_i(f)`.
pub fn empirical_intensity<T: Scalar>(s: &Sample<T>, f: &EvalFunction<T>) -> Result<T> {
    f.check_dim(s.dim())?;
    let mut acc = CompensatedSum::new();
    for x in s.points() {
        acc.add(f.eval(x)?);
    }
    Ok(acc.value() / T::from_count(s.n() as u64))
}

/// The `L^p` pseudo-distance `e_{n,p}(f, g)` on all points of the sample; `p = ∞` gives the maximum.
pub fn empirical_pseudo_distance<T: Scalar>(
    s: &Sample<T>,
    f: &EvalFunction<T>,
    g: &EvalFunction<T>,
    p: T,
) -> Result<T> {
    if !(p >= T::one()) {
        return Err(Error::InvalidParameter(format!("pseudo-distance order {p} < 1")));
    }
    f.check_dim(s.dim())?;
    g.check_dim(s.dim())?;
    let diffs = s.points().map(|x| -> Result<T> { Ok((f.eval(x)? - g.eval(x)?).abs()) });
    if p.is_infinite() {
        let mut m = T::zero();
        for d in diffs {
            m = m.max(d?);
        }
        return Ok(m);
    }
    let mut acc = CompensatedSum::new();
    for d in diffs {
        let d: T = d?;
        acc.add(if p == T::one() { d } else { d.powf(p) });
    }
    let mean = acc.value() / T::from_count(s.n() as u64);
    Ok(if p == T::one() { mean } else { mean.powf(p.recip()) })
}

/// Unbiased sample covariance of `(Y_i(f), Y_i(g))`.
pub fn covariance_hat<T: Scalar>(s: &Sample<T>, f: &EvalFunction<T>, g: &EvalFunction<T>) -> Result<T> {
    if s.n() < 2 {
        return Err(Error::InvalidParameter("covariance needs n >= 2".into()));
    }
    let a = pattern_integrals(s, f)?;
    let b = pattern_integrals(s, g)?;
    Ok(sample_covariance(&a, &b))
}

/// Unbiased covariance of paired values, shifted by the first pair for stability.
pub fn sample_covariance<T: Scalar>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    assert!(n >= 2, "covariance needs at least two pairs");
    let (a0, b0) = (a[0], b[0]);
    let nt = T::from_count(n as u64);
    let ma = a.iter().map(|&x| x - a0).collect::<CompensatedSum<T>>().value() / nt;
    let mb = b.iter().map(|&x| x - b0).collect::<CompensatedSum<T>>().value() / nt;
    let s = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| (x - a0 - ma) * (y - b0 - mb))
        .collect::<CompensatedSum<T>>()
        .value();
    s / T::from_count(n as u64 - 1)
}

/// `μ(f)` for a reference measure.
pub fn reference_mass<T: Scalar>(r: &ReferenceMeasure<T>, f: &EvalFunction<T>) -> Result<T> {
    r.mass(f)
}
