//! Point patterns, empirical intensity measures and uniform deviations.

pub mod directions;
mod function;
mod ops;
mod point;
mod reference;
mod sup;

pub use function::{ClassKind, EvalFunction, FunctionClass, HalfSpace, Orientation, Table};
pub use ops::{
    covariance_hat, empirical_intensity, empirical_pseudo_distance, pattern_integral, pattern_integrals,
    reference_mass, sample_covariance,
};
pub use point::{PatternView, Point, PointPattern, Sample, SampleBuilder};
pub use reference::ReferenceMeasure;
pub use sup::{signed_half_line_sup, sup_deviation, sup_deviation_with, SupDeviation, SupOptions};

pub(crate) use sup::golden_max;
