//! Estimators and bounds for the intensity measure of i.i.d. point processes.
//!
//! An observation is a finite point pattern `Y = Σ_j δ_{X_j}` in `R^d` with at
//! least one point. For a sample `Y_1, ..., Y_n` the empirical intensity
//! measure is `μ_n(f) = (1/n) Σ_i Y_i(f)`. The crate provides
//!
//! - [`measure`]: point patterns, samples, test functions, empirical
//!   pseudo-distances and exact supremum deviations over half-line and
//!   half-plane classes,
//! - [`generators`]: seeded samplers for mixed binomial, Poisson and Cox
//!   patterns together with their exact count laws,
//! - [`branching`]: Galton-Watson trees carrying branching random walks and
//!   the Lotka-Nagaev / Harris-type estimators,
//! - [`depth`]: half-space (Tukey) depth of finite measures,
//! - [`bounds`]: closed-form VC covering and deviation bounds, Chernoff tails
//!   and greedy covering / packing certificates,
//! - [`io`]: the newline-delimited JSON formats for samples, trees and depth
//!   query batches.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`). The
//! aliases at the crate root fix the scalar to `f64`, which is what the
//! experiment harness uses.

pub mod bounds;
pub mod branching;
pub mod depth;
pub mod error;
pub mod generators;
pub mod io;
pub mod measure;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{CompensatedSum, Scalar};

pub type Point = measure::Point<f64>;
pub type PointPattern = measure::PointPattern<f64>;
pub type Sample = measure::Sample<f64>;
pub type EvalFunction = measure::EvalFunction<f64>;
pub type FunctionClass = measure::FunctionClass<f64>;
pub type ReferenceMeasure = measure::ReferenceMeasure<f64>;
pub type DisplacementLaw = generators::DisplacementLaw<f64>;

/// Version of this crate, recorded in experiment outputs.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
