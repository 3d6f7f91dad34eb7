//! Variance Gamma process numerics: closed-form and quadrature densities,
//! characteristic functions, generalized Weyl and Phillips operators,
//! equation residual checks, samplers and Kolmogorov–Smirnov diagnostics.

// `!(x > 0.0)` is used on purpose so NaN fails validation; series
// coefficients are kept at their published precision.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod model;
pub mod operators;
pub mod quadrature;
pub mod residuals;
pub mod sampling;
pub mod special_fn;

pub use error::{Error, Result};
pub use quadrature::QuadConfig;
