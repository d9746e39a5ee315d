//! Signed cumulative distribution transform for one-dimensional signals.
//!
//! Signals are finite signed measures on the real line. Each Jordan part is
//! mapped to its quantile function composed with the CDF of a fixed
//! atomless reference measure, sampled on a midpoint quantile grid, and
//! paired with its total mass. The modules cover generalized inverses of
//! step functions, measures, the transforms themselves, transport metrics,
//! reparameterization laws with a synthetic signal generator, and Fisher
//! LDA on transform features.

pub mod classify;
pub mod error;
pub mod genmodel;
pub mod geninv;
pub mod measures;
pub mod metrics;
pub mod transform;

pub use error::{Error, Result};
pub use geninv::{ExtendedReal, PiecewiseLinear, StepFunction};
pub use measures::{DiscreteMeasure, GridDensity, ReferenceMeasure, SignedMeasure};
pub use transform::{CdtResult, ScdtResult, TransformConfig};
