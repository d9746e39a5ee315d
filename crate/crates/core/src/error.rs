use thiserror::Error;

use crate::geninv::ExtendedReal;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("step function is not non-decreasing")]
    NonMonotone,
    #[error("breakpoints must be finite and strictly increasing")]
    InvalidBreakpoints,
    #[error("expected {expected} values for {breakpoints} breakpoints, got {got}")]
    ValueCount {
        breakpoints: usize,
        expected: usize,
        got: usize,
    },
    #[error("monotone map requires at least two knots with strictly increasing abscissae")]
    InvalidKnots,
    #[error("map is not non-decreasing")]
    NonMonotoneMap,
    #[error("atom weight {0} is not a finite non-negative number")]
    InvalidWeight(f64),
    #[error("atom location is NaN")]
    NanLocation,
    #[error("expected a probability measure, total mass is {0}")]
    NotProbability(f64),
    #[error("positive and negative parts share an atom at {0}")]
    InvalidDecomposition(ExtendedReal),
    #[error("transform samples decrease at index {0}")]
    DecreasingSamples(usize),
    #[error("a zero-mass part must have all-zero samples")]
    ZeroMassSamples,
    #[error("mass must be finite and non-negative, got {0}")]
    InvalidMass(f64),
    #[error("atom at {0} lies outside the grid")]
    OutOfRange(ExtendedReal),
    #[error("measure has an atom at {0}, second moment is infinite")]
    InfiniteAtom(ExtendedReal),
    #[error("grid requires t0 < t1 and at least one bin")]
    InvalidGrid,
    #[error("quantile level {0} outside [0, 1]")]
    InvalidQuantile(f64),
    #[error("invalid reference measure: {0}")]
    InvalidReference(String),
    #[error("at least two quantile points are required, got {0}")]
    TooFewQuantiles(usize),
    #[error("pushed-forward parts collide at {0}")]
    SingularityViolation(ExtendedReal),
    #[error("sample vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("non-finite transform sample at index {0}")]
    NonFiniteSample(usize),
    #[error("invalid reparameterization: {0}")]
    InvalidReparam(String),
    #[error("signals are not on a common grid")]
    GridMismatch,
    #[error("feature matrix contains a non-finite entry at row {row}, column {col}")]
    NonFiniteFeature { row: usize, col: usize },
    #[error("need at least two classes, got {0}")]
    TooFewClasses(usize),
    #[error("class {class} has {count} samples, need at least two")]
    TooFewSamples { class: usize, count: usize },
    #[error("within-class scatter is singular after regularization")]
    DegenerateScatter,
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
