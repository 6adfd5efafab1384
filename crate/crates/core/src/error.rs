use thiserror::Error;

use crate::interval::Interval;

/// Why a single elementary operation could not be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum DomainKind {
    #[error("division by a value that may be zero")]
    DivisionByZero,
    #[error("logarithm of a value that may be non-positive")]
    LogNonPositive,
    #[error("square root of a value that may be negative")]
    SqrtNegative,
    #[error("result is not finite")]
    Overflow,
    #[error("interval endpoints are reversed")]
    EmptyInterval,
}

/// A domain failure tied to the expression node that raised it.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} in `{node}`")]
pub struct DomainError {
    pub kind: DomainKind,
    /// Printed form of the offending subexpression.
    pub node: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("non-integer exponent at offset {offset}")]
    NonIntegerExponent { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::NonIntegerExponent { offset } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurvatureError {
    #[error("m exceeds M ({m} > {big_m})")]
    MExceedsM { m: f64, big_m: f64 },
    #[error("curvature bounds must be finite")]
    NonFinite,
    #[error("manual curvature values must be supplied by the caller")]
    ManualNeedsValues,
    #[error("curvature budget must be at least 1")]
    ZeroBudget,
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("inconsistent curvature data: kernel bounds do not intersect ({lower} > {upper})")]
    InconsistentCurvature { lower: f64, upper: f64 },
    #[error("{kernel} kernel needs certified convexity (m >= 0), got m = {m}")]
    NotConvex { kernel: &'static str, m: f64 },
    #[error("concave shape needs M <= 0, got M = {big_m}")]
    NotConcave { big_m: f64 },
    #[error("no kernels selected")]
    NoKernels,
    #[error("curvature domain {domain} does not cover the panel [{a}, {b}]")]
    DomainNotCovered { domain: Interval, a: f64, b: f64 },
    #[error("the ujevic kernel needs f'(a) and f'(b)")]
    MissingDerivatives,
    #[error("arithmetic failure while forming a bound: {0}")]
    Arithmetic(DomainKind),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TaylorError {
    #[error("Taylor order r must be at least 1")]
    ZeroOrder,
    #[error("Gauss-Legendre order must be at least 2, got {0}")]
    QuadratureOrder(usize),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("on panel {index} {panel}: {source}")]
    Curvature {
        index: usize,
        panel: Interval,
        /// Panels already enclosed when the failure happened.
        completed: usize,
        #[source]
        source: CurvatureError,
    },
    #[error("on panel {index} {panel}: {source}")]
    Domain {
        index: usize,
        panel: Interval,
        completed: usize,
        #[source]
        source: DomainError,
    },
    #[error("on panel {index} {panel}: {source}")]
    Bounds {
        index: usize,
        panel: Interval,
        completed: usize,
        #[source]
        source: BoundsError,
    },
}
