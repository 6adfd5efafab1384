//! Certified enclosures of definite integrals from midpoint and trapezoid
//! bounds driven by the range of the second derivative.
//!
//! For a twice-differentiable `f` with `m <= f'' <= M` on `[a, b]`, the mean
//! value of `f` over `[a, b]` lies between the midpoint and trapezoid values
//! corrected by `m (b-a)^2 / 24`, `M (b-a)^2 / 24` and `m (b-a)^2 / 12`,
//! `M (b-a)^2 / 12`. This crate computes `m` and `M` rigorously with interval
//! Taylor jets, applies those bounds panel by panel and sums the panels into an
//! interval that contains the integral.
//!
//! ```
//! use hhquad::{integrate, Expr, QuadConfig};
//!
//! let f: Expr = "exp(x)".parse().unwrap();
//! let report = integrate(&f, 0.0, 1.0, &QuadConfig::adaptive(1e-6)).unwrap();
//! assert!(report.integral_bounds.contains(std::f64::consts::E - 1.0));
//! assert!(report.certified);
//! ```

pub mod bounds;
pub mod curvature;
pub mod error;
pub mod expr;
pub mod interval;
pub mod jet;
pub mod quadrature;
pub mod taylor;

pub use bounds::{enclose_panel, Enclosure, Kernel, KernelSet, PanelData, Shape};
pub use curvature::{bound_curvature, manual_bounds, CurvatureBounds, CurvatureMode, CurvatureOptions};
pub use error::{BoundsError, CurvatureError, DomainError, DomainKind, ParseError, QuadError, TaylorError};
pub use expr::{parse, BinaryOp, Expr, UnaryOp};
pub use interval::Interval;
pub use jet::{Arith, Jet, Scalar};
pub use quadrature::{
    integrate, integrate_adaptive, integrate_fixed, oracle_integrate, CurvatureScope, CurvatureSource, EvalCounts,
    Method, PanelReport, QuadConfig, QuadReport,
};
pub use taylor::{taylor_polynomial, taylor_remainder, RemainderForm, TaylorExpansion};
