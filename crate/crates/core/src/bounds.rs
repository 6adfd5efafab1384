//! Two-sided bounds on the mean value `(1/(b-a)) * integral_a^b f` of a panel.
//!
//! With `h = b - a`, `m <= f'' <= M`, midpoint value `f_mid` and trapezoid
//! value `T = (f(a) + f(b)) / 2`:
//!
//! ```text
//! f_mid + m h^2/24 <= mean <= f_mid + M h^2/24      (midpoint pair)
//! T - M h^2/12     <= mean <= T - m h^2/12          (trapezoid pair)
//! ```
//!
//! Both pairs are sharp: `f(x) = (x - a)^2` attains the midpoint lower and
//! trapezoid upper bound simultaneously. For convex `f` the classic
//! `[f_mid, T]` and the `T - S/8 <= mean <= f_mid + S/8` pair with
//! `S = (f'(b) - f'(a)) h` also hold; for concave `f`, `[T, f_mid]`.
//!
//! Every kernel is evaluated in interval arithmetic on interval-valued panel
//! data, so its result encloses the exact bound.

use std::fmt;
use std::str::FromStr;

use crate::curvature::CurvatureBounds;
use crate::error::{BoundsError, DomainError, DomainKind};
use crate::expr::Expr;
use crate::interval::Interval;

/// Extra outward slack, in ulps, on every kernel endpoint before intersection.
pub const ENDPOINT_SLACK_ULPS: u32 = 2;

/// Function data of one panel `[a, b]`.
///
/// Values are enclosures so that rounding in the evaluation of `f` is carried
/// into the bounds; use [`PanelData::from_values`] for exact real data.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelData {
    pub a: f64,
    pub b: f64,
    pub fa: Interval,
    pub fb: Interval,
    /// `f((a + b) / 2)` at the exact midpoint.
    pub fmid: Interval,
    /// `f'(a)`, needed only by the Ujević kernel.
    pub dfa: Option<Interval>,
    pub dfb: Option<Interval>,
}

impl PanelData {
    /// Panel from real values taken as exact.
    pub fn from_values(a: f64, b: f64, fa: f64, fb: f64, fmid: f64, dfa: f64, dfb: f64) -> Self {
        assert!(a < b, "panel needs a < b, got [{a}, {b}]");
        Self {
            a,
            b,
            fa: Interval::point(fa),
            fb: Interval::point(fb),
            fmid: Interval::point(fmid),
            dfa: Some(Interval::point(dfa)),
            dfb: Some(Interval::point(dfb)),
        }
    }

    /// Encloses `f(a)`, `f(b)` and `f` at the exact midpoint; endpoint
    /// derivatives are added when `derivatives` is set.
    pub fn evaluate(f: &Expr, a: f64, b: f64, derivatives: bool) -> Result<Self, DomainError> {
        assert!(a < b, "panel needs a < b, got [{a}, {b}]");
        let (ia, ib) = (Interval::point(a), Interval::point(b));
        let mid = (ia + ib) * Interval::point(0.5);
        let derivative = |x: Interval| -> Result<Interval, DomainError> { Ok(f.eval_jet(x, 1)?.coeffs()[1]) };
        Ok(Self {
            a,
            b,
            fa: f.eval_interval(ia)?,
            fb: f.eval_interval(ib)?,
            fmid: f.eval_interval(mid)?,
            dfa: derivatives.then(|| derivative(ia)).transpose()?,
            dfb: derivatives.then(|| derivative(ib)).transpose()?,
        })
    }

    pub fn width(&self) -> Result<Interval, BoundsError> {
        Interval::point(self.b)
            .try_sub(Interval::point(self.a))
            .map_err(BoundsError::Arithmetic)
    }

    /// `(f(a) + f(b)) / 2`.
    fn trapezoid_value(&self) -> Result<Interval, DomainKind> {
        self.fa.try_add(self.fb)?.try_mul(Interval::point(0.5))
    }

    fn with_derivatives(&self) -> Result<(Interval, Interval), BoundsError> {
        match (self.dfa, self.dfb) {
            (Some(l), Some(r)) => Ok((l, r)),
            _ => Err(BoundsError::MissingDerivatives),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kernel {
    Midpoint,
    Trapezoid,
    Ujevic,
    ClassicHh,
}

impl Kernel {
    pub const ALL: [Kernel; 4] = [Kernel::Midpoint, Kernel::Trapezoid, Kernel::Ujevic, Kernel::ClassicHh];

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Midpoint => "midpoint",
            Kernel::Trapezoid => "trapezoid",
            Kernel::Ujevic => "ujevic",
            Kernel::ClassicHh => "classic_hh",
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which kernels [`enclose_panel`] intersects.
///
/// Explicitly requested shape kernels (`ujevic`, `classic_hh`) fail when the
/// curvature data does not certify their shape; with `auto` they are added
/// only when it does.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelSet {
    pub midpoint: bool,
    pub trapezoid: bool,
    pub ujevic: bool,
    pub classic_hh: bool,
    pub auto: bool,
}

impl Default for KernelSet {
    fn default() -> Self {
        Self {
            midpoint: true,
            trapezoid: true,
            ujevic: false,
            classic_hh: false,
            auto: true,
        }
    }
}

impl KernelSet {
    pub fn none() -> Self {
        Self {
            midpoint: false,
            trapezoid: false,
            ujevic: false,
            classic_hh: false,
            auto: false,
        }
    }

    /// `{midpoint, trapezoid}` without automatic shape kernels.
    pub fn theorem_pair() -> Self {
        Self {
            auto: false,
            ..Self::default()
        }
    }

    pub fn is_empty(&self) -> bool {
        !(self.midpoint || self.trapezoid || self.ujevic || self.classic_hh || self.auto)
    }
}

impl FromStr for KernelSet {
    type Err = String;

    /// Comma-separated list of `midpoint`, `trapezoid`, `ujevic`,
    /// `classic_hh` and `auto`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut set = KernelSet::none();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match item {
                "midpoint" => set.midpoint = true,
                "trapezoid" => set.trapezoid = true,
                "ujevic" => set.ujevic = true,
                "classic_hh" => set.classic_hh = true,
                "auto" => set.auto = true,
                other => return Err(format!("unknown kernel `{other}`")),
            }
        }
        if set.is_empty() {
            return Err("no kernels selected".into());
        }
        Ok(set)
    }
}

impl fmt::Display for KernelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [
            (self.midpoint, "midpoint"),
            (self.trapezoid, "trapezoid"),
            (self.ujevic, "ujevic"),
            (self.classic_hh, "classic_hh"),
            (self.auto, "auto"),
        ]
        .into_iter()
        .filter_map(|(on, n)| on.then_some(n))
        .collect();
        f.write_str(&names.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Convex,
    Concave,
}

/// Bounds on the panel mean, intersected over several kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct Enclosure {
    pub bounds: Interval,
    pub certified: bool,
    /// Kernels that took part in the intersection.
    pub contributors: Vec<Kernel>,
    /// Kernel supplying the lower endpoint.
    pub lower_from: Kernel,
    /// Kernel supplying the upper endpoint.
    pub upper_from: Kernel,
}

fn check_covers(p: &PanelData, c: &CurvatureBounds) -> Result<(), BoundsError> {
    if c.domain.lo() <= p.a && p.b <= c.domain.hi() {
        Ok(())
    } else {
        Err(BoundsError::DomainNotCovered {
            domain: c.domain,
            a: p.a,
            b: p.b,
        })
    }
}

/// `c * h^2 / d` as an interval.
fn scaled_square_width(p: &PanelData, c: f64, d: f64) -> Result<Interval, DomainKind> {
    let h = Interval::point(p.b).try_sub(Interval::point(p.a))?;
    Interval::point(c).try_mul(h.try_sqr()?.try_div(Interval::point(d))?)
}

fn arith(kind: DomainKind) -> BoundsError {
    BoundsError::Arithmetic(kind)
}

/// `[f_mid + m h^2/24, f_mid + M h^2/24]`.
pub fn midpoint_pair(p: &PanelData, c: &CurvatureBounds) -> Result<Interval, BoundsError> {
    check_covers(p, c)?;
    let lo = p
        .fmid
        .try_add(scaled_square_width(p, c.lower, 24.0).map_err(arith)?)
        .map_err(arith)?;
    let hi = p
        .fmid
        .try_add(scaled_square_width(p, c.upper, 24.0).map_err(arith)?)
        .map_err(arith)?;
    Interval::new(lo.lo(), hi.hi()).map_err(arith)
}

/// `[T - M h^2/12, T - m h^2/12]` with `T = (f(a) + f(b)) / 2`.
pub fn trapezoid_pair(p: &PanelData, c: &CurvatureBounds) -> Result<Interval, BoundsError> {
    check_covers(p, c)?;
    let t = p.trapezoid_value().map_err(arith)?;
    let lo = t
        .try_sub(scaled_square_width(p, c.upper, 12.0).map_err(arith)?)
        .map_err(arith)?;
    let hi = t
        .try_sub(scaled_square_width(p, c.lower, 12.0).map_err(arith)?)
        .map_err(arith)?;
    Interval::new(lo.lo(), hi.hi()).map_err(arith)
}

/// `[T - S/8, f_mid + S/8]` with `S = (f'(b) - f'(a)) (b - a)`; requires
/// certified convexity (`m >= 0`).
pub fn ujevic_pair(p: &PanelData, c: &CurvatureBounds) -> Result<Interval, BoundsError> {
    if !c.is_convex() {
        return Err(BoundsError::NotConvex {
            kernel: Kernel::Ujevic.name(),
            m: c.lower,
        });
    }
    check_covers(p, c)?;
    let (dfa, dfb) = p.with_derivatives()?;
    let h = p.width()?;
    let s = dfb.try_sub(dfa).and_then(|d| d.try_mul(h)).map_err(arith)?;
    let s8 = s.try_div(Interval::point(8.0)).map_err(arith)?;
    let t = p.trapezoid_value().map_err(arith)?;
    let lo = t.try_sub(s8).map_err(arith)?;
    let hi = p.fmid.try_add(s8).map_err(arith)?;
    Interval::new(lo.lo(), hi.hi()).map_err(arith)
}

/// `[f_mid, T]` for convex and `[T, f_mid]` for concave panels.
pub fn classic_hh_pair(p: &PanelData, shape: Shape, c: &CurvatureBounds) -> Result<Interval, BoundsError> {
    check_covers(p, c)?;
    let t = p.trapezoid_value().map_err(arith)?;
    match shape {
        Shape::Convex if c.is_convex() => Interval::new(p.fmid.lo(), t.hi()).map_err(arith),
        Shape::Concave if c.is_concave() => Interval::new(t.lo(), p.fmid.hi()).map_err(arith),
        Shape::Convex => Err(BoundsError::NotConvex {
            kernel: Kernel::ClassicHh.name(),
            m: c.lower,
        }),
        Shape::Concave => Err(BoundsError::NotConcave { big_m: c.upper }),
    }
}

fn shape_of(c: &CurvatureBounds) -> Option<Shape> {
    if c.is_convex() {
        Some(Shape::Convex)
    } else if c.is_concave() {
        Some(Shape::Concave)
    } else {
        None
    }
}

/// Intersects the selected kernels into one enclosure of the panel mean.
///
/// An empty intersection means the curvature data is wrong (typically a bad
/// manual `m`/`M`) and is reported as an error.
pub fn enclose_panel(p: &PanelData, c: &CurvatureBounds, kernels: &KernelSet) -> Result<Enclosure, BoundsError> {
    let mut parts: Vec<(Kernel, Interval)> = Vec::with_capacity(4);
    if kernels.midpoint {
        parts.push((Kernel::Midpoint, midpoint_pair(p, c)?));
    }
    if kernels.trapezoid {
        parts.push((Kernel::Trapezoid, trapezoid_pair(p, c)?));
    }
    let has_derivatives = p.dfa.is_some() && p.dfb.is_some();
    if kernels.ujevic || (kernels.auto && c.is_convex() && has_derivatives) {
        parts.push((Kernel::Ujevic, ujevic_pair(p, c)?));
    }
    if kernels.classic_hh {
        let shape = shape_of(c).ok_or(BoundsError::NotConvex {
            kernel: Kernel::ClassicHh.name(),
            m: c.lower,
        })?;
        parts.push((Kernel::ClassicHh, classic_hh_pair(p, shape, c)?));
    } else if kernels.auto {
        if let Some(shape) = shape_of(c) {
            parts.push((Kernel::ClassicHh, classic_hh_pair(p, shape, c)?));
        }
    }
    if parts.is_empty() {
        return Err(BoundsError::NoKernels);
    }

    let mut lower = (f64::NEG_INFINITY, parts[0].0);
    let mut upper = (f64::INFINITY, parts[0].0);
    for &(kernel, iv) in &parts {
        let iv = iv.widen_ulps(ENDPOINT_SLACK_ULPS);
        if iv.lo() > lower.0 {
            lower = (iv.lo(), kernel);
        }
        if iv.hi() < upper.0 {
            upper = (iv.hi(), kernel);
        }
    }
    let bounds = Interval::new(lower.0, upper.0).map_err(|_| BoundsError::InconsistentCurvature {
        lower: lower.0,
        upper: upper.0,
    })?;
    Ok(Enclosure {
        bounds,
        certified: c.mode.is_certifying(),
        contributors: parts.iter().map(|(k, _)| *k).collect(),
        lower_from: lower.1,
        upper_from: upper.1,
    })
}
