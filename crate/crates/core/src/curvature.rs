//! Bounds `m <= f'' <= M` over a domain.
//!
//! Rigorous bounds come from second-order interval jets over a bisection of
//! the domain. Heuristic bounds come from dense sampling and are never
//! certified.

use std::fmt;

use crate::error::{CurvatureError, DomainError};
use crate::expr::Expr;
use crate::interval::Interval;
use crate::quadrature::EvalCounts;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurvatureMode {
    Rigorous,
    Heuristic,
    Manual,
}

impl CurvatureMode {
    pub fn name(self) -> &'static str {
        match self {
            CurvatureMode::Rigorous => "rigorous",
            CurvatureMode::Heuristic => "heuristic",
            CurvatureMode::Manual => "manual",
        }
    }

    /// Whether enclosures built on bounds of this mode may be certified.
    pub fn is_certifying(self) -> bool {
        !matches!(self, CurvatureMode::Heuristic)
    }
}

impl fmt::Display for CurvatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `lower <= f''(x) <= upper` for `x` in `domain`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureBounds {
    /// `m`, a lower bound on `f''`.
    pub lower: f64,
    /// `M`, an upper bound on `f''`.
    pub upper: f64,
    pub mode: CurvatureMode,
    pub domain: Interval,
    /// Work spent producing the bounds.
    pub work: EvalCounts,
}

impl CurvatureBounds {
    pub fn spread(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn is_convex(&self) -> bool {
        self.lower >= 0.0
    }

    pub fn is_concave(&self) -> bool {
        self.upper <= 0.0
    }
}

/// Tuning knobs for [`bound_curvature`].
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureOptions {
    /// Maximum number of subintervals in rigorous mode.
    pub budget: usize,
    /// Rigorous refinement stops once the hull exceeds the sampled range of
    /// `f''` by at most `refine_rel * spread + refine_abs * (1 + scale)`.
    pub refine_rel: f64,
    pub refine_abs: f64,
    pub heuristic_samples: usize,
    /// Heuristic bounds are widened by `heuristic_rel * spread + heuristic_abs`.
    pub heuristic_rel: f64,
    pub heuristic_abs: f64,
}

impl Default for CurvatureOptions {
    fn default() -> Self {
        Self {
            budget: 256,
            refine_rel: 1e-2,
            refine_abs: 1e-12,
            heuristic_samples: 1024,
            heuristic_rel: 1e-2,
            heuristic_abs: 1e-12,
        }
    }
}

impl CurvatureOptions {
    pub fn with_budget(budget: usize) -> Self {
        Self {
            budget,
            ..Self::default()
        }
    }
}

/// Wraps caller-supplied `m <= M` as manual bounds on `domain`.
pub fn manual_bounds(m: f64, big_m: f64, domain: Interval) -> Result<CurvatureBounds, CurvatureError> {
    if !m.is_finite() || !big_m.is_finite() {
        return Err(CurvatureError::NonFinite);
    }
    if m > big_m {
        return Err(CurvatureError::MExceedsM { m, big_m });
    }
    Ok(CurvatureBounds {
        lower: m,
        upper: big_m,
        mode: CurvatureMode::Manual,
        domain,
        work: EvalCounts::default(),
    })
}

/// Bounds `f''` over `domain`.
///
/// Running out of budget is not an error; the hull found so far is returned.
/// Manual mode is rejected here, use [`manual_bounds`].
pub fn bound_curvature(
    f: &Expr,
    domain: Interval,
    mode: CurvatureMode,
    opts: &CurvatureOptions,
) -> Result<CurvatureBounds, CurvatureError> {
    match mode {
        CurvatureMode::Rigorous => rigorous(f, domain, opts),
        CurvatureMode::Heuristic => heuristic(f, domain, opts),
        CurvatureMode::Manual => Err(CurvatureError::ManualNeedsValues),
    }
}

fn second_derivative_enclosure(f: &Expr, x: Interval) -> Result<Interval, DomainError> {
    let jet = f.eval_jet(x, 2)?;
    // 2 * c2 is exact.
    Ok(jet.coeffs()[2] * Interval::point(2.0))
}

fn second_derivative_at(f: &Expr, x: f64) -> Result<f64, DomainError> {
    Ok(2.0 * f.eval_jet(x, 2)?.coeffs()[2])
}

struct Piece {
    domain: Interval,
    enclosure: Interval,
}

fn rigorous(f: &Expr, domain: Interval, opts: &CurvatureOptions) -> Result<CurvatureBounds, CurvatureError> {
    if opts.budget == 0 {
        return Err(CurvatureError::ZeroBudget);
    }
    let mut work = EvalCounts::default();
    let mut pieces = vec![Piece {
        domain,
        enclosure: second_derivative_enclosure(f, domain)?,
    }];
    work.interval += 1;

    // Sampled range of f'': an inner estimate used only to decide when to stop.
    let mut sampled = (f64::INFINITY, f64::NEG_INFINITY);
    let sample = |x: f64, sampled: &mut (f64, f64), work: &mut EvalCounts| -> Result<(), DomainError> {
        let v = second_derivative_at(f, x)?;
        work.jet += 1;
        sampled.0 = sampled.0.min(v);
        sampled.1 = sampled.1.max(v);
        Ok(())
    };
    for x in [domain.lo(), domain.mid(), domain.hi()] {
        sample(x, &mut sampled, &mut work)?;
    }

    loop {
        let hull = pieces
            .iter()
            .skip(1)
            .fold(pieces[0].enclosure, |h, p| h.hull(&p.enclosure));
        if pieces.len() >= opts.budget {
            break;
        }
        let (sampled_lo, sampled_hi) = sampled;
        let below = (sampled_lo - hull.lo()).max(0.0);
        let above = (hull.hi() - sampled_hi).max(0.0);
        let scale = sampled_lo.abs().max(sampled_hi.abs());
        let allowed = opts.refine_rel * (sampled_hi - sampled_lo) + opts.refine_abs * (1.0 + scale);
        if below + above <= allowed {
            break;
        }

        // Split the piece that determines the looser side of the hull.
        let on_lower_side = below >= above;
        let pick = pieces
            .iter()
            .enumerate()
            .filter(|(_, p)| {
                if on_lower_side {
                    p.enclosure.lo() == hull.lo()
                } else {
                    p.enclosure.hi() == hull.hi()
                }
            })
            .max_by(|(_, p), (_, q)| {
                p.domain
                    .width()
                    .total_cmp(&q.domain.width())
                    .then(q.domain.lo().total_cmp(&p.domain.lo()))
            })
            .map(|(i, _)| i)
            .expect("some piece attains the hull");

        let parent = &pieces[pick];
        let (left, right) = parent.domain.bisect();
        if left.width() == 0.0 || right.width() == 0.0 {
            break;
        }
        let parent_enclosure = parent.enclosure;
        let refine = |d: Interval| -> Result<Piece, DomainError> {
            let e = second_derivative_enclosure(f, d)?;
            // Children never loosen their parent's enclosure.
            let enclosure = e.intersect(&parent_enclosure).unwrap_or(e);
            Ok(Piece { domain: d, enclosure })
        };
        let left = refine(left)?;
        let right = refine(right)?;
        work.interval += 2;
        for x in [left.domain.hi(), left.domain.mid(), right.domain.mid()] {
            sample(x, &mut sampled, &mut work)?;
        }
        pieces[pick] = left;
        pieces.insert(pick + 1, right);
    }

    let hull = pieces
        .iter()
        .skip(1)
        .fold(pieces[0].enclosure, |h, p| h.hull(&p.enclosure));
    Ok(CurvatureBounds {
        lower: hull.lo(),
        upper: hull.hi(),
        mode: CurvatureMode::Rigorous,
        domain,
        work,
    })
}

fn heuristic(f: &Expr, domain: Interval, opts: &CurvatureOptions) -> Result<CurvatureBounds, CurvatureError> {
    let n = opts.heuristic_samples.max(2);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        let x = if i == n - 1 {
            domain.hi()
        } else {
            domain.lo() + t * domain.width()
        };
        let v = second_derivative_at(f, x)?;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let pad = opts.heuristic_rel * (hi - lo) + opts.heuristic_abs;
    Ok(CurvatureBounds {
        lower: lo - pad,
        upper: hi + pad,
        mode: CurvatureMode::Heuristic,
        domain,
        work: EvalCounts {
            jet: n,
            ..EvalCounts::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{E, PI};

    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn rig(src: &str, d: Interval, budget: usize) -> CurvatureBounds {
        let f: Expr = src.parse().unwrap();
        bound_curvature(&f, d, CurvatureMode::Rigorous, &CurvatureOptions::with_budget(budget)).unwrap()
    }

    #[test]
    fn square_has_constant_curvature() {
        let c = rig("x^2", iv(0.0, 1.0), 256);
        assert_eq!((c.lower, c.upper), (2.0, 2.0));
        assert_eq!(c.work.interval, 1, "exact hull needs no refinement");
    }

    #[test]
    fn exponential_on_unit_interval() {
        // Oracle: exp is its own second derivative and is increasing, so the
        // dense-sample extremes are exp(0) and exp(1).
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..=1_000_000 {
            let v = (i as f64 / 1e6).exp();
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let c = rig("exp(x)", iv(0.0, 1.0), 64);
        assert!(c.lower <= lo && lo <= 1.0 + 1e-15);
        assert!(c.upper >= hi);
        assert!(c.upper - E <= 0.05);
    }

    #[test]
    fn sine_over_half_period() {
        let c = rig("sin(x)", iv(0.0, PI), 256);
        assert!(c.lower <= -1.0);
        assert!(c.upper >= 0.0);
        assert!(c.lower > -1.0 - 1e-12 && c.upper < 1e-12);
    }

    #[test]
    fn budget_exhaustion_returns_valid_hull() {
        let c = rig("sin(3*x) * exp(x)", iv(-2.0, 2.0), 1);
        let f: Expr = "sin(3*x) * exp(x)".parse().unwrap();
        for i in 0..=1000 {
            let x = -2.0 + 4.0 * i as f64 / 1000.0;
            let v = second_derivative_at(&f, x).unwrap();
            assert!(c.lower <= v && v <= c.upper);
        }
    }

    #[test]
    fn larger_budget_never_widens() {
        let d = iv(-1.0, 2.0);
        let mut prev = rig("x^4 - 3*x^3 + cos(2*x)", d, 1);
        for budget in [2, 4, 8, 16, 64, 256] {
            let c = rig("x^4 - 3*x^3 + cos(2*x)", d, budget);
            assert!(c.lower >= prev.lower && c.upper <= prev.upper, "budget {budget}");
            prev = c;
        }
    }

    #[test]
    fn manual_values() {
        let c = manual_bounds(0.0, 0.0, iv(0.0, 1.0)).unwrap();
        assert_eq!(c.mode, CurvatureMode::Manual);
        assert!(manual_bounds(2.0, 2.0, iv(0.0, 1.0)).is_ok());
        let err = manual_bounds(5.0, 1.0, iv(0.0, 1.0)).unwrap_err();
        assert!(err.to_string().contains("m exceeds M"));
    }

    #[test]
    fn manual_mode_is_rejected_by_the_bounder() {
        let f: Expr = "x".parse().unwrap();
        let err = bound_curvature(&f, iv(0.0, 1.0), CurvatureMode::Manual, &CurvatureOptions::default());
        assert_eq!(err, Err(CurvatureError::ManualNeedsValues));
    }

    #[test]
    fn heuristic_is_widened_and_labelled() {
        let f: Expr = "exp(x)".parse().unwrap();
        let c = bound_curvature(&f, iv(0.0, 1.0), CurvatureMode::Heuristic, &CurvatureOptions::default()).unwrap();
        assert_eq!(c.mode, CurvatureMode::Heuristic);
        assert!(!c.mode.is_certifying());
        assert!(c.lower < 1.0 && c.upper > E);
        assert_eq!(c.work.jet, 1024);
    }

    #[test]
    fn domain_errors_propagate() {
        let f: Expr = "log(x)".parse().unwrap();
        let err = bound_curvature(&f, iv(-1.0, 1.0), CurvatureMode::Rigorous, &CurvatureOptions::default());
        assert!(matches!(err, Err(CurvatureError::Domain(_))));
    }
}
