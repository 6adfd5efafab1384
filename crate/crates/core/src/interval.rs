//! Closed intervals with finite endpoints and outward-rounded arithmetic.
//!
//! Basic operations (`+`, `-`, `*`, `/`, `sqrt`) detect whether the rounded
//! result is exact with an error-free transformation; exact endpoints are kept
//! as-is and inexact ones are pushed outward by [`SLACK_ULPS`]. Transcendental
//! functions rely on the platform libm, which is not correctly rounded, so their
//! endpoints are always pushed outward.
//!
//! This is not true directed-rounding interval arithmetic: the slack is a stand-in
//! for rounding-mode control and assumes libm errors stay below a few ulps.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::DomainKind;

/// Outward slack, in ulps, applied to every inexact endpoint.
pub const SLACK_ULPS: u32 = 4;

/// Moves `x` down by `n` ulps.
pub fn ulps_down(mut x: f64, n: u32) -> f64 {
    for _ in 0..n {
        x = x.next_down();
    }
    x
}

/// Moves `x` up by `n` ulps.
pub fn ulps_up(mut x: f64, n: u32) -> f64 {
    for _ in 0..n {
        x = x.next_up();
    }
    x
}

/// Closed interval `[lo, hi]` with `lo <= hi`, both finite.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Interval {
    /// Builds `[lo, hi]`, rejecting reversed or non-finite endpoints.
    pub fn new(lo: f64, hi: f64) -> Result<Self, DomainKind> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(DomainKind::Overflow);
        }
        if lo > hi {
            return Err(DomainKind::EmptyInterval);
        }
        Ok(Self { lo, hi })
    }

    /// Degenerate interval `[x, x]`.
    ///
    /// # Panics
    /// If `x` is not finite.
    pub fn point(x: f64) -> Self {
        assert!(x.is_finite(), "interval endpoint must be finite, got {x}");
        Self { lo: x, hi: x }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Midpoint, rounded to nearest. Always lies inside the interval.
    pub fn mid(&self) -> f64 {
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    /// Largest absolute value over the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn encloses(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Intersection, or `None` when the intervals are disjoint.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// Splits at the midpoint.
    pub fn bisect(&self) -> (Interval, Interval) {
        let m = self.mid();
        (Interval { lo: self.lo, hi: m }, Interval { lo: m, hi: self.hi })
    }

    /// Pushes both endpoints outward by `n` ulps.
    pub fn widen_ulps(&self, n: u32) -> Interval {
        Interval {
            lo: ulps_down(self.lo, n),
            hi: ulps_up(self.hi, n),
        }
    }

    /// Pushes both endpoints outward by `delta >= 0`, rounding outward.
    pub fn inflate(&self, delta: f64) -> Interval {
        Interval {
            lo: (self.lo - delta).next_down(),
            hi: (self.hi + delta).next_up(),
        }
    }

    fn checked(lo: f64, hi: f64) -> Result<Interval, DomainKind> {
        if lo.is_finite() && hi.is_finite() {
            Ok(Interval { lo, hi })
        } else {
            Err(DomainKind::Overflow)
        }
    }

    pub fn try_add(self, rhs: Interval) -> Result<Interval, DomainKind> {
        let lo = round_sum(self.lo, rhs.lo).0;
        let hi = round_sum(self.hi, rhs.hi).1;
        Self::checked(lo, hi)
    }

    pub fn try_sub(self, rhs: Interval) -> Result<Interval, DomainKind> {
        self.try_add(-rhs)
    }

    pub fn try_mul(self, rhs: Interval) -> Result<Interval, DomainKind> {
        let products = [
            round_product(self.lo, rhs.lo),
            round_product(self.lo, rhs.hi),
            round_product(self.hi, rhs.lo),
            round_product(self.hi, rhs.hi),
        ];
        let lo = products.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let hi = products.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        Self::checked(lo, hi)
    }

    pub fn try_div(self, rhs: Interval) -> Result<Interval, DomainKind> {
        if rhs.contains_zero() {
            return Err(DomainKind::DivisionByZero);
        }
        let quotients = [
            round_quotient(self.lo, rhs.lo),
            round_quotient(self.lo, rhs.hi),
            round_quotient(self.hi, rhs.lo),
            round_quotient(self.hi, rhs.hi),
        ];
        let lo = quotients.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let hi = quotients.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        Self::checked(lo, hi)
    }

    /// Square of the interval; never dips below zero.
    pub fn try_sqr(self) -> Result<Interval, DomainKind> {
        let (near, far) = if self.contains_zero() {
            (0.0, self.mag())
        } else if self.lo > 0.0 {
            (self.lo, self.hi)
        } else {
            (-self.hi, -self.lo)
        };
        let lo = round_product(near, near).0.max(0.0);
        let hi = round_product(far, far).1;
        Self::checked(lo, hi)
    }

    /// Integer power with the exact range rule: even powers are bounded below
    /// by zero and use the magnitude ordering, odd powers are monotone.
    pub fn try_powi(self, n: i32) -> Result<Interval, DomainKind> {
        if n == 0 {
            return Ok(Interval::point(1.0));
        }
        if n < 0 {
            let pos = self.try_powi(n.checked_neg().ok_or(DomainKind::Overflow)?)?;
            return Interval::point(1.0).try_div(pos);
        }
        let n = n as u32;
        if n % 2 == 1 {
            let lo = pow_down(self.lo, n);
            let hi = pow_up(self.hi, n);
            return Self::checked(lo, hi);
        }
        let (near, far) = if self.contains_zero() {
            (0.0, self.mag())
        } else if self.lo > 0.0 {
            (self.lo, self.hi)
        } else {
            (-self.hi, -self.lo)
        };
        let lo = pow_down(near, n).max(0.0);
        let hi = pow_up(far, n);
        Self::checked(lo, hi)
    }

    pub fn try_exp(self) -> Result<Interval, DomainKind> {
        let lo = ulps_down(self.lo.exp(), SLACK_ULPS).max(0.0);
        let hi = ulps_up(self.hi.exp(), SLACK_ULPS);
        Self::checked(lo, hi)
    }

    pub fn try_ln(self) -> Result<Interval, DomainKind> {
        if self.lo <= 0.0 {
            return Err(DomainKind::LogNonPositive);
        }
        let lo = ulps_down(self.lo.ln(), SLACK_ULPS);
        let hi = ulps_up(self.hi.ln(), SLACK_ULPS);
        Self::checked(lo, hi)
    }

    pub fn try_sqrt(self) -> Result<Interval, DomainKind> {
        if self.lo < 0.0 {
            return Err(DomainKind::SqrtNegative);
        }
        let lo = sqrt_rounded(self.lo).0.max(0.0);
        let hi = sqrt_rounded(self.hi).1;
        Self::checked(lo, hi)
    }

    pub fn sin(self) -> Interval {
        // sin(x) = cos(x - pi/2): share the extremum search with cos.
        self.trig(FRAC_PI_2, f64::sin)
    }

    pub fn cos(self) -> Interval {
        self.trig(0.0, f64::cos)
    }

    /// Range of a unit-amplitude sinusoid whose maxima sit at `phase + 2k*pi`
    /// and minima at `phase + pi + 2k*pi`.
    fn trig(self, phase: f64, func: fn(f64) -> f64) -> Interval {
        if self.width() >= 2.0 * PI {
            return Interval { lo: -1.0, hi: 1.0 };
        }
        let a = func(self.lo);
        let b = func(self.hi);
        let mut lo = ulps_down(a.min(b), SLACK_ULPS);
        let mut hi = ulps_up(a.max(b), SLACK_ULPS);
        if self.may_contain_lattice_point(phase) {
            hi = 1.0;
        }
        if self.may_contain_lattice_point(phase + PI) {
            lo = -1.0;
        }
        Interval {
            lo: lo.max(-1.0),
            hi: hi.min(1.0),
        }
    }

    /// Conservative test for `offset + 2k*pi` lying in the interval for some
    /// integer `k`. False positives are allowed, false negatives are not.
    fn may_contain_lattice_point(&self, offset: f64) -> bool {
        let period = 2.0 * PI;
        let s_lo = (self.lo - offset) / period;
        let s_hi = (self.hi - offset) / period;
        let fuzz = 1e-14 * (1.0 + s_lo.abs().max(s_hi.abs()));
        let k = (s_lo - fuzz).ceil();
        k <= s_hi + fuzz
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

// Infallible operators for callers that already know the operands are moderate.
// They panic on overflow; evaluation code uses the `try_` forms.
impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        self.try_add(rhs).expect("interval overflow in addition")
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        self.try_sub(rhs).expect("interval overflow in subtraction")
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        self.try_mul(rhs).expect("interval overflow in multiplication")
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

/// Lower and upper enclosures of a rounded result given the sign of its
/// exact error (`exact = rounded + err`).
fn bracket(rounded: f64, err: f64) -> (f64, f64) {
    if err == 0.0 && rounded.is_finite() {
        (rounded, rounded)
    } else {
        (ulps_down(rounded, SLACK_ULPS), ulps_up(rounded, SLACK_ULPS))
    }
}

fn round_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    // Knuth's TwoSum.
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    bracket(s, err)
}

fn round_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    // Subnormal products can lose the error term; treat them as inexact.
    if p != 0.0 && p.abs() < f64::MIN_POSITIVE {
        return bracket(p, 1.0);
    }
    if p == 0.0 && a != 0.0 && b != 0.0 {
        return (-f64::MIN_POSITIVE, f64::MIN_POSITIVE);
    }
    bracket(p, err)
}

fn round_quotient(a: f64, b: f64) -> (f64, f64) {
    let q = a / b;
    let rem = (-q).mul_add(b, a);
    if q != 0.0 && q.abs() < f64::MIN_POSITIVE {
        return bracket(q, 1.0);
    }
    if q == 0.0 && a != 0.0 {
        return (-f64::MIN_POSITIVE, f64::MIN_POSITIVE);
    }
    bracket(q, rem)
}

fn sqrt_rounded(x: f64) -> (f64, f64) {
    let s = x.sqrt();
    let err = (-s).mul_add(s, x);
    bracket(s, err)
}

fn pow_down(x: f64, n: u32) -> f64 {
    pow_bounds(x, n).0
}

fn pow_up(x: f64, n: u32) -> f64 {
    pow_bounds(x, n).1
}

/// Enclosure of `x^n` for a single real `x`, by repeated outward-rounded products.
fn pow_bounds(x: f64, n: u32) -> (f64, f64) {
    let mut acc = Interval::point(1.0);
    let base = Interval::point(x);
    for _ in 0..n {
        acc = match acc.try_mul(base) {
            Ok(v) => v,
            Err(_) => return (f64::NEG_INFINITY, f64::INFINITY),
        };
    }
    (acc.lo, acc.hi)
}
