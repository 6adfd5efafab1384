//! Truncated Taylor arithmetic.
//!
//! A [`Jet`] of order `r` stores the normalized Taylor coefficients
//! `f(x0), f'(x0), f''(x0)/2!, ..., f^(r)(x0)/r!`. Elementary functions are
//! propagated with the usual convolution recurrences, so derivatives of any
//! order come out of a single forward pass over the expression tree. The
//! coefficient type is any [`Scalar`]: plain `f64`, or [`Interval`] when the
//! expansion point is itself an interval and every coefficient must enclose
//! the corresponding derivative over it.

use std::fmt::Debug;

use crate::error::DomainKind;
use crate::interval::Interval;

/// Fallible field-like operations shared by the evaluation back-ends.
pub trait Arith: Sized + Clone {
    fn add(&self, rhs: &Self) -> Result<Self, DomainKind>;
    fn sub(&self, rhs: &Self) -> Result<Self, DomainKind>;
    fn mul(&self, rhs: &Self) -> Result<Self, DomainKind>;
    fn div(&self, rhs: &Self) -> Result<Self, DomainKind>;
    fn neg(&self) -> Self;
    fn powi(&self, n: i32) -> Result<Self, DomainKind>;
    fn exp(&self) -> Result<Self, DomainKind>;
    fn ln(&self) -> Result<Self, DomainKind>;
    fn sqrt(&self) -> Result<Self, DomainKind>;
    fn sin(&self) -> Result<Self, DomainKind>;
    fn cos(&self) -> Result<Self, DomainKind>;
}

/// Coefficient type of a jet.
pub trait Scalar: Arith + Copy + Debug + Send + Sync {
    fn constant(v: f64) -> Self;
    /// Square; interval implementations keep the result non-negative.
    fn sqr(&self) -> Result<Self, DomainKind>;
}

fn finite(v: f64) -> Result<f64, DomainKind> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(DomainKind::Overflow)
    }
}

impl Arith for f64 {
    fn add(&self, rhs: &Self) -> Result<Self, DomainKind> {
        finite(self + rhs)
    }
    fn sub(&self, rhs: &Self) -> Result<Self, DomainKind> {
        finite(self - rhs)
    }
    fn mul(&self, rhs: &Self) -> Result<Self, DomainKind> {
        finite(self * rhs)
    }
    fn div(&self, rhs: &Self) -> Result<Self, DomainKind> {
        if *rhs == 0.0 {
            return Err(DomainKind::DivisionByZero);
        }
        finite(self / rhs)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn powi(&self, n: i32) -> Result<Self, DomainKind> {
        if n < 0 && *self == 0.0 {
            return Err(DomainKind::DivisionByZero);
        }
        finite(f64::powi(*self, n))
    }
    fn exp(&self) -> Result<Self, DomainKind> {
        finite(f64::exp(*self))
    }
    fn ln(&self) -> Result<Self, DomainKind> {
        if *self <= 0.0 {
            return Err(DomainKind::LogNonPositive);
        }
        Ok(f64::ln(*self))
    }
    fn sqrt(&self) -> Result<Self, DomainKind> {
        if *self < 0.0 {
            return Err(DomainKind::SqrtNegative);
        }
        Ok(f64::sqrt(*self))
    }
    fn sin(&self) -> Result<Self, DomainKind> {
        Ok(f64::sin(*self))
    }
    fn cos(&self) -> Result<Self, DomainKind> {
        Ok(f64::cos(*self))
    }
}

impl Scalar for f64 {
    fn constant(v: f64) -> Self {
        v
    }
    fn sqr(&self) -> Result<Self, DomainKind> {
        finite(self * self)
    }
}

impl Arith for Interval {
    fn add(&self, rhs: &Self) -> Result<Self, DomainKind> {
        self.try_add(*rhs)
    }
    fn sub(&self, rhs: &Self) -> Result<Self, DomainKind> {
        self.try_sub(*rhs)
    }
    fn mul(&self, rhs: &Self) -> Result<Self, DomainKind> {
        self.try_mul(*rhs)
    }
    fn div(&self, rhs: &Self) -> Result<Self, DomainKind> {
        self.try_div(*rhs)
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn powi(&self, n: i32) -> Result<Self, DomainKind> {
        self.try_powi(n)
    }
    fn exp(&self) -> Result<Self, DomainKind> {
        self.try_exp()
    }
    fn ln(&self) -> Result<Self, DomainKind> {
        self.try_ln()
    }
    fn sqrt(&self) -> Result<Self, DomainKind> {
        self.try_sqrt()
    }
    fn sin(&self) -> Result<Self, DomainKind> {
        Ok(Interval::sin(*self))
    }
    fn cos(&self) -> Result<Self, DomainKind> {
        Ok(Interval::cos(*self))
    }
}

impl Scalar for Interval {
    fn constant(v: f64) -> Self {
        Interval::point(v)
    }
    fn sqr(&self) -> Result<Self, DomainKind> {
        self.try_sqr()
    }
}

/// Truncated Taylor expansion `coeffs[k] = f^(k)(x0) / k!`, `k = 0..=order`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Jet<S> {
    /// Jet of the identity at `x0`: `[x0, 1, 0, ..., 0]`.
    pub fn variable(x0: S, order: usize) -> Self {
        let mut coeffs = vec![S::constant(0.0); order + 1];
        coeffs[0] = x0;
        if order >= 1 {
            coeffs[1] = S::constant(1.0);
        }
        Self { coeffs }
    }

    pub fn constant(v: S, order: usize) -> Self {
        let mut coeffs = vec![S::constant(0.0); order + 1];
        coeffs[0] = v;
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    pub fn value(&self) -> S {
        self.coeffs[0]
    }

    /// `f^(k)(x0)`, i.e. `coeffs[k] * k!`. `None` past the jet order.
    pub fn derivative(&self, k: usize) -> Option<Result<S, DomainKind>> {
        let c = *self.coeffs.get(k)?;
        let factorial = (1..=k).fold(1.0f64, |acc, i| acc * i as f64);
        Some(c.mul(&S::constant(factorial)))
    }

    fn zip_with(&self, rhs: &Self, op: impl Fn(&S, &S) -> Result<S, DomainKind>) -> Result<Self, DomainKind> {
        debug_assert_eq!(self.order(), rhs.order());
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| op(a, b))
            .collect::<Result<_, _>>()?;
        Ok(Self { coeffs })
    }

    /// `1/k` as a scalar, for the `k`-th step of a recurrence.
    fn scaled(v: S, k: usize) -> Result<S, DomainKind> {
        v.div(&S::constant(k as f64))
    }
}

impl<S: Scalar> Arith for Jet<S> {
    fn add(&self, rhs: &Self) -> Result<Self, DomainKind> {
        self.zip_with(rhs, |a, b| a.add(b))
    }

    fn sub(&self, rhs: &Self) -> Result<Self, DomainKind> {
        self.zip_with(rhs, |a, b| a.sub(b))
    }

    fn mul(&self, rhs: &Self) -> Result<Self, DomainKind> {
        let (u, v) = (&self.coeffs, &rhs.coeffs);
        let mut out = Vec::with_capacity(u.len());
        for k in 0..u.len() {
            let mut acc = S::constant(0.0);
            for j in 0..=k {
                acc = acc.add(&u[j].mul(&v[k - j])?)?;
            }
            out.push(acc);
        }
        Ok(Self { coeffs: out })
    }

    fn div(&self, rhs: &Self) -> Result<Self, DomainKind> {
        let (u, v) = (&self.coeffs, &rhs.coeffs);
        let mut q: Vec<S> = Vec::with_capacity(u.len());
        for k in 0..u.len() {
            let mut acc = u[k];
            for j in 0..k {
                acc = acc.sub(&q[j].mul(&v[k - j])?)?;
            }
            q.push(acc.div(&v[0])?);
        }
        Ok(Self { coeffs: q })
    }

    fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    /// `(u0 + d)^n = sum_j C(n, j) u0^(n-j) d^j` where `d` has no constant
    /// term, so only `j <= order` contributes. Each `u0^(n-j)` is a direct
    /// power, which keeps even powers of intervals straddling zero
    /// non-negative; repeated squaring of the jet would not.
    fn powi(&self, n: i32) -> Result<Self, DomainKind> {
        let order = self.order();
        let u0 = self.coeffs[0];
        let mut d = self.clone();
        d.coeffs[0] = S::constant(0.0);
        let top = if n >= 0 { order.min(n as usize) } else { order };

        let mut out = Self::constant(u0.powi(n)?, order);
        let mut d_pow = Self::constant(S::constant(1.0), order);
        let mut binom = S::constant(1.0);
        for j in 1..=top {
            d_pow = d_pow.mul(&d)?;
            binom = binom.mul(&S::constant(n as f64 - (j - 1) as f64))?;
            binom = Self::scaled(binom, j)?;
            let scale = binom.mul(&u0.powi(n - j as i32)?)?;
            for k in j..=order {
                out.coeffs[k] = out.coeffs[k].add(&scale.mul(&d_pow.coeffs[k])?)?;
            }
        }
        Ok(out)
    }

    fn exp(&self) -> Result<Self, DomainKind> {
        let u = &self.coeffs;
        let mut e: Vec<S> = Vec::with_capacity(u.len());
        e.push(u[0].exp()?);
        for k in 1..u.len() {
            let mut acc = S::constant(0.0);
            for j in 1..=k {
                let term = S::constant(j as f64).mul(&u[j])?.mul(&e[k - j])?;
                acc = acc.add(&term)?;
            }
            e.push(Self::scaled(acc, k)?);
        }
        Ok(Self { coeffs: e })
    }

    fn ln(&self) -> Result<Self, DomainKind> {
        let u = &self.coeffs;
        let mut l: Vec<S> = Vec::with_capacity(u.len());
        l.push(u[0].ln()?);
        for k in 1..u.len() {
            let mut acc = S::constant(0.0);
            for j in 1..k {
                let term = S::constant(j as f64).mul(&l[j])?.mul(&u[k - j])?;
                acc = acc.add(&term)?;
            }
            let num = u[k].sub(&Self::scaled(acc, k)?)?;
            l.push(num.div(&u[0])?);
        }
        Ok(Self { coeffs: l })
    }

    fn sqrt(&self) -> Result<Self, DomainKind> {
        let u = &self.coeffs;
        let mut s: Vec<S> = Vec::with_capacity(u.len());
        s.push(u[0].sqrt()?);
        if u.len() > 1 {
            let two_s0 = s[0].add(&s[0])?;
            for k in 1..u.len() {
                let mut acc = u[k];
                for j in 1..k {
                    acc = acc.sub(&s[j].mul(&s[k - j])?)?;
                }
                s.push(acc.div(&two_s0)?);
            }
        }
        Ok(Self { coeffs: s })
    }

    fn sin(&self) -> Result<Self, DomainKind> {
        Ok(sin_cos(self)?.0)
    }

    fn cos(&self) -> Result<Self, DomainKind> {
        Ok(sin_cos(self)?.1)
    }
}

/// Coupled recurrences for `sin(u)` and `cos(u)`:
/// `s_k = (1/k) sum j u_j c_{k-j}`, `c_k = -(1/k) sum j u_j s_{k-j}`.
pub fn sin_cos<S: Scalar>(jet: &Jet<S>) -> Result<(Jet<S>, Jet<S>), DomainKind> {
    let u = &jet.coeffs;
    let mut s: Vec<S> = Vec::with_capacity(u.len());
    let mut c: Vec<S> = Vec::with_capacity(u.len());
    s.push(u[0].sin()?);
    c.push(u[0].cos()?);
    for k in 1..u.len() {
        let mut sk = S::constant(0.0);
        let mut ck = S::constant(0.0);
        for j in 1..=k {
            let ju = S::constant(j as f64).mul(&u[j])?;
            sk = sk.add(&ju.mul(&c[k - j])?)?;
            ck = ck.sub(&ju.mul(&s[k - j])?)?;
        }
        s.push(Jet::<S>::scaled(sk, k)?);
        c.push(Jet::<S>::scaled(ck, k)?);
    }
    Ok((Jet { coeffs: s }, Jet { coeffs: c }))
}
