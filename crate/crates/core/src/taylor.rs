//! Taylor polynomials and the integral form of the remainder.
//!
//! For `f` with `r` derivatives,
//!
//! ```text
//! f(x) = sum_{k<r} f^(k)(x0) (x-x0)^k / k!  +  int_{x0}^{x} (x-t)^(r-1) f^(r)(t) / (r-1)! dt
//! ```
//!
//! The polynomial coefficients and `f^(r)` come from real jets; the remainder
//! integral is evaluated with Gauss–Legendre quadrature. Since both sides are
//! computed independently, the identity checks the jet machinery.

use crate::error::TaylorError;
use crate::expr::Expr;

pub const DEFAULT_GL_ORDER: usize = 24;

/// `T_{r-1}(f, x0, .)`: coefficients `f^(k)(x0)/k!` for `k < r`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorExpansion {
    pub x0: f64,
    pub order_r: usize,
    pub poly_coeffs: Vec<f64>,
}

impl TaylorExpansion {
    pub fn new(f: &Expr, x0: f64, r: usize) -> Result<Self, TaylorError> {
        if r == 0 {
            return Err(TaylorError::ZeroOrder);
        }
        let mut poly_coeffs = f.eval_jet(x0, r - 1)?.into_coeffs();
        poly_coeffs.truncate(r);
        Ok(Self {
            x0,
            order_r: r,
            poly_coeffs,
        })
    }

    /// Horner evaluation in `x - x0`.
    pub fn eval(&self, x: f64) -> f64 {
        let u = x - self.x0;
        self.poly_coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
    }
}

/// `sum_{k<r} f^(k)(x0) (x - x0)^k / k!`.
pub fn taylor_polynomial(f: &Expr, x0: f64, r: usize, x: f64) -> Result<f64, TaylorError> {
    Ok(TaylorExpansion::new(f, x0, r)?.eval(x))
}

/// How the remainder integral is parametrized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RemainderForm {
    /// `int_{x0}^{x} (x - t)^(r-1) f^(r)(t) / (r-1)! dt`.
    #[default]
    Direct,
    /// `int_0^u (u - t)^(r-1) f^(r)(x0 + t) / (r-1)! dt` with `u = x - x0`.
    Shifted,
}

/// Remainder `f(x) - T_{r-1}(f, x0, x)` as the oriented integral, evaluated
/// with `gl_order`-point Gauss–Legendre. Valid for `x < x0` as well.
pub fn taylor_remainder(
    f: &Expr,
    x0: f64,
    r: usize,
    x: f64,
    gl_order: usize,
    form: RemainderForm,
) -> Result<f64, TaylorError> {
    if r == 0 {
        return Err(TaylorError::ZeroOrder);
    }
    if gl_order < 2 {
        return Err(TaylorError::QuadratureOrder(gl_order));
    }
    if x == x0 {
        return Ok(0.0);
    }
    // f^(r)(t) / (r-1)! = r * c_r(t) with c_r the normalized jet coefficient.
    let kernel = |t: f64| -> Result<f64, TaylorError> { Ok(r as f64 * f.eval_jet(t, r)?.coeffs()[r]) };
    let (nodes, weights) = gauss_legendre(gl_order);
    let mut sum = 0.0;
    match form {
        RemainderForm::Direct => {
            let half = 0.5 * (x - x0);
            let centre = 0.5 * (x + x0);
            for (s, w) in nodes.iter().zip(&weights) {
                let t = centre + half * s;
                sum += w * (x - t).powi(r as i32 - 1) * kernel(t)?;
            }
            Ok(half * sum)
        }
        RemainderForm::Shifted => {
            let u = x - x0;
            let half = 0.5 * u;
            for (s, w) in nodes.iter().zip(&weights) {
                let t = half + half * s;
                sum += w * (u - t).powi(r as i32 - 1) * kernel(x0 + t)?;
            }
            Ok(half * sum)
        }
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// ascending. Newton iteration on `P_n` from Chebyshev-like initial guesses.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}
