#![allow(dead_code)]

use hhquad::Expr;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Literal that parses back to exactly `c`.
pub fn lit(c: f64) -> String {
    if c < 0.0 {
        format!("(-{:?})", -c)
    } else {
        format!("{c:?}")
    }
}

fn coef<R: Rng>(r: &mut R, span: f64) -> f64 {
    // Two decimals keeps the expressions readable in failure messages.
    (r.gen_range(-span..span) * 100.0).round() / 100.0
}

/// A random smooth integrand: a sum of 1 to 4 terms drawn from monomials of
/// degree at most 6 and exponential / trigonometric pieces, kept moderate on
/// [-3, 3].
pub fn smooth_integrand<R: Rng>(r: &mut R) -> String {
    let n = r.gen_range(1..=4);
    let mut terms = Vec::new();
    for _ in 0..n {
        let c = lit(coef(r, 2.0));
        let t = match r.gen_range(0..6) {
            0 => format!("{c} * x^{}", r.gen_range(0..=6)),
            1 => format!("{c} * exp({} * x)", lit(coef(r, 1.5))),
            2 => format!("{c} * sin({} * x + {})", lit(coef(r, 3.0)), lit(coef(r, 1.0))),
            3 => format!("{c} * cos({} * x)", lit(coef(r, 3.0))),
            4 => format!("{c} * exp({} * x) * sin(x)", lit(coef(r, 1.0))),
            _ => format!("{c} * x^{} * cos({} * x)", r.gen_range(1..=3), lit(coef(r, 2.0))),
        };
        terms.push(t);
    }
    terms.join(" + ")
}

/// A random convex integrand on any interval: positive combinations of even
/// powers and exponentials, each of which is convex on its own.
pub fn convex_integrand<R: Rng>(r: &mut R) -> String {
    let n = r.gen_range(1..=3);
    let mut terms = Vec::new();
    for _ in 0..n {
        let c = lit(r.gen_range(0.05..2.0));
        let t = match r.gen_range(0..3) {
            0 => format!("{c} * (x - {})^{}", lit(coef(r, 2.0)), 2 * r.gen_range(1..=3)),
            1 => format!("{c} * exp({} * x)", lit(coef(r, 1.5))),
            _ => format!("{c} * x^2"),
        };
        terms.push(t);
    }
    terms.join(" + ")
}

/// A random sub-interval of `[lo, hi]` with width at least `min_width`.
pub fn subinterval<R: Rng>(r: &mut R, lo: f64, hi: f64, min_width: f64) -> (f64, f64) {
    loop {
        let a = r.gen_range(lo..hi);
        let b = r.gen_range(lo..hi);
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        if b - a >= min_width {
            return (a, b);
        }
    }
}

/// Random expression tree over the full grammar. Domain errors are possible;
/// callers skip those samples.
pub fn random_tree<R: Rng>(r: &mut R, depth: u32) -> Expr {
    if depth == 0 || r.gen_bool(0.25) {
        return if r.gen_bool(0.6) {
            Expr::Var
        } else {
            Expr::Const(coef(r, 3.0))
        };
    }
    let sub = |r: &mut R| Box::new(random_tree(r, depth - 1));
    match r.gen_range(0..11) {
        0 => Expr::Unary(hhquad::UnaryOp::Neg, sub(r)),
        1 => Expr::Unary(hhquad::UnaryOp::Exp, sub(r)),
        2 => Expr::Unary(hhquad::UnaryOp::Log, sub(r)),
        3 => Expr::Unary(hhquad::UnaryOp::Sin, sub(r)),
        4 => Expr::Unary(hhquad::UnaryOp::Cos, sub(r)),
        5 => Expr::Unary(hhquad::UnaryOp::Sqrt, sub(r)),
        6 => Expr::Binary(hhquad::BinaryOp::Add, sub(r), sub(r)),
        7 => Expr::Binary(hhquad::BinaryOp::Sub, sub(r), sub(r)),
        8 => Expr::Binary(hhquad::BinaryOp::Mul, sub(r), sub(r)),
        9 => Expr::Binary(hhquad::BinaryOp::Div, sub(r), sub(r)),
        _ => Expr::Pow(sub(r), r.gen_range(-3..=5)),
    }
}

/// Composite 5-point Gauss–Legendre; independent of the library's rules.
pub fn gauss5(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 5] = [
        -0.906_179_845_938_664,
        -0.538_469_310_105_683_1,
        0.0,
        0.538_469_310_105_683_1,
        0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.236_926_885_056_189_08,
        0.478_628_670_499_366_47,
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_47,
        0.236_926_885_056_189_08,
    ];
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let lo = a + i as f64 * h;
        let c = lo + 0.5 * h;
        let s: f64 = X.iter().zip(&W).map(|(x, w)| w * f(c + 0.5 * h * x)).sum();
        total += 0.5 * h * s;
    }
    total
}

/// Central-difference second derivative.
pub fn fd2(f: &Expr, x: f64, h: f64) -> f64 {
    let v = |t: f64| f.eval_real(t).unwrap();
    (v(x + h) - 2.0 * v(x) + v(x - h)) / (h * h)
}
