mod common;

use hhquad::{bound_curvature, CurvatureMode, CurvatureOptions, Expr, Interval};

use common::{fd2, rng, smooth_integrand, subinterval};

#[test]
fn rigorous_bounds_contain_sampled_second_derivatives() {
    let mut r = rng(21);
    let opts = CurvatureOptions::default();
    for case in 0..100 {
        let text = smooth_integrand(&mut r);
        let f: Expr = text.parse().unwrap();
        let (a, b) = subinterval(&mut r, -3.0, 3.0, 0.01);
        let c = bound_curvature(&f, Interval::new(a, b).unwrap(), CurvatureMode::Rigorous, &opts).unwrap();
        assert_eq!(c.mode, CurvatureMode::Rigorous);
        for i in 0..10_000 {
            let x = a + (b - a) * (i as f64 + 0.5) / 10_000.0;
            let d2 = f.eval_jet(x, 2).unwrap().derivative(2).unwrap().unwrap();
            let slack = 1e-9 * (1.0 + d2.abs());
            assert!(
                c.lower - slack <= d2 && d2 <= c.upper + slack,
                "case {case}: {text} on [{a}, {b}]: f''({x}) = {d2} outside [{}, {}]",
                c.lower,
                c.upper
            );
        }
        // Endpoints, cross-checked by finite differences.
        for x in [a, b] {
            let d2 = fd2(&f, x, 1e-4);
            let slack = 1e-4 * (1.0 + d2.abs());
            assert!(c.lower - slack <= d2 && d2 <= c.upper + slack, "case {case}: fd at {x}");
        }
    }
}

#[test]
fn larger_budget_never_loosens() {
    let mut r = rng(22);
    for _ in 0..40 {
        let f: Expr = smooth_integrand(&mut r).parse().unwrap();
        let (a, b) = subinterval(&mut r, -3.0, 3.0, 0.5);
        let dom = Interval::new(a, b).unwrap();
        let mut prev: Option<(f64, f64)> = None;
        for budget in [1, 2, 4, 8, 16, 64, 256] {
            let c = bound_curvature(&f, dom, CurvatureMode::Rigorous, &CurvatureOptions::with_budget(budget)).unwrap();
            if let Some((lo, hi)) = prev {
                assert!(
                    c.lower >= lo && c.upper <= hi,
                    "budget {budget}: [{}, {}] vs [{lo}, {hi}]",
                    c.lower,
                    c.upper
                );
            }
            prev = Some((c.lower, c.upper));
        }
    }
}

#[test]
fn heuristic_bounds_track_the_rigorous_ones() {
    let mut r = rng(23);
    let opts = CurvatureOptions::default();
    for _ in 0..50 {
        let f: Expr = smooth_integrand(&mut r).parse().unwrap();
        let (a, b) = subinterval(&mut r, -3.0, 3.0, 0.1);
        let dom = Interval::new(a, b).unwrap();
        let h = bound_curvature(&f, dom, CurvatureMode::Heuristic, &opts).unwrap();
        let g = bound_curvature(&f, dom, CurvatureMode::Rigorous, &opts).unwrap();
        assert_eq!(h.mode, CurvatureMode::Heuristic);
        assert!(!h.mode.is_certifying());
        assert!(h.lower <= h.upper);
        // Sampling sees a subset of the true range, padded by a little.
        let pad = 0.02 * (g.spread() + 1.0);
        assert!(h.lower >= g.lower - pad && h.upper <= g.upper + pad);
    }
}

#[test]
fn work_counts_grow_with_budget() {
    let f: Expr = "sin(5 * x) * exp(x)".parse().unwrap();
    let dom = Interval::new(-3.0, 3.0).unwrap();
    let small = bound_curvature(&f, dom, CurvatureMode::Rigorous, &CurvatureOptions::with_budget(1)).unwrap();
    let big = bound_curvature(&f, dom, CurvatureMode::Rigorous, &CurvatureOptions::with_budget(64)).unwrap();
    assert_eq!(small.work.interval, 1);
    assert!(big.work.interval > small.work.interval);
    assert!(big.work.interval <= 2 * 64 + 1);
    for x in [-2.9, -0.4, 1.3, 2.75] {
        let d2 = f.eval_jet(x, 2).unwrap().derivative(2).unwrap().unwrap();
        assert!(big.lower <= d2 && d2 <= big.upper);
    }
}
