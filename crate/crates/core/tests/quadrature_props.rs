mod common;

use hhquad::{integrate, CurvatureScope, CurvatureSource, Expr, QuadConfig, QuadReport};

use common::{gauss5, rng, smooth_integrand, subinterval};

fn oracle(f: &Expr, a: f64, b: f64) -> f64 {
    gauss5(|x| f.eval_real(x).unwrap(), a, b, 256)
}

fn assert_contains(rep: &QuadReport, v: f64, what: &str) {
    let tol = 1e-12 * (1.0 + v.abs());
    let b = rep.integral_bounds;
    assert!(b.lo() - tol <= v && v <= b.hi() + tol, "{what}: {v} outside {b}");
}

#[test]
fn fixed_panels_contain_the_integral_at_every_scale() {
    let mut r = rng(51);
    for case in 0..200 {
        let text = smooth_integrand(&mut r);
        let f: Expr = text.parse().unwrap();
        let (a, b) = subinterval(&mut r, -3.0, 3.0, 0.01);
        let exact = oracle(&f, a, b);
        for n in [1, 2, 4, 8, 16, 32] {
            let rep = integrate(&f, a, b, &QuadConfig::fixed(n)).unwrap();
            assert!(rep.certified);
            assert_eq!(rep.panel_count, n);
            assert_contains(&rep, exact, &format!("case {case}: {text} on [{a}, {b}], n={n}"));
        }
    }
}

#[test]
fn adaptive_runs_contain_the_integral_and_meet_tolerance() {
    let mut r = rng(52);
    for case in 0..100 {
        let text = smooth_integrand(&mut r);
        let f: Expr = text.parse().unwrap();
        let (a, b) = subinterval(&mut r, -3.0, 3.0, 0.01);
        let rep = integrate(&f, a, b, &QuadConfig::adaptive(1e-6)).unwrap();
        assert!(rep.tolerance_met, "case {case}: {text}");
        assert!(rep.certified);
        assert!(rep.width() <= 1e-6);
        assert_contains(&rep, oracle(&f, a, b), &format!("case {case}: {text}"));
    }
}

#[test]
fn global_curvature_and_compensated_sums_stay_sound() {
    let mut r = rng(53);
    for case in 0..100 {
        let text = smooth_integrand(&mut r);
        let f: Expr = text.parse().unwrap();
        let (a, b) = subinterval(&mut r, -3.0, 3.0, 0.01);
        let exact = oracle(&f, a, b);
        let mut cfg = QuadConfig::fixed(12);
        cfg.scope = CurvatureScope::Global;
        assert_contains(&integrate(&f, a, b, &cfg).unwrap(), exact, &format!("global {case}"));
        cfg.scope = CurvatureScope::PerPanel;
        cfg.compensated = true;
        assert_contains(
            &integrate(&f, a, b, &cfg).unwrap(),
            exact,
            &format!("compensated {case}"),
        );
    }
}

#[test]
fn global_mode_converges_at_second_order() {
    for (text, a, b) in [("exp(x)", 0.0, 1.0), ("sin(x)", 0.0, 2.0), ("1 / (1 + x^2)", -1.0, 1.0)] {
        let f: Expr = text.parse().unwrap();
        let width = |n: usize| {
            let mut cfg = QuadConfig::fixed(n);
            cfg.scope = CurvatureScope::Global;
            integrate(&f, a, b, &cfg).unwrap().width()
        };
        let ws: Vec<f64> = [4, 8, 16, 32, 64, 128].iter().map(|&n| width(n)).collect();
        for w in ws.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((1.8..=3.2).contains(&order), "{text}: order {order} from {w:?}");
        }
    }
}

#[test]
fn refinement_never_widens_in_global_mode() {
    let mut r = rng(54);
    for _ in 0..50 {
        let f: Expr = smooth_integrand(&mut r).parse().unwrap();
        let (a, b) = subinterval(&mut r, -3.0, 3.0, 0.1);
        let mut prev = f64::INFINITY;
        for n in [1, 2, 4, 8, 16] {
            let mut cfg = QuadConfig::fixed(n);
            cfg.scope = CurvatureScope::Global;
            let w = integrate(&f, a, b, &cfg).unwrap().width();
            // Slack at the rounding level for nearly affine integrands.
            assert!(w <= prev + 1e-12, "n={n}: {w} > {prev}");
            prev = w;
        }
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let f: Expr = "exp(-(x^2)) * cos(3 * x) + x^3".parse().unwrap();
    let run = || {
        let fixed = integrate(&f, -2.0, 2.5, &QuadConfig::fixed(64)).unwrap();
        let adaptive = integrate(&f, -2.0, 2.5, &QuadConfig::adaptive(1e-8)).unwrap();
        (fixed, adaptive)
    };
    let (f1, a1) = run();
    let (f2, a2) = run();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let (f3, a3) = pool.install(run);
    for (x, y) in [(&f1, &f2), (&f1, &f3), (&a1, &a2), (&a1, &a3)] {
        assert_eq!(x.integral_bounds.lo().to_bits(), y.integral_bounds.lo().to_bits());
        assert_eq!(x.integral_bounds.hi().to_bits(), y.integral_bounds.hi().to_bits());
        assert_eq!(x.panel_count, y.panel_count);
        assert_eq!(x.evaluations, y.evaluations);
    }
}

#[test]
fn heuristic_and_manual_sources_are_labelled() {
    let f: Expr = "sin(x)".parse().unwrap();
    let mut cfg = QuadConfig::fixed(8);
    cfg.curvature = CurvatureSource::Heuristic;
    let rep = integrate(&f, 0.0, 3.0, &cfg).unwrap();
    assert!(!rep.certified);
    assert_contains(&rep, 1.0 - 3f64.cos(), "heuristic");

    cfg.curvature = CurvatureSource::Manual { m: -1.0, big_m: 1.0 };
    let rep = integrate(&f, 0.0, 3.0, &cfg).unwrap();
    assert!(rep.certified);
    assert_contains(&rep, 1.0 - 3f64.cos(), "manual");
}
