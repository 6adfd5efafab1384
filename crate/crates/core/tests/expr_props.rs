mod common;

use hhquad::{BinaryOp, Expr, Interval, UnaryOp};
use proptest::prelude::*;
use rand::Rng;

use common::{random_tree, rng, smooth_integrand, subinterval};

#[test]
fn jet_derivatives_match_finite_differences() {
    let mut r = rng(11);
    for case in 0..200 {
        let text = smooth_integrand(&mut r);
        let f: Expr = text.parse().unwrap();
        let x = r.gen_range(-2.0..2.0);
        let jet = f.eval_jet(x, 2).unwrap();
        let v = |t: f64| f.eval_real(t).unwrap();

        // Fourth-order central differences.
        let h = 1e-3;
        let d1 = (v(x - 2.0 * h) - 8.0 * v(x - h) + 8.0 * v(x + h) - v(x + 2.0 * h)) / (12.0 * h);
        let h = 1e-2;
        let d2 = (-v(x - 2.0 * h) + 16.0 * v(x - h) - 30.0 * v(x) + 16.0 * v(x + h) - v(x + 2.0 * h)) / (12.0 * h * h);

        let j1 = jet.derivative(1).unwrap().unwrap();
        let j2 = jet.derivative(2).unwrap().unwrap();
        assert_eq!(jet.value(), v(x), "case {case}: {text}");
        assert!(
            (j1 - d1).abs() <= 1e-5f64.max(1e-5 * d1.abs()),
            "case {case}: {text} at {x}: {j1} vs {d1}"
        );
        assert!(
            (j2 - d2).abs() <= 1e-5f64.max(1e-5 * d2.abs()),
            "case {case}: {text} at {x}: {j2} vs {d2}"
        );
    }
}

#[test]
fn high_order_jets_of_exponentials() {
    // d^k/dx^k exp(c x) = c^k exp(c x).
    let mut r = rng(12);
    for _ in 0..50 {
        let c: f64 = r.gen_range(-2.0..2.0);
        let x: f64 = r.gen_range(-1.0..1.0);
        let f: Expr = format!("exp({} * x)", common::lit(c)).parse().unwrap();
        let jet = f.eval_jet(x, 6).unwrap();
        for k in 0..=6 {
            let want = c.powi(k as i32) * (c * x).exp();
            let got = jet.derivative(k).unwrap().unwrap();
            assert!(
                (got - want).abs() <= 1e-12 * (1.0 + want.abs()),
                "k={k}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn interval_evaluation_contains_point_values() {
    let mut r = rng(13);
    let mut checked = 0;
    while checked < 1000 {
        let f = random_tree(&mut r, 4);
        let (a, b) = subinterval(&mut r, -3.0, 3.0, 1e-3);
        let Ok(enc) = f.eval_interval(Interval::new(a, b).unwrap()) else {
            continue;
        };
        checked += 1;
        for i in 0..=16 {
            let x = if i == 16 { b } else { a + (b - a) * i as f64 / 16.0 };
            if let Ok(v) = f.eval_real(x) {
                assert!(enc.contains(v), "{f} on [{a}, {b}] = {enc} misses f({x}) = {v}");
            }
        }
    }
}

#[test]
fn interval_jets_contain_point_jets() {
    let mut r = rng(14);
    let mut checked = 0;
    while checked < 300 {
        let f = random_tree(&mut r, 3);
        let (a, b) = subinterval(&mut r, -2.0, 2.0, 1e-3);
        let Ok(enc) = f.eval_jet(Interval::new(a, b).unwrap(), 3) else {
            continue;
        };
        checked += 1;
        for i in 0..=8 {
            let x = a + (b - a) * i as f64 / 8.0;
            let Ok(pt) = f.eval_jet(x, 3) else { continue };
            for (k, (iv, v)) in enc.coeffs().iter().zip(pt.coeffs()).enumerate() {
                assert!(iv.contains(*v), "{f} coeff {k} on [{a}, {b}] = {iv} misses {v} at {x}");
            }
        }
    }
}

const CORPUS: [&str; 50] = [
    "x",
    "1",
    "2.5",
    "-x",
    "--x",
    "x + 1",
    "x - 1 - 2",
    "x - (1 - 2)",
    "x * 2 / 3",
    "x / (2 * 3)",
    "x / 2 / 3",
    "2 * x + 3 * x^2",
    "x^2",
    "x^0",
    "x^-2",
    "(x + 1)^3",
    "-x^2",
    "-(x^2)",
    "(-x)^3",
    "(x^2)^3",
    "exp(x)",
    "exp(-x^2)",
    "log(x + 2)",
    "sqrt(x^2 + 1)",
    "sin(x) * cos(x)",
    "sin(cos(x))",
    "1 / (1 + x^2)",
    "exp(x) * sin(3 * x) - cos(x) / 2",
    "x * x * x",
    "(x + 1) * (x - 1)",
    "x - x",
    "1e-3 * x",
    "2.5e2",
    ".5 * x",
    "x - -1",
    "x * -1",
    "exp(log(x + 3))",
    "sqrt(sqrt(x + 4))",
    "sin(x)^2 + cos(x)^2",
    "(exp(x) - exp(-x)) / 2",
    "1 / x",
    "x / (x + 1)^2",
    "3 - x * (2 - x * (1 - x))",
    "-(x + 1) * 2",
    "-exp(x)",
    "cos(2 * x)^-1",
    "((x))",
    "log(exp(x))",
    "x^6 - 5 * x^4 + 2",
    "  x  *  2  ",
];

#[test]
fn corpus_round_trips() {
    for text in CORPUS {
        let e: Expr = text.parse().unwrap_or_else(|err| panic!("{text}: {err}"));
        let printed = e.to_string();
        let again: Expr = printed
            .parse()
            .unwrap_or_else(|err| panic!("{text} -> {printed}: {err}"));
        assert_eq!(again, e, "{text} -> {printed}");
        assert_eq!(again.to_string(), printed);
        for x in [0.3, 1.7] {
            match (e.eval_real(x), again.eval_real(x)) {
                (Ok(u), Ok(v)) => assert_eq!(u.to_bits(), v.to_bits()),
                (Err(_), Err(_)) => {}
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::Var),
        (0.0f64..100.0).prop_map(Expr::Const),
        (0u32..10).prop_map(|k| Expr::Const(k as f64)),
    ];
    leaf.prop_recursive(5, 40, 2, |inner| {
        let unary = prop_oneof![
            Just(UnaryOp::Neg),
            Just(UnaryOp::Exp),
            Just(UnaryOp::Log),
            Just(UnaryOp::Sin),
            Just(UnaryOp::Cos),
            Just(UnaryOp::Sqrt),
        ];
        let binary = prop_oneof![
            Just(BinaryOp::Add),
            Just(BinaryOp::Sub),
            Just(BinaryOp::Mul),
            Just(BinaryOp::Div),
        ];
        prop_oneof![
            (unary, inner.clone()).prop_map(|(op, e)| Expr::unary(op, e)),
            (binary, inner.clone(), inner.clone()).prop_map(|(op, l, r)| Expr::binary(op, l, r)),
            (inner, -4i32..6).prop_map(|(e, n)| Expr::pow(e, n)),
        ]
    })
}

proptest! {
    #[test]
    fn printed_trees_parse_back(e in arb_expr()) {
        let printed = e.to_string();
        let back: Expr = printed.parse().map_err(|err| TestCaseError::fail(format!("{printed}: {err}")))?;
        prop_assert_eq!(back, e);
    }

    #[test]
    fn interval_ops_contain_pointwise_results(
        a in -1e3f64..1e3, wa in 0.0f64..10.0, b in -1e3f64..1e3, wb in 0.0f64..10.0,
        s in 0.0f64..=1.0, t in 0.0f64..=1.0,
    ) {
        let x = Interval::new(a, a + wa).unwrap();
        let y = Interval::new(b, b + wb).unwrap();
        let u = a + s * wa;
        let v = b + t * wb;
        prop_assert!(x.try_add(y).unwrap().contains(u + v));
        prop_assert!(x.try_sub(y).unwrap().contains(u - v));
        prop_assert!(x.try_mul(y).unwrap().contains(u * v));
        if !y.contains_zero() {
            prop_assert!(x.try_div(y).unwrap().contains(u / v));
        }
        prop_assert!(x.try_sqr().unwrap().contains(u * u));
        prop_assert!(x.sin().contains(u.sin()));
        prop_assert!(x.cos().contains(u.cos()));
        if a + wa < 500.0 {
            prop_assert!(x.try_exp().unwrap().contains(u.exp()));
        }
        if a > 0.0 {
            prop_assert!(x.try_ln().unwrap().contains(u.ln()));
            prop_assert!(x.try_sqrt().unwrap().contains(u.sqrt()));
        }
        for n in [-3, -1, 2, 3, 5] {
            if let Ok(p) = x.try_powi(n) {
                let pv = u.powi(n);
                if pv.is_finite() {
                    prop_assert!(p.contains(pv), "{x}^{n} = {p} misses {pv}");
                }
            }
        }
    }
}
