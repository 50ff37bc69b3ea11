mod common;

use common::ulps;
use ncquad::expr::{BinOp, ParseErrorKind};
use ncquad::{parse, Elementary, Expr};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        3 => Just(Expr::Variable),
        2 => (0.0f64..10.0).prop_map(Expr::Number),
        1 => (0u8..20).prop_map(|n| Expr::Number(n as f64)),
    ]
}

fn op() -> impl Strategy<Value = BinOp> {
    prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div), Just(BinOp::Pow)]
}

/// Random trees of depth at most 5.
fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (prop::sample::select(Elementary::ALL.to_vec()), inner.clone())
                .prop_map(|(f, e)| Expr::Call(f, Box::new(e))),
            (op(), inner.clone(), inner).prop_map(|(o, l, r)| Expr::Binary(o, Box::new(l), Box::new(r))),
        ]
    })
}

fn same_value(a: f64, b: f64) -> bool {
    (a.is_nan() && b.is_nan()) || ulps(a, b) <= 4
}

proptest! {
    #![proptest_config(common::prop_config(1000))]

    #[test]
    fn printing_round_trips(e in expr()) {
        let text = e.to_string();
        let back = parse(&text);
        prop_assert_eq!(back.as_ref(), Ok(&e), "printed as {}", text);
    }

    #[test]
    fn jet_value_agrees_with_plain_evaluation(e in expr(), x in 0.05f64..3.0) {
        match (e.eval_value(x), e.eval_jet4(x)) {
            (Ok(v), Ok(j)) => prop_assert!(same_value(v, j.d0), "{} at {}: {} vs {}", e, x, v, j.d0),
            (Err(_), Err(_)) => {}
            (v, j) => prop_assert!(false, "{} at {}: {:?} vs {:?}", e, x, v, j),
        }
    }

    #[test]
    fn parser_is_total_on_arbitrary_text(s in ".{0,40}") {
        if let Err(err) = parse(&s) {
            prop_assert!(err.offset <= s.len());
        }
    }

    #[test]
    fn parser_is_total_on_expression_like_text(s in "[x0-9.eE+*/^() \\-sincoexplgqrtah]{0,30}") {
        if let Err(err) = parse(&s) {
            prop_assert!(err.offset <= s.len());
        }
    }
}

#[test]
fn two_hundred_fixed_pairs() {
    // deterministic companion to the property above: 200 (expression, x) pairs
    use proptest::strategy::ValueTree;
    use proptest::test_runner::{RngAlgorithm, TestRng, TestRunner};
    let mut runner = TestRunner::new_with_rng(
        common::prop_config(200),
        TestRng::from_seed(RngAlgorithm::ChaCha, &[7; 32]),
    );
    let strategy = (expr(), 0.05f64..3.0);
    let mut checked = 0;
    for _ in 0..200 {
        let (e, x) = strategy.new_tree(&mut runner).unwrap().current();
        if let (Ok(v), Ok(j)) = (e.eval_value(x), e.eval_jet4(x)) {
            assert!(same_value(v, j.d0), "{e} at {x}");
            checked += 1;
        }
    }
    assert!(checked > 100, "only {checked} pairs evaluated");
}

#[test]
fn error_positions() {
    let cases: [(&str, usize); 5] = [("sin(x", 5), ("", 0), ("x +", 3), ("2 * y", 4), ("foo(x)", 0)];
    for (text, offset) in cases {
        let err = parse(text).unwrap_err();
        assert_eq!(err.offset, offset, "{text}: {err}");
    }
    assert_eq!(parse("").unwrap_err().kind, ParseErrorKind::EmptyInput);
    assert!(matches!(parse("foo(x)").unwrap_err().kind, ParseErrorKind::UnknownFunction(_)));
    assert!(matches!(parse("(x").unwrap_err().kind, ParseErrorKind::UnbalancedParenthesis));
}

#[test]
fn precedence_and_associativity() {
    let at = |s: &str, x: f64| parse(s).unwrap().eval_value(x).unwrap();
    assert_eq!(at("2^3^2", 0.0), 512.0);
    assert_eq!(at("-x^2", 3.0), -9.0);
    assert_eq!(at("8/4/2", 0.0), 1.0);
    assert_eq!(at("1 - 2 - 3", 0.0), -4.0);
    assert_eq!(at("2*pi", 0.0), 2.0 * std::f64::consts::PI);
}
