mod common;

use common::iv;
use ncquad::verification::{
    check_lemma1_identity, check_lemma2_identity, check_lemma2_moment, check_middle_third, convergence_order,
    estimate_error_constant, exactness_degree, locate_xi, reconstruct_newton, reference_integral, MOMENT_TOLERANCE,
};
use ncquad::{parse, Error, Rational, RuleId};
use proptest::prelude::*;

const CORPUS: [&str; 4] = ["x^5", "x^6", "exp(x)", "sin(x)"];
const INTERVALS: [(f64, f64); 2] = [(0.0, 1.0), (1.0, 3.0)];

#[test]
fn kernel_identities_hold_on_the_corpus() {
    for text in CORPUS {
        let f = parse(text).unwrap();
        for (a, b) in INTERVALS {
            let one = check_lemma1_identity(&f, iv(a, b)).unwrap();
            let two = check_lemma2_identity(&f, iv(a, b)).unwrap();
            assert!(one.residual < 1e-10, "{text} on [{a},{b}]: {one:?}");
            assert!(two.residual < 1e-10, "{text} on [{a},{b}]: {two:?}");
            assert!(check_middle_third(&f, iv(a, b)).unwrap().holds, "{text} on [{a},{b}]");
        }
    }
}

#[test]
fn quartic_moment() {
    for (a, b) in [(0.0, 1.0), (1.0, 3.0), (-2.0, 0.5)] {
        let m = check_lemma2_moment(iv(a, b)).unwrap();
        assert!(m.relative_deviation <= MOMENT_TOLERANCE, "{m:?}");
    }
}

#[test]
fn reference_integral_matches_closed_forms() {
    let cases = [
        ("exp(x)", 0.0, 1.0, std::f64::consts::E - 1.0),
        ("4/(1+x^2)", 0.0, 1.0, std::f64::consts::PI),
        ("sin(x)", 0.0, std::f64::consts::PI, 2.0),
        ("1/x", 1.0, 2.0, std::f64::consts::LN_2),
    ];
    for (text, a, b, want) in cases {
        let got = reference_integral(&parse(text).unwrap(), iv(a, b)).unwrap();
        assert!((got - want).abs() < 1e-13 * want.abs(), "{text}: {got} vs {want}");
    }
}

#[test]
fn reconstruction_reproduces_the_stored_rule() {
    let r = reconstruct_newton();
    let q = |n, d| Rational::new(n, d);
    assert_eq!(r.weights, [q(1, 8), q(3, 8), q(0, 1), q(3, 8), q(1, 8)]);
    assert_eq!(r.combined_coefficient, q(1, 1620));
    assert_eq!(r.error_coefficient, RuleId::Newton38.spec().error_coefficient);
    assert!(r.matches_rule_spec());
}

#[test]
fn exactness_degrees() {
    for id in RuleId::ALL {
        assert_eq!(exactness_degree(id), 3, "{id:?}");
    }
}

#[test]
fn constant_recovery_on_exp() {
    let f = parse("exp(x)").unwrap();
    for id in RuleId::ALL {
        let fit = estimate_error_constant(id, &f, iv(0.0, 1.0), 8).unwrap();
        assert!(fit.relative_deviation < 0.01, "{fit:?}");
        assert!(fit.levels_used >= 2);
    }
}

#[test]
fn constant_recovery_rejects_vanishing_fourth_derivative() {
    let f = parse("x^3 + 1").unwrap();
    assert!(matches!(
        estimate_error_constant(RuleId::Simpson, &f, iv(0.0, 1.0), 8),
        Err(Error::IllConditioned(_))
    ));
}

#[test]
fn fourth_order_convergence() {
    let f = parse("sin(x)").unwrap();
    for id in RuleId::ALL {
        let r = convergence_order(id, &f, iv(0.0, std::f64::consts::PI), &[4, 8, 16, 32, 64]).unwrap();
        assert!((r.slope - 4.0).abs() < 0.05, "{r:?}");
    }
}

#[test]
fn convergence_rejects_bad_panel_lists() {
    let f = parse("sin(x)").unwrap();
    assert!(convergence_order(RuleId::Simpson, &f, iv(0.0, 1.0), &[4, 8]).is_err());
    assert!(convergence_order(RuleId::Simpson, &f, iv(0.0, 1.0), &[8, 4, 16]).is_err());
    let cubic = parse("x^3").unwrap();
    assert!(matches!(
        convergence_order(RuleId::Simpson, &cubic, iv(0.0, 1.0), &[1, 2, 4]),
        Err(Error::DegenerateFit(_))
    ));
}

#[test]
fn xi_for_quintic_is_the_midpoint() {
    let f = parse("x^5").unwrap();
    for id in [RuleId::Simpson, RuleId::Newton38, RuleId::MidpointCorrected] {
        let c = locate_xi(id, &f, iv(0.0, 1.0)).unwrap();
        assert!((c.xi - 0.5).abs() < 1e-9, "{id:?}: {c:?}");
    }
}

proptest! {
    #![proptest_config(common::prop_config(48))]

    #[test]
    fn xi_certificates_are_sound(
        id in prop::sample::select(RuleId::ALL.to_vec()),
        a in -2.0f64..2.0,
        w in 0.2f64..2.0,
        p in 0.3f64..2.0,
    ) {
        let f = parse(&format!("exp({p:?}*x) + x^5")).unwrap();
        let c = locate_xi(id, &f, iv(a, a + w)).unwrap();
        prop_assert!(c.xi >= a && c.xi <= a + w, "{:?}", c);
        if c.bracket.is_some() {
            prop_assert!(c.residual < 1e-12 * c.error.abs(), "{:?}", c);
        }
    }
}
