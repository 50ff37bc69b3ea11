//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};

use common::{cli_invocations, iv, jet_fd_worst, run_bin};
use ncquad::verification::{
    check_lemma1_identity, check_lemma2_identity, check_lemma2_moment, convergence_order, estimate_error_constant,
    exactness_degree, locate_xi, reconstruct_newton,
};
use ncquad::{apply_rule, parse, rule_spec, Elementary, Rational, RuleId};
use num_traits::ToPrimitive;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn constant_pinning() -> Outcome {
    let f = parse("x^4").unwrap();
    let mut worst = 0.0f64;
    for id in RuleId::ALL {
        let exact = (rule_spec(id).error_coefficient * Rational::from_integer(24)).to_f64().unwrap();
        let err = 0.2 - apply_rule(id, &f, iv(0.0, 1.0)).unwrap().estimate;
        worst = worst.max(((err - exact) / exact).abs());
    }
    check(worst <= 1e-14, format!("worst relative deviation {worst:.1e} (limit 1e-14)"))
}

fn exactness() -> Outcome {
    let mut degrees = Vec::new();
    for id in RuleId::ALL {
        // explicit loop alongside the library routine
        let mut degree = -1;
        'deg: for k in 0..=6 {
            let f = parse(&format!("x^{k}")).unwrap();
            for (a, b) in [(0.0f64, 1.0f64), (-1.0, 2.0)] {
                let exact = (b.powi(k + 1) - a.powi(k + 1)) / (k + 1) as f64;
                let got = apply_rule(id, &f, iv(a, b)).unwrap().estimate;
                if (got - exact).abs() > 1e-13 * exact.abs().max(1.0) {
                    break 'deg;
                }
            }
            degree = k;
        }
        degrees.push((degree, exactness_degree(id)));
    }
    check(degrees.iter().all(|d| *d == (3, 3)), format!("degrees (loop, library) {degrees:?}"))
}

fn kernel_identities() -> Outcome {
    let mut worst = 0.0f64;
    let mut worst_moment = 0.0f64;
    for text in ["x^5", "x^6", "exp(x)", "sin(x)"] {
        let f = parse(text).unwrap();
        for (a, b) in [(0.0, 1.0), (1.0, 3.0)] {
            worst = worst.max(check_lemma1_identity(&f, iv(a, b)).unwrap().residual);
            worst = worst.max(check_lemma2_identity(&f, iv(a, b)).unwrap().residual);
            worst_moment = worst_moment.max(check_lemma2_moment(iv(a, b)).unwrap().relative_deviation);
        }
    }
    check(
        worst < 1e-10 && worst_moment <= 1e-13,
        format!("worst residual {worst:.1e} (limit 1e-10), moment deviation {worst_moment:.1e} (limit 1e-13)"),
    )
}

fn reconstruction() -> Outcome {
    let r = reconstruct_newton();
    let q = |n, d| Rational::new(n, d);
    let weights_ok = r.weights == [q(1, 8), q(3, 8), q(0, 1), q(3, 8), q(1, 8)] && r.matches_rule_spec();
    let coeff_ok = r.combined_coefficient == q(1, 1620);
    check(
        weights_ok && coeff_ok,
        format!("weights {:?}, combined coefficient {}", r.weights.map(|w| w.to_string()), r.combined_coefficient),
    )
}

fn constant_recovery() -> Outcome {
    let f = parse("exp(x)").unwrap();
    let mut worst = 0.0f64;
    for id in RuleId::ALL {
        worst = worst.max(estimate_error_constant(id, &f, iv(0.0, 1.0), 8).unwrap().relative_deviation);
    }
    check(worst < 0.01, format!("worst relative deviation {worst:.2e} (limit 1e-2)"))
}

fn convergence() -> Outcome {
    let f = parse("sin(x)").unwrap();
    let mut slopes = Vec::new();
    for id in [RuleId::Simpson, RuleId::Newton38] {
        slopes.push(convergence_order(id, &f, iv(0.0, std::f64::consts::PI), &[4, 8, 16, 32, 64]).unwrap().slope);
    }
    check(
        slopes.iter().all(|s| (s - 4.0).abs() <= 0.05),
        format!("slopes Simpson {:.4}, Newton38 {:.4} (4 ± 0.05)", slopes[0], slopes[1]),
    )
}

fn mean_value_point() -> Outcome {
    let f = parse("x^5").unwrap();
    let mut notes = Vec::new();
    let mut ok = true;
    for id in [RuleId::Simpson, RuleId::Newton38, RuleId::MidpointCorrected] {
        let c = locate_xi(id, &f, iv(0.0, 1.0)).unwrap();
        ok &= (c.xi - 0.5).abs() <= 1e-9 && (0.0..=1.0).contains(&c.xi);
        if c.bracket.is_some() {
            ok &= c.residual < 1e-12 * c.error.abs();
        }
        notes.push(format!("{} ξ={:.12} residual {:.1e}", id.name(), c.xi, c.residual));
    }
    check(ok, notes.join("; "))
}

fn adaptive_pi() -> Outcome {
    let r = ncquad::adaptive_integrate(&parse("4/(1+x^2)").unwrap(), iv(0.0, 1.0), 1e-10, 40).unwrap();
    let err = (r.value - std::f64::consts::PI).abs();
    check(err < 1e-10 && r.panels < 200, format!("error {err:.1e}, {} panels", r.panels))
}

fn jet_finite_differences() -> Outcome {
    let mut worst = (0.0, "");
    for (i, func) in Elementary::ALL.into_iter().enumerate() {
        let (e, _, _) = jet_fd_worst(func, 100, 0xacce + i as u64);
        if e > worst.0 {
            worst = (e, func.name());
        }
    }
    check(worst.0 < 1e-6, format!("worst relative error {:.1e} ({}), limit 1e-6", worst.0, worst.1))
}

fn cli_determinism() -> Outcome {
    let mut runs = 0;
    for args in cli_invocations() {
        for format in ["json", "csv"] {
            let mut argv = vec!["--format", format];
            argv.extend_from_slice(&args);
            let first = run_bin(&argv);
            if first.code != 0 {
                return Err(format!("{argv:?} exited {}: {}", first.code, first.stderr));
            }
            for _ in 0..2 {
                runs += 1;
                if run_bin(&argv).stdout != first.stdout {
                    return Err(format!("{argv:?} differed between runs"));
                }
            }
        }
    }
    Ok(format!("{runs} repeat runs over 6 subcommands and 2 formats matched byte for byte"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("constant pinning on x^4", constant_pinning),
        ("exactness degree 3", exactness),
        ("kernel identities and quartic moment", kernel_identities),
        ("3/8 rule reconstruction", reconstruction),
        ("error constants recovered from exp", constant_recovery),
        ("fourth-order convergence on sin", convergence),
        ("mean-value point for x^5", mean_value_point),
        ("adaptive pi", adaptive_pi),
        ("jet derivatives vs finite differences", jet_finite_differences),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", n + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
