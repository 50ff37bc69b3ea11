//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use ncquad::{Elementary, Interval};

pub fn iv(a: f64, b: f64) -> Interval {
    Interval::new(a, b).expect("valid interval")
}

/// Sampling range for finite-difference checks, kept clear of poles and
/// branch points by at least the widest stencil.
pub fn fd_range(func: Elementary) -> (f64, f64) {
    match func {
        Elementary::Log | Elementary::Sqrt => (0.5, 3.0),
        Elementary::Tan => (-1.0, 1.0),
        _ => (-2.0, 2.0),
    }
}

// Central stencils with second-order truncation error, applied at step h.
fn central(f: &dyn Fn(f64) -> f64, x: f64, h: f64, order: usize) -> f64 {
    let p1 = f(x + h);
    let m1 = f(x - h);
    match order {
        1 => (p1 - m1) / (2.0 * h),
        2 => (p1 - 2.0 * f(x) + m1) / (h * h),
        3 => (f(x + 2.0 * h) - 2.0 * p1 + 2.0 * m1 - f(x - 2.0 * h)) / (2.0 * h.powi(3)),
        4 => (f(x + 2.0 * h) - 4.0 * p1 + 6.0 * f(x) - 4.0 * m1 + f(x - 2.0 * h)) / h.powi(4),
        _ => panic!("order {order} not supported"),
    }
}

/// Central difference of order 1 to 4, Richardson-extrapolated over the
/// steps `h, h/2, h/4, h/8` (truncation error O(h⁸)).
///
/// A plain stencil cannot reach 1e-6 for the fourth derivative: at the
/// optimal step its rounding and truncation errors balance near eps^(1/3).
pub fn richardson_derivative(f: &dyn Fn(f64) -> f64, x: f64, order: usize) -> f64 {
    let mut row: Vec<f64> = (0..4).map(|i| central(f, x, 0.08 / 2f64.powi(i), order)).collect();
    let mut factor = 4.0;
    while row.len() > 1 {
        row = row.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
        factor *= 4.0;
    }
    row[0]
}

/// `|got − want| / max(1, |want|)`
pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1.0)
}

/// Worst relative disagreement between the jet of `func` and finite
/// differences of its value over `points` seeded random points.
pub fn jet_fd_worst(func: Elementary, points: usize, seed: u64) -> (f64, f64, usize) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let (lo, hi) = fd_range(func);
    let value = |x: f64| func.eval(x).expect("in domain");
    let mut worst = (0.0, f64::NAN, 0);
    for _ in 0..points {
        let x: f64 = rng.gen_range(lo..hi);
        let jet = ncquad::Jet4::variable(x).unwrap().apply(func).unwrap();
        for k in 1..=4 {
            let e = rel_err(richardson_derivative(&value, x, k), jet.derivative(k));
            if e > worst.0 {
                worst = (e, x, k);
            }
        }
    }
    worst
}

/// Units in the last place between two doubles of the same sign.
pub fn ulps(a: f64, b: f64) -> u64 {
    if a == b {
        return 0;
    }
    if a.is_sign_negative() != b.is_sign_negative() {
        return u64::MAX;
    }
    let (x, y) = (a.abs().to_bits(), b.abs().to_bits());
    x.max(y) - x.min(y)
}

/// Property-test settings with `cases` cases and no regression files.
pub fn prop_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config { cases, failure_persistence: None, ..Default::default() }
}

/// One invocation of every subcommand, as argument lists after the program name.
pub fn cli_invocations() -> Vec<Vec<&'static str>> {
    vec![
        vec!["integrate", "--expr", "x^2 + 1", "--a", "0", "--b", "1", "--rule", "blend161", "--panels", "6"],
        vec!["adaptive", "--expr", "4/(1+x^2)", "--a", "0", "--b", "1", "--tol", "1e-10"],
        vec!["convergence", "--expr", "sin(x)", "--a", "0", "--b", "3.141592653589793", "--rule", "newton38", "--panels", "4,8,16,32"],
        vec!["constants", "--rule", "midpoint-corrected", "--expr", "exp(x)", "--levels", "8"],
        vec!["xi", "--expr", "x^5", "--a", "0", "--b", "1", "--rule", "simpson"],
        vec!["verify", "--expr", "exp(x)", "--a", "1", "--b", "3"],
    ]
}

pub struct Run {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: String,
}

/// Runs the compiled `ncquad` binary.
pub fn run_bin(args: &[&str]) -> Run {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_ncquad"))
        .args(args)
        .output()
        .expect("spawn ncquad");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: out.stdout,
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}
