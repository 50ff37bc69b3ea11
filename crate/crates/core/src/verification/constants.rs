use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::integrand::JetFn;
use crate::integrand::JetIntegrand;
use crate::rules::{apply_rule, composite_rule, rule_spec, Interval, Rational, RuleId};

use super::oracle::reference_integral;
use super::CANCELLATION_FLOOR;

/// Largest `d ≤ 6` such that the rule integrates every `x^k`, `k ≤ d`, to
/// `1e-13` relative on `[0, 1]` and `[−1, 2]`. Returns −1 if even constants fail.
pub fn exactness_degree(id: RuleId) -> i32 {
    let intervals = [(0.0, 1.0), (-1.0, 2.0)];
    for d in 0..=6i32 {
        let monomial = JetFn(move |x: crate::jet::Jet4| x.powi(d as i64));
        for (a, b) in intervals {
            let iv = Interval::new(a, b).expect("static interval");
            let exact = (f64::powi(b, d + 1) - f64::powi(a, d + 1)) / (d + 1) as f64;
            let ok = match apply_rule(id, &monomial, iv) {
                Ok(o) => (o.estimate - exact).abs() <= 1e-13 * exact.abs().max(1.0),
                Err(_) => false,
            };
            if !ok {
                return d - 1;
            }
        }
    }
    6
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantFit {
    pub rule: RuleId,
    pub fitted_c: f64,
    pub paper_c: Rational,
    pub relative_deviation: f64,
    pub levels_used: usize,
}

/// Recovers `c_R` from `(∫ − R) / (h⁵ f⁗(m))` on intervals of width `h`
/// centred on the base midpoint `m`, halving `h` each level.
///
/// Stops once `|∫ − R|` drops below the cancellation floor; the last level
/// above it supplies `fitted_c`.
pub fn estimate_error_constant<F: JetIntegrand + ?Sized>(
    id: RuleId,
    f: &F,
    base: Interval,
    levels: usize,
) -> Result<ConstantFit> {
    if levels < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 levels, got {levels}")));
    }
    let m = base.midpoint();
    let jm = f.jet(m).map_err(|e| e.at(m))?;
    if !(jm.d4.abs() > 1e-12 * jm.d0.abs().max(1.0)) {
        return Err(Error::IllConditioned(format!(
            "fourth derivative at the midpoint {m} is {}",
            jm.d4
        )));
    }
    let paper_c = rule_spec(id).error_coefficient;
    let mut fits = Vec::with_capacity(levels);
    for level in 0..levels {
        let iv = if level == 0 {
            base
        } else {
            let half = base.width() / 2f64.powi(level as i32 + 1);
            Interval::new(m - half, m + half)?
        };
        let exact = reference_integral(f, iv)?;
        let err = exact - apply_rule(id, f, iv)?.estimate;
        if err.abs() < CANCELLATION_FLOOR * exact.abs() {
            break;
        }
        fits.push(err / (iv.width().powi(5) * jm.d4));
    }
    if fits.len() < 2 {
        return Err(Error::InsufficientPrecision(format!(
            "only {} level(s) above the cancellation floor",
            fits.len()
        )));
    }
    let fitted_c = *fits.last().expect("at least two fits");
    let c = paper_c.to_f64().expect("small rational");
    Ok(ConstantFit {
        rule: id,
        fitted_c,
        paper_c,
        relative_deviation: ((fitted_c - c) / c).abs(),
        levels_used: fits.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rule: RuleId,
    /// Panel counts whose errors entered the fit.
    pub panel_counts: Vec<usize>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `log|E|` against `log h`.
    pub slope: f64,
}

pub fn convergence_order<F: JetIntegrand + ?Sized>(
    id: RuleId,
    f: &F,
    iv: Interval,
    panel_counts: &[usize],
) -> Result<ConvergenceReport> {
    if panel_counts.len() < 3 {
        return Err(Error::InvalidInput("need at least 3 panel counts".into()));
    }
    if panel_counts[0] == 0 || panel_counts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("panel counts must be positive and strictly increasing".into()));
    }
    let exact = reference_integral(f, iv)?;
    let floor = CANCELLATION_FLOOR * exact.abs();
    let mut kept = Vec::new();
    let mut errors = Vec::new();
    for &n in panel_counts {
        let e = (exact - composite_rule(id, f, iv, n)?.estimate).abs();
        if e >= floor && e > 0.0 {
            kept.push(n);
            errors.push(e);
        }
    }
    if kept.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "{} of {} errors above the rounding floor",
            kept.len(),
            panel_counts.len()
        )));
    }
    let xs: Vec<f64> = kept.iter().map(|&n| (iv.width() / n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    Ok(ConvergenceReport { rule: id, panel_counts: kept, errors, slope: least_squares_slope(&xs, &ys) })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (sxy, sxx) = xs.iter().zip(ys).fold((0.0, 0.0), |(sxy, sxx), (x, y)| {
        (sxy + (x - mx) * (y - my), sxx + (x - mx) * (x - mx))
    });
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn degree_is_three_everywhere() {
        for id in RuleId::ALL {
            assert_eq!(exactness_degree(id), 3, "{id}");
        }
    }

    #[test]
    fn quartic_pins_constant() {
        let x4 = parse("x^4").unwrap();
        for id in RuleId::ALL {
            for (a, b, levels) in [(0.0, 1.0, 2), (-1.0, 1.0, 6), (-1.0, 2.0, 3), (0.0, 2.0, 3)] {
                let fit = estimate_error_constant(id, &x4, iv(a, b), levels).unwrap();
                assert!(fit.relative_deviation <= 1e-12, "{id} [{a},{b}] x{levels}: {fit:?}");
            }
        }
    }

    #[test]
    fn exp_recovers_constants_within_one_percent() {
        let f = parse("exp(x)").unwrap();
        for id in RuleId::ALL {
            let fit = estimate_error_constant(id, &f, iv(0.0, 1.0), 8).unwrap();
            assert!(fit.relative_deviation < 0.01, "{fit:?}");
            assert_eq!(fit.fitted_c.signum(), fit.paper_c.to_f64().unwrap().signum());
        }
    }

    #[test]
    fn constant_fit_errors() {
        let x4 = parse("x^4").unwrap();
        assert!(matches!(
            estimate_error_constant(RuleId::Simpson, &x4, iv(0.0, 1.0), 1),
            Err(Error::InvalidInput(_))
        ));
        let x5 = parse("x^5").unwrap();
        assert!(matches!(
            estimate_error_constant(RuleId::Simpson, &x5, iv(-1.0, 1.0), 4),
            Err(Error::IllConditioned(_))
        ));
        let cubic = parse("x^3").unwrap();
        assert!(estimate_error_constant(RuleId::Simpson, &cubic, iv(0.0, 1.0), 4).is_err());
    }

    #[test]
    fn fourth_order_slopes() {
        let f = parse("sin(x)").unwrap();
        let pi = iv(0.0, std::f64::consts::PI);
        for id in [RuleId::Newton38, RuleId::Simpson] {
            let r = convergence_order(id, &f, pi, &[4, 8, 16, 32, 64]).unwrap();
            assert!((r.slope - 4.0).abs() <= 0.05, "{r:?}");
        }
    }

    #[test]
    fn exact_rule_gives_degenerate_fit() {
        let f = parse("x^3").unwrap();
        let r = convergence_order(RuleId::Newton38, &f, iv(0.0, 1.0), &[2, 4, 8]);
        assert!(matches!(r, Err(Error::DegenerateFit(_))), "{r:?}");
        assert!(convergence_order(RuleId::Newton38, &f, iv(0.0, 1.0), &[2, 4]).is_err());
        assert!(convergence_order(RuleId::Newton38, &f, iv(0.0, 1.0), &[4, 2, 8]).is_err());
    }

    #[test]
    fn slope_of_exact_power_law() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 4.0 * x - 2.0).collect();
        assert!((least_squares_slope(&xs, &ys) - 4.0).abs() < 1e-15);
    }
}
