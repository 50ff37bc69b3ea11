//! Adaptive bisection driven by the Simpson / 3/8 pair.
//!
//! Both rules share the form `E = c (b−a)⁵ f⁗(ξ)`. If f⁗ is roughly
//! constant on a panel, `N − S = E_S − E_N = (c_S − c_N) w⁵ f⁗`, so
//! `|E_N| ≈ |c_N| / |c_S − c_N| · |N − S| = 0.8 |N − S|`.

use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::integrand::Integrand;
use crate::rules::{rule_spec, Interval, Rational, RuleId};
use crate::sum::pairwise_sum;
use crate::verification::CANCELLATION_FLOOR;

pub const DEFAULT_MAX_DEPTH: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveResult {
    pub value: f64,
    /// Sum of the accepted local error estimates.
    pub error_estimate: f64,
    pub panels: usize,
    /// Some panel hit the depth limit before meeting its tolerance.
    pub max_depth_reached: bool,
    /// Some panel was accepted because `|N − S|` sank into rounding noise
    /// before meeting its tolerance.
    pub rounding_limited: bool,
    pub function_evaluations: usize,
}

/// `|c_N| / |c_S − c_N|` from the stored error constants.
pub fn newton_error_factor() -> Rational {
    let cs = rule_spec(RuleId::Simpson).error_coefficient;
    let cn = rule_spec(RuleId::Newton38).error_coefficient;
    cn.abs() / (cs - cn).abs()
}

struct Search<'a, F: ?Sized> {
    f: &'a F,
    factor: f64,
    /// Tolerance per unit width.
    density: f64,
    max_depth: usize,
    values: Vec<f64>,
    estimates: Vec<f64>,
    depth_hit: bool,
    noise_hit: bool,
    evals: usize,
}

impl<F: Integrand + ?Sized> Search<'_, F> {
    fn eval(&mut self, x: f64) -> Result<f64> {
        self.evals += 1;
        self.f.value(x).map_err(|e| e.at(x))
    }

    fn panel(&mut self, lo: f64, hi: f64, f_lo: f64, f_mid: f64, f_hi: f64, depth: usize) -> Result<()> {
        let w = hi - lo;
        let t1 = (2.0 * lo + hi) / 3.0;
        let t2 = (lo + 2.0 * hi) / 3.0;
        let f1 = self.eval(t1)?;
        let f2 = self.eval(t2)?;
        let ends = f_lo + f_hi;
        let simpson = w * (ends + 4.0 * f_mid) / 6.0;
        let newton = w * (ends + 3.0 * (f1 + f2)) / 8.0;
        let diff = (newton - simpson).abs();
        let local = self.factor * diff;

        let within_tol = local <= self.density * w;
        let at_depth = depth >= self.max_depth;
        let in_noise = diff <= CANCELLATION_FLOOR * newton.abs().max(simpson.abs());
        if within_tol || at_depth || in_noise {
            if !within_tol {
                if at_depth {
                    self.depth_hit = true;
                } else {
                    self.noise_hit = true;
                }
            }
            self.values.push(newton);
            self.estimates.push(local);
            return Ok(());
        }

        let mid = (lo + hi) / 2.0;
        let f_q1 = self.eval((lo + mid) / 2.0)?;
        let f_q3 = self.eval((mid + hi) / 2.0)?;
        self.panel(lo, mid, f_lo, f_q1, f_mid, depth + 1)?;
        self.panel(mid, hi, f_mid, f_q3, f_hi, depth + 1)
    }
}

/// Integrates `f` over `iv` to absolute tolerance `tol`, distributed over
/// panels in proportion to their width.
pub fn adaptive_integrate<F: Integrand + ?Sized>(
    f: &F,
    iv: Interval,
    tol: f64,
    max_depth: usize,
) -> Result<AdaptiveResult> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidInput(format!("tolerance must be positive and finite, got {tol}")));
    }
    if max_depth < 1 {
        return Err(Error::InvalidInput("max depth must be at least 1".into()));
    }
    let mut s = Search {
        f,
        factor: newton_error_factor().to_f64().expect("small rational"),
        density: tol / iv.width(),
        max_depth,
        values: Vec::new(),
        estimates: Vec::new(),
        depth_hit: false,
        noise_hit: false,
        evals: 0,
    };
    let (a, b) = (iv.a(), iv.b());
    let f_a = s.eval(a)?;
    let f_m = s.eval(iv.midpoint())?;
    let f_b = s.eval(b)?;
    s.panel(a, b, f_a, f_m, f_b, 0)?;
    Ok(AdaptiveResult {
        value: pairwise_sum(&s.values),
        error_estimate: pairwise_sum(&s.estimates),
        panels: s.values.len(),
        max_depth_reached: s.depth_hit,
        rounding_limited: s.noise_hit,
        function_evaluations: s.evals,
    })
}
