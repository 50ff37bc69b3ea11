use crate::error::{Error, Result};
use crate::integrand::Integrand;
use crate::rules::{composite_rule_values, Interval, RuleId};

pub const MAX_REFERENCE_PANELS: usize = 1 << 20;

/// High-accuracy value of `∫f` over `iv` for smooth `f`.
///
/// Doubles the panel count of a composite 3/8 rule until two successive
/// estimates agree to `1e-13 · max(1, |estimate|)`, then applies one
/// order-4 Richardson step.
pub fn reference_integral<F: Integrand + ?Sized>(f: &F, iv: Interval) -> Result<f64> {
    let estimate = |n| composite_rule_values(RuleId::Newton38, f, iv, n).map(|o| o.estimate);
    let mut n = 2;
    let mut prev = estimate(n)?;
    while n < MAX_REFERENCE_PANELS {
        n *= 2;
        let cur = estimate(n)?;
        if !cur.is_finite() {
            return Err(Error::OracleFailure(format!("non-finite estimate with {n} panels on {iv}")));
        }
        if (cur - prev).abs() < 1e-13 * cur.abs().max(1.0) {
            return Ok(cur + (cur - prev) / 15.0);
        }
        prev = cur;
    }
    Err(Error::OracleFailure(format!("no convergence on {iv} after {MAX_REFERENCE_PANELS} panels")))
}
