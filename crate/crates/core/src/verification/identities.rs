//! Kernel identities obtained by integrating the error kernels by parts.
//!
//! With `m = (a+b)/2`, `w = b − a` and
//! `K(x) = f⁗((a+x)/2) + f⁗((2b+a−x)/2)`:
//!
//! ```text
//! ∫ (x−a)⁴ K(x) dx      = 768 ∫f − 768 w f(m) − 32 w³ f″(m)
//! ∫ (x−a)³(x−b) K(x) dx = 768 ∫f − 96 w [f(a) + 6 f(m) + f(b)] − 8 w³ f″(m)
//! ∫ (x−a)³(x−b) dx      = −w⁵ / 20
//! ```

use crate::error::{Error, Result};
use crate::integrand::{Integrand, JetIntegrand, ValueFn};
use crate::rules::Interval;

use super::oracle::reference_integral;
use super::CANCELLATION_FLOOR;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs − rhs| / max(1, |rhs|)`
    pub residual: f64,
}

impl IdentityCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        IdentityCheck { lhs, rhs, residual: (lhs - rhs).abs() / rhs.abs().max(1.0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentCheck {
    pub value: f64,
    pub expected: f64,
    pub relative_deviation: f64,
}

/// Relative tolerance on the quartic moment.
pub const MOMENT_TOLERANCE: f64 = 1e-13;

/// `∫ weight(x) · K(x) dx` with `K` built from two jet evaluations of `f`.
fn kernel_integral<F, W>(f: &F, iv: Interval, weight: W) -> Result<f64>
where
    F: JetIntegrand + ?Sized,
    W: Fn(f64) -> f64,
{
    let (a, b) = (iv.a(), iv.b());
    let kernel = ValueFn(|x: f64| {
        let left = (a + x) / 2.0;
        let right = (2.0 * b + a - x) / 2.0;
        let k = f.jet(left)?.d4 + f.jet(right)?.d4;
        Ok(weight(x) * k)
    });
    reference_integral(&kernel, iv)
}

fn value_at<F: Integrand + ?Sized>(f: &F, x: f64) -> Result<f64> {
    f.value(x).map_err(|e| e.at(x))
}

pub fn check_lemma1_identity<F: JetIntegrand + ?Sized>(f: &F, iv: Interval) -> Result<IdentityCheck> {
    let a = iv.a();
    let lhs = kernel_integral(f, iv, |x| (x - a).powi(4))?;
    let w = iv.width();
    let m = iv.midpoint();
    let jm = f.jet(m).map_err(|e| e.at(m))?;
    let integral = reference_integral(f, iv)?;
    let rhs = 768.0 * integral - 768.0 * w * jm.d0 - 32.0 * w.powi(3) * jm.d2;
    Ok(IdentityCheck::new(lhs, rhs))
}

/// Also fails with [`Error::MomentMismatch`] if the quartic moment is off.
pub fn check_lemma2_identity<F: JetIntegrand + ?Sized>(f: &F, iv: Interval) -> Result<IdentityCheck> {
    let moment = check_lemma2_moment(iv)?;
    if !(moment.relative_deviation <= MOMENT_TOLERANCE) {
        return Err(Error::MomentMismatch { got: moment.value, expected: moment.expected });
    }
    let (a, b) = (iv.a(), iv.b());
    let lhs = kernel_integral(f, iv, |x| (x - a).powi(3) * (x - b))?;
    let w = iv.width();
    let m = iv.midpoint();
    let jm = f.jet(m).map_err(|e| e.at(m))?;
    let fa = value_at(f, a)?;
    let fb = value_at(f, b)?;
    let integral = reference_integral(f, iv)?;
    let rhs = 768.0 * integral - 96.0 * w * (fa + 6.0 * jm.d0 + fb) - 8.0 * w.powi(3) * jm.d2;
    Ok(IdentityCheck::new(lhs, rhs))
}

/// `∫ (x−a)³(x−b) dx` against `−(b−a)⁵/20`.
pub fn check_lemma2_moment(iv: Interval) -> Result<MomentCheck> {
    let (a, b) = (iv.a(), iv.b());
    let value = reference_integral(&ValueFn(|x: f64| Ok((x - a).powi(3) * (x - b))), iv)?;
    let expected = -iv.width().powi(5) / 20.0;
    Ok(MomentCheck { value, expected, relative_deviation: ((value - expected) / expected).abs() })
}

/// The corrected midpoint rule applied to the middle third of `iv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiddleThirdCheck {
    /// `(∫ − R) / ((w/3)⁵ / 1920)` on the middle third: the value f⁗(ξ) must take.
    pub implied_f4: f64,
    pub min_f4: f64,
    pub max_f4: f64,
    pub holds: bool,
}

/// Checks that the fourth derivative value implied by the middle-third
/// midpoint-corrected error lies within the range of f⁗ there (grid of 1025 points).
pub fn check_middle_third<F: JetIntegrand + ?Sized>(f: &F, iv: Interval) -> Result<MiddleThirdCheck> {
    let (a, b) = (iv.a(), iv.b());
    let third = Interval::new((2.0 * a + b) / 3.0, (a + 2.0 * b) / 3.0)?;
    let integral = reference_integral(f, third)?;
    let m = third.midpoint();
    let jm = f.jet(m).map_err(|e| e.at(m))?;
    let h = third.width();
    let rule = h * jm.d0 + h.powi(3) / 24.0 * jm.d2;
    let implied_f4 = (integral - rule) / (h.powi(5) / 1920.0);
    const GRID: usize = 1024;
    let mut min_f4 = f64::INFINITY;
    let mut max_f4 = f64::NEG_INFINITY;
    for i in 0..=GRID {
        let x = ((GRID - i) as f64 * third.a() + i as f64 * third.b()) / GRID as f64;
        let d4 = f.jet(x).map_err(|e| e.at(x))?.d4;
        min_f4 = min_f4.min(d4);
        max_f4 = max_f4.max(d4);
    }
    // a grid misses the extremes by O(h²); the implied value carries the
    // rounding noise of ∫ − R amplified by 1920 / h⁵
    let noise = CANCELLATION_FLOOR * integral.abs().max(rule.abs()) / (h.powi(5) / 1920.0);
    let slack = 1e-6 * min_f4.abs().max(max_f4.abs()) + noise;
    let holds = implied_f4 >= min_f4 - slack && implied_f4 <= max_f4 + slack;
    Ok(MiddleThirdCheck { implied_f4, min_f4, max_f4, holds })
}
