//! Locating a mean-value point ξ with `E = c_R (b−a)⁵ f⁗(ξ)`.

use num_traits::ToPrimitive;

use crate::error::Result;
use crate::integrand::JetIntegrand;
use crate::rules::{apply_rule, rule_spec, Interval, RuleId};

use super::oracle::reference_integral;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiSearch {
    /// Number of grid cells; the scan visits `grid + 1` points.
    pub grid: usize,
    pub bisect_iters: usize,
}

impl Default for XiSearch {
    fn default() -> Self {
        XiSearch { grid: 1024, bisect_iters: 80 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiCertificate {
    pub xi: f64,
    /// `|E − c_R (b−a)⁵ f⁗(ξ)|`
    pub residual: f64,
    /// Grid cell in which a sign change of `f⁗ − t` was found.
    pub bracket: Option<(f64, f64)>,
    /// `E = ∫f − R(f)`.
    pub error: f64,
    /// Value f⁗ must take at ξ.
    pub target: f64,
}

pub fn locate_xi<F: JetIntegrand + ?Sized>(id: RuleId, f: &F, iv: Interval) -> Result<XiCertificate> {
    locate_xi_with(id, f, iv, XiSearch::default())
}

/// Scans `f⁗ − t` on a uniform grid, refines the leftmost sign change by
/// bisection, and falls back to the grid point closest to the target.
/// A constant f⁗ yields the midpoint.
pub fn locate_xi_with<F: JetIntegrand + ?Sized>(
    id: RuleId,
    f: &F,
    iv: Interval,
    search: XiSearch,
) -> Result<XiCertificate> {
    let grid = search.grid.max(1);
    let scale = rule_spec(id).error_coefficient.to_f64().expect("small rational") * iv.width().powi(5);
    let error = reference_integral(f, iv)? - apply_rule(id, f, iv)?.estimate;
    let target = error / scale;

    let f4 = |x: f64| f.jet(x).map(|j| j.d4).map_err(|e| e.at(x));
    let certify = |xi: f64, bracket| -> Result<XiCertificate> {
        let xi = xi.clamp(iv.a(), iv.b());
        let residual = (error - scale * f4(xi)?).abs();
        Ok(XiCertificate { xi, residual, bracket, error, target })
    };

    let (a, b) = (iv.a(), iv.b());
    let xs: Vec<f64> = (0..=grid)
        .map(|i| ((grid - i) as f64 * a + i as f64 * b) / grid as f64)
        .collect();
    let mut vals = Vec::with_capacity(xs.len());
    for &x in &xs {
        vals.push(f4(x)?);
    }

    if vals.iter().all(|&v| v == vals[0]) {
        return certify(iv.midpoint(), None);
    }

    let g: Vec<f64> = vals.iter().map(|v| v - target).collect();
    for i in 0..grid {
        if g[i] == 0.0 {
            return certify(xs[i], Some((xs[i], xs[i])));
        }
        if g[i].signum() != g[i + 1].signum() && g[i + 1] != 0.0 {
            let xi = bisect(|x| Ok(f4(x)? - target), xs[i], xs[i + 1], g[i], search.bisect_iters)?;
            return certify(xi, Some((xs[i], xs[i + 1])));
        }
    }
    if g[grid] == 0.0 {
        return certify(xs[grid], Some((xs[grid], xs[grid])));
    }

    let best = g
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if v.abs() < g[best].abs() { i } else { best });
    certify(xs[best], None)
}

/// Bisection on a sign-changing bracket; returns the best point visited.
fn bisect(g: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, mut g_lo: f64, iters: usize) -> Result<f64> {
    let mut best = (lo, g_lo.abs());
    for _ in 0..iters {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid)?;
        if gm.abs() < best.1 {
            best = (mid, gm.abs());
        }
        if gm == 0.0 {
            break;
        }
        if gm.signum() == g_lo.signum() {
            lo = mid;
            g_lo = gm;
        } else {
            hi = mid;
        }
    }
    let g_hi = g(hi)?.abs();
    if g_hi < best.1 {
        best = (hi, g_hi);
    }
    Ok(best.0)
}
