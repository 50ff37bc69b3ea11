//! Evaluator traits shared by the rules, the oracle and the verification code.

use crate::error::Result;
use crate::expr::Expr;
use crate::jet::Jet4;

/// Something that can be sampled at a point.
pub trait Integrand {
    fn value(&self, x: f64) -> Result<f64>;
}

/// An integrand that also yields derivatives up to fourth order.
pub trait JetIntegrand: Integrand {
    fn jet(&self, x: f64) -> Result<Jet4>;
}

impl Integrand for Expr {
    fn value(&self, x: f64) -> Result<f64> {
        self.eval_value(x)
    }
}

impl JetIntegrand for Expr {
    fn jet(&self, x: f64) -> Result<Jet4> {
        self.eval_jet4(x)
    }
}

impl<T: Integrand + ?Sized> Integrand for &T {
    fn value(&self, x: f64) -> Result<f64> {
        (**self).value(x)
    }
}

impl<T: JetIntegrand + ?Sized> JetIntegrand for &T {
    fn jet(&self, x: f64) -> Result<Jet4> {
        (**self).jet(x)
    }
}

/// Value-only integrand backed by a closure.
#[derive(Clone, Copy)]
pub struct ValueFn<F>(pub F);

impl<F: Fn(f64) -> Result<f64>> Integrand for ValueFn<F> {
    fn value(&self, x: f64) -> Result<f64> {
        (self.0)(x)
    }
}

/// Integrand written directly in jet arithmetic; the closure receives the
/// seed jet of `x`.
#[derive(Clone, Copy)]
pub struct JetFn<F>(pub F);

impl<F: Fn(Jet4) -> Result<Jet4>> Integrand for JetFn<F> {
    fn value(&self, x: f64) -> Result<f64> {
        Ok(self.jet(x)?.d0)
    }
}

impl<F: Fn(Jet4) -> Result<Jet4>> JetIntegrand for JetFn<F> {
    fn jet(&self, x: f64) -> Result<Jet4> {
        (self.0)(Jet4::variable(x)?)
    }
}
