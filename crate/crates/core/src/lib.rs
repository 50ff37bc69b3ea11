// Negated comparisons are how the input checks reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adaptive;
pub mod error;
pub mod expr;
pub mod integrand;
pub mod jet;
pub mod rules;
pub mod sum;
pub mod verification;
pub mod cli;

pub use adaptive::{adaptive_integrate, AdaptiveResult};
pub use error::{Error, Result};
pub use expr::{parse, Expr, ParseError};
pub use integrand::{Integrand, JetFn, JetIntegrand, ValueFn};
pub use jet::{Elementary, Jet4};
pub use rules::{apply_rule, composite_rule, error_bound, rule_spec, Interval, QuadratureOutcome, Rational, RuleId, RuleSpec};
