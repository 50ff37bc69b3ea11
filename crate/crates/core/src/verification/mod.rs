//! Numerical checks of the rule constants and of the integration-by-parts
//! identities behind them.
//!
//! Everything here measures against [`reference_integral`], a composite
//! 3/8 rule refined by doubling and finished with one Richardson step.

mod constants;
mod identities;
mod oracle;
mod reconstruct;
mod xi;

pub use constants::{convergence_order, estimate_error_constant, exactness_degree, ConstantFit, ConvergenceReport};
pub use identities::{
    check_lemma1_identity, check_lemma2_identity, check_lemma2_moment, check_middle_third, IdentityCheck,
    MiddleThirdCheck, MomentCheck, MOMENT_TOLERANCE,
};
pub use oracle::{reference_integral, MAX_REFERENCE_PANELS};
pub use reconstruct::{reconstruct_newton, NewtonReconstruction, Relation};
pub use xi::{locate_xi, locate_xi_with, XiCertificate, XiSearch};

/// Errors smaller than this multiple of `eps · |∫|` are treated as rounding noise.
pub const CANCELLATION_FLOOR: f64 = 1e3 * f64::EPSILON;
