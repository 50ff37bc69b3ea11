//! Derives the 3/8 rule by eliminating f″(m) between the corrected rules.
//!
//! Work happens in exact rationals over five nodes of `[a, b]` expressed
//! in unit coordinates: `0, 1/3, 1/2, 2/3, 1`. The middle third is
//! `[1/3, 2/3]`.

use num_traits::{Signed, Zero};

use crate::rules::{rule_spec, Rational, RuleId, RuleSpec};

/// Node positions of the five-point frame, in unit coordinates.
pub fn frame() -> [Rational; 5] {
    [
        Rational::new(0, 1),
        Rational::new(1, 3),
        Rational::new(1, 2),
        Rational::new(2, 3),
        Rational::new(1, 1),
    ]
}

/// A linear relation
///
/// ```text
/// full·∫_a^b f + middle·∫_{(2a+b)/3}^{(a+2b)/3} f
///     = (b−a) Σ values[i]·f(xᵢ) + (b−a)³ second_mid·f″(m) + (b−a)⁵ Σ errors[k]·f⁗(ξₖ)
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub full: Rational,
    pub middle: Rational,
    pub values: [Rational; 5],
    pub second_mid: Rational,
    pub errors: Vec<Rational>,
}

impl Relation {
    /// Instantiates a stored rule on `[lo, hi]` (unit coordinates, either
    /// the whole interval or its middle third).
    pub fn from_rule(spec: &RuleSpec, lo: Rational, hi: Rational) -> Relation {
        let zero = Rational::zero();
        let one = Rational::new(1, 1);
        let s = hi - lo;
        let (full, middle) = if lo == zero && hi == one {
            (one, zero)
        } else if lo == Rational::new(1, 3) && hi == Rational::new(2, 3) {
            (zero, one)
        } else {
            panic!("unsupported sub-interval [{lo}, {hi}]");
        };
        let slot = |alpha: Rational, beta: Rational| {
            let x = alpha * lo + beta * hi;
            frame().iter().position(|p| *p == x).expect("node outside the five-point frame")
        };
        let mut values = [zero; 5];
        for (n, w) in spec.nodes.iter().zip(&spec.weights) {
            values[slot(n.alpha, n.beta)] += *w * s;
        }
        let mut second_mid = zero;
        for c in &spec.corrections {
            assert!(c.order == 2 && slot(c.node.alpha, c.node.beta) == 2, "only f″(m) corrections");
            second_mid += c.coefficient * s * s * s;
        }
        let s5 = s * s * s * s * s;
        Relation { full, middle, values, second_mid, errors: vec![spec.error_coefficient * s5] }
    }

    pub fn scale(&self, k: Rational) -> Relation {
        Relation {
            full: self.full * k,
            middle: self.middle * k,
            values: self.values.map(|v| v * k),
            second_mid: self.second_mid * k,
            errors: self.errors.iter().map(|e| *e * k).collect(),
        }
    }

    pub fn minus(&self, other: &Relation) -> Relation {
        let mut values = self.values;
        for (v, o) in values.iter_mut().zip(other.values) {
            *v -= o;
        }
        let mut errors = self.errors.clone();
        errors.extend(other.errors.iter().map(|e| -*e));
        Relation {
            full: self.full - other.full,
            middle: self.middle - other.middle,
            values,
            second_mid: self.second_mid - other.second_mid,
            errors,
        }
    }

    pub fn error_sum(&self) -> Rational {
        self.errors.iter().fold(Rational::zero(), |s, e| s + e)
    }

    /// All error terms share one sign, so the intermediate value property
    /// merges them into a single `f⁗(ξ)`.
    pub fn errors_mergeable(&self) -> bool {
        self.errors.iter().all(|e| !e.is_negative()) || self.errors.iter().all(|e| !e.is_positive())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonReconstruction {
    /// `4∫ = 27∫_middle + (b−a)/2 [f(a) − 12 f(m) + f(b)] − …`, f″(m) eliminated.
    pub eliminated: Relation,
    /// Final relation with the middle-third integral replaced by Simpson.
    pub combined: Relation,
    /// Per-integral weights over the five-point frame.
    pub weights: [Rational; 5],
    /// `|Σ errors|` of the relation for `4∫`.
    pub combined_coefficient: Rational,
    /// Signed `c_R` for a single integral.
    pub error_coefficient: Rational,
}

impl NewtonReconstruction {
    /// Exact comparison against the stored 3/8 rule.
    pub fn matches_rule_spec(&self) -> bool {
        let spec = rule_spec(RuleId::Newton38);
        let from_spec = Relation::from_rule(&spec, Rational::zero(), Rational::new(1, 1));
        from_spec.values == self.weights
            && spec.error_coefficient == self.error_coefficient
            && self.combined.second_mid.is_zero()
            && self.combined.middle.is_zero()
    }
}

pub fn reconstruct_newton() -> NewtonReconstruction {
    let zero = Rational::zero();
    let one = Rational::new(1, 1);
    let (t1, t2) = (Rational::new(1, 3), Rational::new(2, 3));

    let blend = Relation::from_rule(&rule_spec(RuleId::Blend161), zero, one);
    let mid_third = Relation::from_rule(&rule_spec(RuleId::MidpointCorrected), t1, t2);
    let simpson_third = Relation::from_rule(&rule_spec(RuleId::Simpson), t1, t2);

    // drop f″(m), then normalise to 4∫
    let k = blend.second_mid / mid_third.second_mid;
    let eliminated = blend.minus(&mid_third.scale(k));
    let eliminated = eliminated.scale(Rational::new(4, 1) / eliminated.full);

    // substitute Simpson for the middle-third integral
    let combined = eliminated.minus(&simpson_third.scale(eliminated.middle / simpson_third.middle));

    let weights = combined.values.map(|v| v / combined.full);
    let total = combined.error_sum();
    NewtonReconstruction {
        eliminated,
        weights,
        combined_coefficient: total.abs(),
        error_coefficient: total / combined.full,
        combined,
    }
}
