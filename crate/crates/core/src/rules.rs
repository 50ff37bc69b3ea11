//! The four closed-form rules and their composite extension.
//!
//! Every rule has degree of exactness three and an error of the form
//! `E = ∫f − R(f) = c_R · (b−a)⁵ · f⁗(ξ)` for some ξ in `[a, b]`:
//!
//! | rule                 | nodes (weights)                  | correction          | c_R       |
//! |----------------------|----------------------------------|---------------------|-----------|
//! | `MidpointCorrected`  | m (1)                            | +(b−a)³ f″(m) / 24  | +1/1920   |
//! | `Blend161`           | a, m, b (1, 6, 1)/8              | +(b−a)³ f″(m) / 96  | −1/7680   |
//! | `Simpson`            | a, m, b (1, 4, 1)/6              |                     | −1/2880   |
//! | `Newton38`           | a, (2a+b)/3, (a+2b)/3, b (1,3,3,1)/8 |                 | −1/6480   |

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::integrand::{Integrand, JetIntegrand};
use crate::jet::Jet4;

pub type Rational = Ratio<i64>;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Oriented integration domain with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_finite() && b.is_finite() && a < b {
            Ok(Interval { a, b })
        } else {
            Err(Error::InvalidInterval { a, b })
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        (self.a + self.b) / 2.0
    }

    /// Barycentric point `α·a + β·b`.
    pub fn point(&self, node: &Node) -> f64 {
        node.position(self.a, self.b)
    }

    /// Halves `[a, m]` and `[m, b]`.
    pub fn split(&self) -> (Interval, Interval) {
        let m = self.midpoint();
        (Interval { a: self.a, b: m }, Interval { a: m, b: self.b })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    MidpointCorrected,
    Blend161,
    Simpson,
    Newton38,
}

impl RuleId {
    pub const ALL: [RuleId; 4] = [
        RuleId::MidpointCorrected,
        RuleId::Blend161,
        RuleId::Simpson,
        RuleId::Newton38,
    ];

    /// Stable lowercase identifier used on the command line.
    pub fn name(self) -> &'static str {
        match self {
            RuleId::MidpointCorrected => "midpoint-corrected",
            RuleId::Blend161 => "blend161",
            RuleId::Simpson => "simpson",
            RuleId::Newton38 => "newton38",
        }
    }

    pub fn spec(self) -> RuleSpec {
        rule_spec(self)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownRule(pub String);

impl fmt::Display for UnknownRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown rule '{}' (expected one of: midpoint-corrected, blend161, simpson, newton38)",
            self.0
        )
    }
}

impl std::error::Error for UnknownRule {}

impl FromStr for RuleId {
    type Err = UnknownRule;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        RuleId::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| UnknownRule(s.to_string()))
    }
}

/// Node in barycentric form: position `α·a + β·b` with `α + β = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Node {
    pub alpha: Rational,
    pub beta: Rational,
}

impl Node {
    pub fn new(alpha: Rational) -> Self {
        Node { alpha, beta: Rational::one() - alpha }
    }

    pub fn left() -> Self {
        Node::new(Rational::one())
    }

    pub fn right() -> Self {
        Node::new(Rational::zero())
    }

    pub fn mid() -> Self {
        Node::new(q(1, 2))
    }

    /// Evaluates `(p·a + r·b) / d` over the common denominator `d`, so
    /// endpoints are reproduced exactly and the midpoint is `(a + b) / 2`.
    pub fn position(&self, a: f64, b: f64) -> f64 {
        let d = num_integer::lcm(*self.alpha.denom(), *self.beta.denom());
        let p = self.alpha.numer() * (d / self.alpha.denom());
        let r = self.beta.numer() * (d / self.beta.denom());
        let num = match (p, r) {
            (0, _) => r as f64 * b,
            (_, 0) => p as f64 * a,
            (1, 1) => a + b,
            _ => p as f64 * a + r as f64 * b,
        };
        if d == 1 {
            num
        } else {
            num / d as f64
        }
    }

    /// Mirror image under `a ↔ b`.
    pub fn reflect(&self) -> Node {
        Node { alpha: self.beta, beta: self.alpha }
    }

    fn is_left(&self) -> bool {
        self.alpha.is_one()
    }

    fn is_right(&self) -> bool {
        self.beta.is_one()
    }
}

/// Derivative correction `coefficient · (b−a)^(order+1) · f^(order)(node)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Correction {
    pub order: u8,
    pub node: Node,
    pub coefficient: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSpec {
    pub id: RuleId,
    pub nodes: Vec<Node>,
    /// Contribution of node `i` is `weights[i] · (b−a) · f(nodes[i])`.
    pub weights: Vec<Rational>,
    pub corrections: Vec<Correction>,
    /// `c_R` in `∫f − R(f) = c_R · (b−a)⁵ · f⁗(ξ)`.
    pub error_coefficient: Rational,
}

impl RuleSpec {
    pub fn weight_sum(&self) -> Rational {
        self.weights.iter().copied().fold(Rational::zero(), |s, w| s + w)
    }

    /// Whether reflecting every node and correction maps the rule onto itself.
    pub fn is_symmetric(&self) -> bool {
        let nodes_ok = self.nodes.iter().zip(&self.weights).all(|(n, w)| {
            self.nodes
                .iter()
                .zip(&self.weights)
                .any(|(m, v)| *m == n.reflect() && v == w)
        });
        let corr_ok = self.corrections.iter().all(|c| {
            // odd derivatives change sign under reflection
            let sign = if c.order % 2 == 0 { c.coefficient } else { -c.coefficient };
            self.corrections
                .iter()
                .any(|d| d.order == c.order && d.node == c.node.reflect() && d.coefficient == sign)
        });
        nodes_ok && corr_ok
    }

    fn touches_endpoints(&self) -> bool {
        self.nodes.iter().any(|n| n.is_left() || n.is_right())
    }
}

pub fn rule_spec(id: RuleId) -> RuleSpec {
    let third = Node::new(q(2, 3));
    let two_thirds = Node::new(q(1, 3));
    match id {
        RuleId::MidpointCorrected => RuleSpec {
            id,
            nodes: vec![Node::mid()],
            weights: vec![q(1, 1)],
            corrections: vec![Correction { order: 2, node: Node::mid(), coefficient: q(1, 24) }],
            error_coefficient: q(1, 1920),
        },
        RuleId::Blend161 => RuleSpec {
            id,
            nodes: vec![Node::left(), Node::mid(), Node::right()],
            weights: vec![q(1, 8), q(6, 8), q(1, 8)],
            corrections: vec![Correction { order: 2, node: Node::mid(), coefficient: q(1, 96) }],
            error_coefficient: q(-1, 7680),
        },
        RuleId::Simpson => RuleSpec {
            id,
            nodes: vec![Node::left(), Node::mid(), Node::right()],
            weights: vec![q(1, 6), q(4, 6), q(1, 6)],
            corrections: vec![],
            error_coefficient: q(-1, 2880),
        },
        RuleId::Newton38 => RuleSpec {
            id,
            nodes: vec![Node::left(), third, two_thirds, Node::right()],
            weights: vec![q(1, 8), q(3, 8), q(3, 8), q(1, 8)],
            corrections: vec![],
            error_coefficient: q(-1, 6480),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOutcome {
    pub estimate: f64,
    pub panels: usize,
    pub function_evaluations: usize,
    /// Part of `estimate` contributed by derivative corrections.
    pub correction_contribution: f64,
}

/// Precomputed integer form of a rule: weights over a common denominator.
struct Plan {
    spec: RuleSpec,
    weight_numers: Vec<f64>,
    weight_denom: f64,
    /// For each correction, the index of a weight node sharing its position.
    correction_slots: Vec<Option<usize>>,
    /// Nodes that need a jet (value plus derivatives) rather than a plain value.
    jet_nodes: Vec<bool>,
}

impl Plan {
    fn new(id: RuleId) -> Plan {
        let spec = rule_spec(id);
        let denom = spec.weights.iter().fold(1i64, |d, w| num_integer::lcm(d, *w.denom()));
        let weight_numers = spec
            .weights
            .iter()
            .map(|w| (w.numer() * (denom / w.denom())) as f64)
            .collect();
        let correction_slots: Vec<Option<usize>> = spec
            .corrections
            .iter()
            .map(|c| spec.nodes.iter().position(|n| *n == c.node))
            .collect();
        let mut jet_nodes = vec![false; spec.nodes.len()];
        for i in correction_slots.iter().flatten() {
            jet_nodes[*i] = true;
        }
        Plan {
            spec,
            weight_numers,
            weight_denom: denom as f64,
            correction_slots,
            jet_nodes,
        }
    }

    /// One panel `[lo, hi]`. Known endpoint values are reused and only fresh
    /// evaluations are counted.
    fn panel<F: JetIntegrand + ?Sized>(
        &self,
        f: &F,
        lo: f64,
        hi: f64,
        f_lo: Option<f64>,
        f_hi: Option<f64>,
    ) -> Result<PanelResult> {
        let width = hi - lo;
        let n = self.spec.nodes.len();
        let mut values = vec![0.0; n];
        let mut jets = vec![None; n];
        let mut evals = 0;
        for (i, node) in self.spec.nodes.iter().enumerate() {
            let x = node.position(lo, hi);
            let known = if node.is_left() {
                f_lo
            } else if node.is_right() {
                f_hi
            } else {
                None
            };
            values[i] = match known {
                Some(v) if !self.jet_nodes[i] => v,
                _ => {
                    evals += 1;
                    if self.jet_nodes[i] {
                        let j = f.jet(x).map_err(|e| e.at(x))?;
                        jets[i] = Some(j);
                        j.d0
                    } else {
                        f.value(x).map_err(|e| e.at(x))?
                    }
                }
            };
        }

        // pair node i with its mirror so the sum is invariant under reflection
        let mut node_sum = 0.0;
        for i in 0..n / 2 {
            let j = n - 1 - i;
            node_sum += self.weight_numers[i] * values[i] + self.weight_numers[j] * values[j];
        }
        if n % 2 == 1 {
            node_sum += self.weight_numers[n / 2] * values[n / 2];
        }
        let nodes_part = width * node_sum / self.weight_denom;

        let mut correction = 0.0;
        for (c, slot) in self.spec.corrections.iter().zip(&self.correction_slots) {
            let jet = match slot.and_then(|i| jets[i]) {
                Some(j) => j,
                None => {
                    let x = c.node.position(lo, hi);
                    evals += 1;
                    f.jet(x).map_err(|e| e.at(x))?
                }
            };
            let scale = width.powi(c.order as i32 + 1);
            correction += *c.coefficient.numer() as f64 * scale * jet.derivative(c.order as usize)
                / *c.coefficient.denom() as f64;
        }

        Ok(PanelResult {
            estimate: nodes_part + correction,
            correction,
            evals,
        })
    }
}

struct PanelResult {
    estimate: f64,
    correction: f64,
    evals: usize,
}

/// Single-panel application: weighted node sum plus derivative corrections.
pub fn apply_rule<F: JetIntegrand + ?Sized>(id: RuleId, f: &F, iv: Interval) -> Result<QuadratureOutcome> {
    let plan = Plan::new(id);
    let r = plan.panel(f, iv.a, iv.b, None, None)?;
    Ok(QuadratureOutcome {
        estimate: r.estimate,
        panels: 1,
        function_evaluations: r.evals,
        correction_contribution: r.correction,
    })
}

struct Acc {
    estimate: f64,
    correction: f64,
    evals: usize,
}

/// Composite rule on `panels` equal panels.
///
/// Panels are formed by recursive splitting (an even count splits at the
/// exact midpoint) and summed along the same tree, so the result is
/// deterministic and composite(2n) over `[a, b]` equals the sum of the
/// n-panel composites over its two halves bit for bit. Endpoint values are
/// shared between neighbouring panels.
pub fn composite_rule<F: JetIntegrand + ?Sized>(
    id: RuleId,
    f: &F,
    iv: Interval,
    panels: usize,
) -> Result<QuadratureOutcome> {
    if panels == 0 {
        return Err(Error::InvalidInput("panel count must be at least 1".into()));
    }
    let plan = Plan::new(id);
    let share = plan.spec.touches_endpoints();
    let acc = composite_rec(&plan, f, share, iv.a, iv.b, None, None, panels)?;
    Ok(QuadratureOutcome {
        estimate: acc.estimate,
        panels,
        function_evaluations: acc.evals,
        correction_contribution: acc.correction,
    })
}

#[allow(clippy::too_many_arguments)]
fn composite_rec<F: JetIntegrand + ?Sized>(
    plan: &Plan,
    f: &F,
    share: bool,
    lo: f64,
    hi: f64,
    f_lo: Option<f64>,
    f_hi: Option<f64>,
    n: usize,
) -> Result<Acc> {
    if n == 1 {
        let r = plan.panel(f, lo, hi, f_lo, f_hi)?;
        return Ok(Acc { estimate: r.estimate, correction: r.correction, evals: r.evals });
    }
    let k = n / 2;
    let split = if n.is_multiple_of(2) {
        (lo + hi) / 2.0
    } else {
        ((n - k) as f64 * lo + k as f64 * hi) / n as f64
    };
    let (f_split, own) = if share {
        (Some(f.value(split).map_err(|e| e.at(split))?), 1)
    } else {
        (None, 0)
    };
    let left = composite_rec(plan, f, share, lo, split, f_lo, f_split, k)?;
    let right = composite_rec(plan, f, share, split, hi, f_split, f_hi, n - k)?;
    Ok(Acc {
        estimate: left.estimate + right.estimate,
        correction: left.correction + right.correction,
        evals: left.evals + right.evals + own,
    })
}

/// Adapter for rules that never read derivatives.
struct ValuesOnly<'a, F: ?Sized>(&'a F);

impl<F: Integrand + ?Sized> Integrand for ValuesOnly<'_, F> {
    fn value(&self, x: f64) -> Result<f64> {
        self.0.value(x)
    }
}

impl<F: Integrand + ?Sized> JetIntegrand for ValuesOnly<'_, F> {
    fn jet(&self, _x: f64) -> Result<Jet4> {
        Err(Error::InvalidInput("integrand provides values only".into()))
    }
}

/// [`composite_rule`] for value-only integrands; the rule must not carry
/// derivative corrections.
pub fn composite_rule_values<F: Integrand + ?Sized>(
    id: RuleId,
    f: &F,
    iv: Interval,
    panels: usize,
) -> Result<QuadratureOutcome> {
    if !rule_spec(id).corrections.is_empty() {
        return Err(Error::InvalidInput(format!("rule {id} needs derivatives")));
    }
    composite_rule(id, &ValuesOnly(f), iv, panels)
}

/// `|c_R| · (b−a)⁵ · m4`, where `m4` bounds `|f⁗|` on the interval.
pub fn error_bound(id: RuleId, iv: Interval, m4: f64) -> Result<f64> {
    if !(m4 >= 0.0) || !m4.is_finite() {
        return Err(Error::InvalidInput(format!(
            "fourth-derivative bound must be finite and non-negative, got {m4}"
        )));
    }
    let c = rule_spec(id).error_coefficient.abs().to_f64().unwrap_or(f64::NAN);
    Ok(c * iv.width().powi(5) * m4)
}
