//! Python bindings for `ncquad`.
//!
//! Integrands are passed as expression strings or [`Expr`] objects. Routines
//! that only sample values (`adaptive_integrate`, `reference_integral`) also
//! accept a plain Python callable.

use std::cell::RefCell;

use ncquad::verification::{self, XiSearch};
use ncquad::{Elementary, Error, Interval, Rational, RuleId};
use num_traits::ToPrimitive;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyTypeError, PyValueError, PyZeroDivisionError};
use pyo3::prelude::*;

create_exception!(ncquad, QuadratureError, PyException, "Failure inside an ncquad routine.");
create_exception!(ncquad, ParseError, QuadratureError, "The expression text could not be parsed.");
create_exception!(ncquad, DomainError, QuadratureError, "An evaluation left a function's domain.");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Parse(p) => ParseError::new_err(p.to_string()),
        Error::InvalidInput(_) | Error::InvalidInterval { .. } => PyValueError::new_err(e.to_string()),
        e if e.is_domain() => DomainError::new_err(e.to_string()),
        e => QuadratureError::new_err(e.to_string()),
    }
}

fn fraction<'py>(py: Python<'py>, r: Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((*r.numer(), *r.denom()))
}

fn rational_f64(r: Rational) -> f64 {
    r.to_f64().expect("small rational")
}

fn rule(name: &str) -> PyResult<RuleId> {
    name.parse::<RuleId>().map_err(|e| PyValueError::new_err(e.to_string()))
}

fn interval(a: f64, b: f64) -> PyResult<Interval> {
    Interval::new(a, b).map_err(to_py)
}

/// A parsed expression in the variable `x`.
#[pyclass(name = "Expr", module = "ncquad", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyExpr {
    inner: ncquad::Expr,
    text: String,
}

#[pymethods]
impl PyExpr {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        let inner = ncquad::parse(text).map_err(|e| to_py(e.into()))?;
        Ok(PyExpr { inner, text: text.to_string() })
    }

    /// Value at `x`.
    fn value(&self, x: f64) -> PyResult<f64> {
        self.inner.eval_value(x).map_err(to_py)
    }

    /// Value and first four derivatives at `x`.
    fn jet(&self, x: f64) -> PyResult<PyJet4> {
        self.inner.eval_jet4(x).map(PyJet4).map_err(to_py)
    }

    fn contains_variable(&self) -> bool {
        self.inner.contains_variable()
    }

    #[getter]
    fn text(&self) -> &str {
        &self.text
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Expr({:?})", self.inner.to_string())
    }
}

/// Value and raw derivatives `d0..d4` at a point.
#[pyclass(name = "Jet4", module = "ncquad", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyJet4(ncquad::Jet4);

/// Right-hand operand of jet arithmetic: another jet or a number.
#[derive(FromPyObject)]
enum JetOperand {
    Jet(PyJet4),
    Number(f64),
}

impl JetOperand {
    fn jet(&self) -> ncquad::Jet4 {
        match self {
            JetOperand::Jet(j) => j.0,
            JetOperand::Number(c) => ncquad::Jet4::constant(*c),
        }
    }
}

#[pymethods]
impl PyJet4 {
    #[new]
    #[pyo3(signature = (d0, d1 = 0.0, d2 = 0.0, d3 = 0.0, d4 = 0.0))]
    fn new(d0: f64, d1: f64, d2: f64, d3: f64, d4: f64) -> Self {
        PyJet4(ncquad::Jet4::new(d0, d1, d2, d3, d4))
    }

    /// Seed jet of the independent variable at `x`.
    #[staticmethod]
    fn variable(x: f64) -> PyResult<Self> {
        ncquad::Jet4::variable(x).map(PyJet4).map_err(to_py)
    }

    #[staticmethod]
    fn constant(c: f64) -> Self {
        PyJet4(ncquad::Jet4::constant(c))
    }

    #[getter]
    fn d0(&self) -> f64 {
        self.0.d0
    }
    #[getter]
    fn d1(&self) -> f64 {
        self.0.d1
    }
    #[getter]
    fn d2(&self) -> f64 {
        self.0.d2
    }
    #[getter]
    fn d3(&self) -> f64 {
        self.0.d3
    }
    #[getter]
    fn d4(&self) -> f64 {
        self.0.d4
    }

    #[allow(clippy::wrong_self_convention)]
    fn to_tuple(&self) -> (f64, f64, f64, f64, f64) {
        let d = self.0.to_array();
        (d[0], d[1], d[2], d[3], d[4])
    }

    /// Composes with an elementary function given by name, e.g. `"sin"`.
    fn apply(&self, func: &str) -> PyResult<Self> {
        let f = Elementary::from_name(func)
            .ok_or_else(|| PyValueError::new_err(format!("unknown function '{func}'")))?;
        self.0.apply(f).map(PyJet4).map_err(to_py)
    }

    fn powi(&self, n: i64) -> PyResult<Self> {
        self.0.powi(n).map(PyJet4).map_err(to_py)
    }

    fn __add__(&self, rhs: JetOperand) -> Self {
        PyJet4(self.0 + rhs.jet())
    }
    fn __radd__(&self, lhs: JetOperand) -> Self {
        PyJet4(lhs.jet() + self.0)
    }
    fn __sub__(&self, rhs: JetOperand) -> Self {
        PyJet4(self.0 - rhs.jet())
    }
    fn __rsub__(&self, lhs: JetOperand) -> Self {
        PyJet4(lhs.jet() - self.0)
    }
    fn __mul__(&self, rhs: JetOperand) -> Self {
        PyJet4(self.0 * rhs.jet())
    }
    fn __rmul__(&self, lhs: JetOperand) -> Self {
        PyJet4(lhs.jet() * self.0)
    }
    fn __truediv__(&self, rhs: JetOperand) -> PyResult<Self> {
        self.0.checked_div(rhs.jet()).map(PyJet4).map_err(|_| PyZeroDivisionError::new_err("jet division by zero"))
    }
    fn __rtruediv__(&self, lhs: JetOperand) -> PyResult<Self> {
        lhs.jet().checked_div(self.0).map(PyJet4).map_err(|_| PyZeroDivisionError::new_err("jet division by zero"))
    }
    fn __neg__(&self) -> Self {
        PyJet4(-self.0)
    }
    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        let d = self.0;
        format!("Jet4({:?}, {:?}, {:?}, {:?}, {:?})", d.d0, d.d1, d.d2, d.d3, d.d4)
    }
}

/// An integrand argument: expression text, an [`PyExpr`], or (where only
/// values are needed) a Python callable.
enum Func<'py> {
    Expr(ncquad::Expr),
    Callable(Bound<'py, PyAny>),
}

impl<'py> Func<'py> {
    fn extract(obj: &Bound<'py, PyAny>) -> PyResult<Self> {
        if let Ok(e) = obj.cast::<PyExpr>() {
            return Ok(Func::Expr(e.get().inner.clone()));
        }
        if let Ok(text) = obj.extract::<String>() {
            return ncquad::parse(&text).map(Func::Expr).map_err(|e| to_py(e.into()));
        }
        if obj.is_callable() {
            return Ok(Func::Callable(obj.clone()));
        }
        Err(PyTypeError::new_err("integrand must be an expression string, an Expr or a callable"))
    }

    /// The parsed expression; callables are rejected because derivatives are needed.
    fn expr(obj: &Bound<'py, PyAny>) -> PyResult<ncquad::Expr> {
        match Func::extract(obj)? {
            Func::Expr(e) => Ok(e),
            Func::Callable(_) => {
                Err(PyTypeError::new_err("this routine needs derivatives: pass an expression string or an Expr"))
            }
        }
    }
}

/// Value-only integrand backed by a Python callable. A Python exception is
/// parked here and re-raised once the Rust routine unwinds.
struct Callable<'py> {
    f: Bound<'py, PyAny>,
    failure: RefCell<Option<PyErr>>,
}

impl ncquad::Integrand for Callable<'_> {
    fn value(&self, x: f64) -> ncquad::Result<f64> {
        match self.f.call1((x,)).and_then(|v| v.extract::<f64>()) {
            Ok(v) => Ok(v),
            Err(e) => {
                self.failure.borrow_mut().get_or_insert(e);
                Err(Error::InvalidInput(format!("python integrand failed at x = {x}")))
            }
        }
    }
}

/// Runs `op` on either integrand kind, surfacing a parked Python exception first.
fn with_values<'py, T>(
    func: Func<'py>,
    op: impl Fn(&dyn ncquad::Integrand) -> ncquad::Result<T>,
) -> PyResult<T> {
    match func {
        Func::Expr(e) => op(&e).map_err(to_py),
        Func::Callable(f) => {
            let c = Callable { f, failure: RefCell::new(None) };
            let out = op(&c);
            if let Some(e) = c.failure.into_inner() {
                return Err(e);
            }
            out.map_err(to_py)
        }
    }
}

type CorrectionTerm<'py> = (u8, Bound<'py, PyAny>, Bound<'py, PyAny>);

#[pyclass(name = "RuleSpec", module = "ncquad", frozen)]
struct PyRuleSpec(ncquad::RuleSpec);

#[pymethods]
impl PyRuleSpec {
    #[getter]
    fn name(&self) -> &'static str {
        self.0.id.name()
    }

    /// Node positions as fractions of the unit interval.
    #[getter]
    fn nodes<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        self.0.nodes.iter().map(|n| fraction(py, n.beta)).collect()
    }

    #[getter]
    fn weights<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        self.0.weights.iter().map(|w| fraction(py, *w)).collect()
    }

    /// `(derivative order, node position, coefficient)` triples; the term
    /// is `coefficient · (b−a)^(order+1) · f^(order)(node)`.
    #[getter]
    fn corrections<'py>(&self, py: Python<'py>) -> PyResult<Vec<CorrectionTerm<'py>>> {
        self.0
            .corrections
            .iter()
            .map(|c| Ok((c.order, fraction(py, c.node.beta)?, fraction(py, c.coefficient)?)))
            .collect()
    }

    #[getter]
    fn error_coefficient<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, self.0.error_coefficient)
    }

    fn is_symmetric(&self) -> bool {
        self.0.is_symmetric()
    }

    fn __repr__(&self) -> String {
        format!("RuleSpec({:?}, error_coefficient={})", self.0.id.name(), self.0.error_coefficient)
    }
}

#[pyclass(name = "QuadratureOutcome", module = "ncquad", frozen, get_all)]
struct PyQuadratureOutcome {
    estimate: f64,
    panels: usize,
    function_evaluations: usize,
    correction_contribution: f64,
}

#[pyclass(name = "AdaptiveResult", module = "ncquad", frozen, get_all)]
struct PyAdaptiveResult {
    value: f64,
    error_estimate: f64,
    panels: usize,
    max_depth_reached: bool,
    rounding_limited: bool,
    function_evaluations: usize,
}

#[pyclass(name = "IdentityCheck", module = "ncquad", frozen, get_all)]
struct PyIdentityCheck {
    lhs: f64,
    rhs: f64,
    residual: f64,
}

#[pyclass(name = "MomentCheck", module = "ncquad", frozen, get_all)]
struct PyMomentCheck {
    value: f64,
    expected: f64,
    relative_deviation: f64,
}

#[pyclass(name = "MiddleThirdCheck", module = "ncquad", frozen, get_all)]
struct PyMiddleThirdCheck {
    implied_f4: f64,
    min_f4: f64,
    max_f4: f64,
    holds: bool,
}

#[pyclass(name = "ConstantFit", module = "ncquad", frozen, get_all)]
struct PyConstantFit {
    rule: &'static str,
    fitted_c: f64,
    /// The stored constant as a float.
    paper_c: f64,
    relative_deviation: f64,
    levels_used: usize,
}

#[pyclass(name = "ConvergenceReport", module = "ncquad", frozen, get_all)]
struct PyConvergenceReport {
    rule: &'static str,
    panel_counts: Vec<usize>,
    errors: Vec<f64>,
    slope: f64,
}

#[pyclass(name = "XiCertificate", module = "ncquad", frozen, get_all)]
struct PyXiCertificate {
    xi: f64,
    residual: f64,
    bracket: Option<(f64, f64)>,
    error: f64,
    target: f64,
}

#[pyclass(name = "NewtonReconstruction", module = "ncquad", frozen)]
struct PyNewtonReconstruction(verification::NewtonReconstruction);

#[pymethods]
impl PyNewtonReconstruction {
    /// Weights over the nodes `0, 1/3, 1/2, 2/3, 1` of the unit interval.
    #[getter]
    fn weights<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        self.0.weights.iter().map(|w| fraction(py, *w)).collect()
    }

    #[getter]
    fn combined_coefficient<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, self.0.combined_coefficient)
    }

    #[getter]
    fn error_coefficient<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, self.0.error_coefficient)
    }

    fn matches_rule_spec(&self) -> bool {
        self.0.matches_rule_spec()
    }
}

/// Parses an expression in `x`.
#[pyfunction]
fn parse(text: &str) -> PyResult<PyExpr> {
    PyExpr::new(text)
}

/// Names accepted wherever a rule is expected.
#[pyfunction]
fn rules() -> Vec<&'static str> {
    RuleId::ALL.iter().map(|r| r.name()).collect()
}

#[pyfunction]
fn rule_spec(rule_name: &str) -> PyResult<PyRuleSpec> {
    Ok(PyRuleSpec(ncquad::rule_spec(rule(rule_name)?)))
}

/// Composite rule over `panels` equal panels of `[a, b]`.
#[pyfunction]
#[pyo3(signature = (f, a, b, rule_name, panels = 1))]
fn integrate(f: &Bound<'_, PyAny>, a: f64, b: f64, rule_name: &str, panels: usize) -> PyResult<PyQuadratureOutcome> {
    let expr = Func::expr(f)?;
    let out = ncquad::composite_rule(rule(rule_name)?, &expr, interval(a, b)?, panels).map_err(to_py)?;
    Ok(PyQuadratureOutcome {
        estimate: out.estimate,
        panels: out.panels,
        function_evaluations: out.function_evaluations,
        correction_contribution: out.correction_contribution,
    })
}

/// `|c_R| (b−a)⁵ m4` for a bound `m4` on `|f⁗|`.
#[pyfunction]
fn error_bound(rule_name: &str, a: f64, b: f64, m4: f64) -> PyResult<f64> {
    ncquad::error_bound(rule(rule_name)?, interval(a, b)?, m4).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (f, a, b, tol, max_depth = ncquad::adaptive::DEFAULT_MAX_DEPTH))]
fn adaptive_integrate(f: &Bound<'_, PyAny>, a: f64, b: f64, tol: f64, max_depth: usize) -> PyResult<PyAdaptiveResult> {
    let iv = interval(a, b)?;
    let r = with_values(Func::extract(f)?, |g| ncquad::adaptive_integrate(g, iv, tol, max_depth))?;
    Ok(PyAdaptiveResult {
        value: r.value,
        error_estimate: r.error_estimate,
        panels: r.panels,
        max_depth_reached: r.max_depth_reached,
        rounding_limited: r.rounding_limited,
        function_evaluations: r.function_evaluations,
    })
}

/// High-accuracy reference value of `∫_a^b f`.
#[pyfunction]
fn reference_integral(f: &Bound<'_, PyAny>, a: f64, b: f64) -> PyResult<f64> {
    let iv = interval(a, b)?;
    with_values(Func::extract(f)?, |g| verification::reference_integral(g, iv))
}

#[pyfunction]
fn exactness_degree(rule_name: &str) -> PyResult<i32> {
    Ok(verification::exactness_degree(rule(rule_name)?))
}

#[pyfunction]
#[pyo3(signature = (rule_name, f, a = 0.0, b = 1.0, levels = 8))]
fn estimate_error_constant(rule_name: &str, f: &Bound<'_, PyAny>, a: f64, b: f64, levels: usize) -> PyResult<PyConstantFit> {
    let expr = Func::expr(f)?;
    let fit = verification::estimate_error_constant(rule(rule_name)?, &expr, interval(a, b)?, levels).map_err(to_py)?;
    Ok(PyConstantFit {
        rule: fit.rule.name(),
        fitted_c: fit.fitted_c,
        paper_c: rational_f64(fit.paper_c),
        relative_deviation: fit.relative_deviation,
        levels_used: fit.levels_used,
    })
}

#[pyfunction]
fn convergence_order(
    rule_name: &str,
    f: &Bound<'_, PyAny>,
    a: f64,
    b: f64,
    panels: Vec<usize>,
) -> PyResult<PyConvergenceReport> {
    let expr = Func::expr(f)?;
    let r = verification::convergence_order(rule(rule_name)?, &expr, interval(a, b)?, &panels).map_err(to_py)?;
    Ok(PyConvergenceReport { rule: r.rule.name(), panel_counts: r.panel_counts, errors: r.errors, slope: r.slope })
}

#[pyfunction]
#[pyo3(signature = (rule_name, f, a, b, grid = 1024, bisect_iters = 80))]
fn locate_xi(
    rule_name: &str,
    f: &Bound<'_, PyAny>,
    a: f64,
    b: f64,
    grid: usize,
    bisect_iters: usize,
) -> PyResult<PyXiCertificate> {
    let expr = Func::expr(f)?;
    let c = verification::locate_xi_with(rule(rule_name)?, &expr, interval(a, b)?, XiSearch { grid, bisect_iters })
        .map_err(to_py)?;
    Ok(PyXiCertificate { xi: c.xi, residual: c.residual, bracket: c.bracket, error: c.error, target: c.target })
}

fn identity(c: verification::IdentityCheck) -> PyIdentityCheck {
    PyIdentityCheck { lhs: c.lhs, rhs: c.rhs, residual: c.residual }
}

#[pyfunction]
fn check_lemma1_identity(f: &Bound<'_, PyAny>, a: f64, b: f64) -> PyResult<PyIdentityCheck> {
    let expr = Func::expr(f)?;
    verification::check_lemma1_identity(&expr, interval(a, b)?).map(identity).map_err(to_py)
}

#[pyfunction]
fn check_lemma2_identity(f: &Bound<'_, PyAny>, a: f64, b: f64) -> PyResult<PyIdentityCheck> {
    let expr = Func::expr(f)?;
    verification::check_lemma2_identity(&expr, interval(a, b)?).map(identity).map_err(to_py)
}

#[pyfunction]
fn check_lemma2_moment(a: f64, b: f64) -> PyResult<PyMomentCheck> {
    let m = verification::check_lemma2_moment(interval(a, b)?).map_err(to_py)?;
    Ok(PyMomentCheck { value: m.value, expected: m.expected, relative_deviation: m.relative_deviation })
}

#[pyfunction]
fn check_middle_third(f: &Bound<'_, PyAny>, a: f64, b: f64) -> PyResult<PyMiddleThirdCheck> {
    let expr = Func::expr(f)?;
    let c = verification::check_middle_third(&expr, interval(a, b)?).map_err(to_py)?;
    Ok(PyMiddleThirdCheck { implied_f4: c.implied_f4, min_f4: c.min_f4, max_f4: c.max_f4, holds: c.holds })
}

#[pyfunction]
fn reconstruct_newton() -> PyNewtonReconstruction {
    PyNewtonReconstruction(verification::reconstruct_newton())
}

/// Runs the command-line interface on `args` (without the program name)
/// and returns `(exit_code, stdout, stderr)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String, String) {
    let argv = std::iter::once("ncquad".to_string()).chain(args);
    let out = ncquad::cli::run_cli(argv);
    (out.code, out.stdout, out.stderr)
}

/// Derivative-corrected Newton-Cotes quadrature with verification tooling.
#[pymodule(name = "ncquad")]
fn ncquad_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("QuadratureError", py.get_type::<QuadratureError>())?;
    m.add("ParseError", py.get_type::<ParseError>())?;
    m.add("DomainError", py.get_type::<DomainError>())?;
    m.add_class::<PyExpr>()?;
    m.add_class::<PyJet4>()?;
    m.add_class::<PyRuleSpec>()?;
    m.add_class::<PyQuadratureOutcome>()?;
    m.add_class::<PyAdaptiveResult>()?;
    m.add_class::<PyIdentityCheck>()?;
    m.add_class::<PyMomentCheck>()?;
    m.add_class::<PyMiddleThirdCheck>()?;
    m.add_class::<PyConstantFit>()?;
    m.add_class::<PyConvergenceReport>()?;
    m.add_class::<PyXiCertificate>()?;
    m.add_class::<PyNewtonReconstruction>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(rules, m)?)?;
    m.add_function(wrap_pyfunction!(rule_spec, m)?)?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(error_bound, m)?)?;
    m.add_function(wrap_pyfunction!(adaptive_integrate, m)?)?;
    m.add_function(wrap_pyfunction!(reference_integral, m)?)?;
    m.add_function(wrap_pyfunction!(exactness_degree, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_error_constant, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_order, m)?)?;
    m.add_function(wrap_pyfunction!(locate_xi, m)?)?;
    m.add_function(wrap_pyfunction!(check_lemma1_identity, m)?)?;
    m.add_function(wrap_pyfunction!(check_lemma2_identity, m)?)?;
    m.add_function(wrap_pyfunction!(check_lemma2_moment, m)?)?;
    m.add_function(wrap_pyfunction!(check_middle_third, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct_newton, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
