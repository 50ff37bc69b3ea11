//! Command-line front end.
//!
//! Every subcommand emits one record with a fixed key order, as a single
//! JSON object or as a CSV header plus one row. Numbers carry 17
//! significant digits; list fields are `;`-joined in CSV.
//!
//! Exit codes: 0 success, 1 usage error, 2 domain or oracle failure.

use std::fmt::Write as _;

use clap::{Parser, Subcommand, ValueEnum};

use crate::adaptive::{adaptive_integrate, DEFAULT_MAX_DEPTH};
use crate::error::Error;
use crate::expr::{parse, Expr};
use crate::rules::{composite_rule, Interval, Rational, RuleId};
use crate::verification::{
    check_lemma1_identity, check_lemma2_identity, check_lemma2_moment, check_middle_third, convergence_order,
    estimate_error_constant, locate_xi_with, reconstruct_newton, XiSearch, MOMENT_TOLERANCE,
};

/// Residual threshold reported as pass/fail by `verify`.
pub const VERIFY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "ncquad", version, about = "Derivative-corrected Newton-Cotes quadrature and its verification")]
#[command(allow_negative_numbers = true)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

fn parse_rule(s: &str) -> Result<RuleId, String> {
    s.parse::<RuleId>().map_err(|e| e.to_string())
}

#[derive(Debug, clap::Args)]
struct Domain {
    /// Integrand in the variable x, e.g. "exp(-x^2)".
    #[arg(long)]
    expr: String,
    #[arg(long = "a", allow_negative_numbers = true)]
    a: f64,
    #[arg(long = "b", allow_negative_numbers = true)]
    b: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Composite rule on equal panels.
    Integrate {
        #[command(flatten)]
        domain: Domain,
        #[arg(long, value_parser = parse_rule)]
        rule: RuleId,
        #[arg(long, default_value_t = 1)]
        panels: usize,
    },
    /// Adaptive Simpson / 3/8 integration.
    Adaptive {
        #[command(flatten)]
        domain: Domain,
        #[arg(long)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: usize,
    },
    /// Error table and fitted order over several panel counts.
    Convergence {
        #[command(flatten)]
        domain: Domain,
        #[arg(long, value_parser = parse_rule)]
        rule: RuleId,
        #[arg(long, value_delimiter = ',', required = true)]
        panels: Vec<usize>,
    },
    /// Recover a rule's error constant on shrinking intervals.
    Constants {
        #[arg(long, value_parser = parse_rule)]
        rule: RuleId,
        #[arg(long)]
        expr: String,
        #[arg(long = "a", default_value_t = 0.0, allow_negative_numbers = true)]
        a: f64,
        #[arg(long = "b", default_value_t = 1.0, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, default_value_t = 8)]
        levels: usize,
    },
    /// Locate a mean-value point of the rule's error term.
    Xi {
        #[command(flatten)]
        domain: Domain,
        #[arg(long, value_parser = parse_rule)]
        rule: RuleId,
        #[arg(long, default_value_t = XiSearch::default().grid)]
        grid: usize,
        #[arg(long, default_value_t = XiSearch::default().bisect_iters)]
        bisect_iters: usize,
    },
    /// Kernel identities, the quartic moment and the 3/8 reconstruction.
    Verify {
        #[command(flatten)]
        domain: Domain,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Int(u64),
    Bool(bool),
    Str(String),
    Nums(Vec<f64>),
    Ints(Vec<u64>),
    Null,
}

/// One command's output with a fixed key order.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputRecord {
    pub fields: Vec<(&'static str, Field)>,
}

impl OutputRecord {
    fn new(command: &str) -> Self {
        OutputRecord { fields: vec![("command", Field::Str(command.to_string()))] }
    }

    fn push(&mut self, key: &'static str, value: Field) -> &mut Self {
        self.fields.push((key, value));
        self
    }

    fn num(&mut self, key: &'static str, v: f64) -> &mut Self {
        self.push(key, Field::Num(v))
    }

    fn int(&mut self, key: &'static str, v: usize) -> &mut Self {
        self.push(key, Field::Int(v as u64))
    }

    fn text(&mut self, key: &'static str, v: impl Into<String>) -> &mut Self {
        self.push(key, Field::Str(v.into()))
    }

    pub fn get(&self, key: &str) -> Option<&Field> {
        self.fields.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
    }

    pub fn to_json(&self) -> String {
        let mut out = String::from("{");
        for (i, (k, v)) in self.fields.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}:", json_string(k));
            match v {
                Field::Num(x) => out.push_str(&json_number(*x)),
                Field::Int(n) => out.push_str(&n.to_string()),
                Field::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
                Field::Str(s) => out.push_str(&json_string(s)),
                Field::Nums(xs) => {
                    let items: Vec<String> = xs.iter().map(|x| json_number(*x)).collect();
                    let _ = write!(out, "[{}]", items.join(","));
                }
                Field::Ints(ns) => {
                    let items: Vec<String> = ns.iter().map(|n| n.to_string()).collect();
                    let _ = write!(out, "[{}]", items.join(","));
                }
                Field::Null => out.push_str("null"),
            }
        }
        out.push('}');
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<&str> = self.fields.iter().map(|(k, _)| *k).collect();
        let row: Vec<String> = self
            .fields
            .iter()
            .map(|(_, v)| match v {
                Field::Num(x) => format_g17(*x),
                Field::Int(n) => n.to_string(),
                Field::Bool(b) => b.to_string(),
                Field::Str(s) => s.clone(),
                Field::Nums(xs) => xs.iter().map(|x| format_g17(*x)).collect::<Vec<_>>().join(";"),
                Field::Ints(ns) => ns.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(";"),
                Field::Null => String::new(),
            })
            .collect();
        // writing into a Vec cannot fail
        w.write_record(&header).expect("csv header");
        w.write_record(&row).expect("csv row");
        String::from_utf8(w.into_inner().expect("csv flush")).expect("utf-8 csv")
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json() + "\n",
            Format::Csv => self.to_csv(),
        }
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization")
}

fn json_number(x: f64) -> String {
    if x.is_finite() {
        format_g17(x)
    } else {
        "null".into()
    }
}

/// `x` with 17 significant digits: positional for decimal exponents in
/// `[-5, 17)`, scientific otherwise. Trailing zeros are kept.
pub fn format_g17(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0.0000000000000000" } else { "0.0000000000000000" }.into();
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci.rsplit_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    if (-5..17).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, x)
    } else {
        sci
    }
}

fn rational_text(r: Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Captured result of one CLI invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::InvalidInterval { .. } | Error::Parse(_) => Failure::Usage(e.to_string()),
            e => Failure::Runtime(e),
        }
    }
}

fn prepare(domain: &Domain) -> Result<(Expr, Interval), Failure> {
    let iv = Interval::new(domain.a, domain.b)?;
    let expr = parse(&domain.expr).map_err(|e| Failure::Usage(format!("--expr: {e}")))?;
    Ok((expr, iv))
}

/// Runs the CLI on `argv` (including the program name) without touching
/// the process streams.
pub fn run_cli<I, S>(argv: I) -> CliOutput
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    CliOutput { code: 0, stdout: text, stderr: String::new() }
                }
                _ => CliOutput { code: 1, stdout: String::new(), stderr: text },
            };
        }
    };
    match execute(&cli.command) {
        Ok(record) => CliOutput { code: 0, stdout: record.render(cli.format), stderr: String::new() },
        Err(Failure::Usage(msg)) => CliOutput { code: 1, stdout: String::new(), stderr: format!("error: {msg}\n") },
        Err(Failure::Runtime(e)) => CliOutput { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn execute(command: &Command) -> Result<OutputRecord, Failure> {
    match command {
        Command::Integrate { domain, rule, panels } => {
            let (f, iv) = prepare(domain)?;
            let out = composite_rule(*rule, &f, iv, *panels)?;
            let mut r = OutputRecord::new("integrate");
            r.text("expr", &domain.expr)
                .text("rule", rule.name())
                .num("a", iv.a())
                .num("b", iv.b())
                .int("panels", out.panels)
                .num("estimate", out.estimate)
                .int("function_evaluations", out.function_evaluations)
                .num("correction_contribution", out.correction_contribution);
            Ok(r)
        }
        Command::Adaptive { domain, tol, max_depth } => {
            let (f, iv) = prepare(domain)?;
            let out = adaptive_integrate(&f, iv, *tol, *max_depth)?;
            let mut r = OutputRecord::new("adaptive");
            r.text("expr", &domain.expr)
                .num("a", iv.a())
                .num("b", iv.b())
                .num("tol", *tol)
                .num("value", out.value)
                .num("error_estimate", out.error_estimate)
                .int("panels", out.panels)
                .push("max_depth_reached", Field::Bool(out.max_depth_reached))
                .push("rounding_limited", Field::Bool(out.rounding_limited))
                .int("function_evaluations", out.function_evaluations);
            Ok(r)
        }
        Command::Convergence { domain, rule, panels } => {
            let (f, iv) = prepare(domain)?;
            let rep = convergence_order(*rule, &f, iv, panels)?;
            let mut r = OutputRecord::new("convergence");
            r.text("expr", &domain.expr)
                .text("rule", rule.name())
                .num("a", iv.a())
                .num("b", iv.b())
                .push("panel_counts", Field::Ints(rep.panel_counts.iter().map(|&n| n as u64).collect()))
                .push("errors", Field::Nums(rep.errors.clone()))
                .num("slope", rep.slope);
            Ok(r)
        }
        Command::Constants { rule, expr, a, b, levels } => {
            let iv = Interval::new(*a, *b)?;
            let f = parse(expr).map_err(|e| Failure::Usage(format!("--expr: {e}")))?;
            let fit = estimate_error_constant(*rule, &f, iv, *levels)?;
            let mut r = OutputRecord::new("constants");
            r.text("expr", expr)
                .text("rule", rule.name())
                .num("a", iv.a())
                .num("b", iv.b())
                .num("fitted_c", fit.fitted_c)
                .text("paper_c", rational_text(fit.paper_c))
                .num("paper_c_value", *fit.paper_c.numer() as f64 / *fit.paper_c.denom() as f64)
                .num("relative_deviation", fit.relative_deviation)
                .int("levels_used", fit.levels_used);
            Ok(r)
        }
        Command::Xi { domain, rule, grid, bisect_iters } => {
            let (f, iv) = prepare(domain)?;
            if *grid == 0 {
                return Err(Failure::Usage("--grid must be at least 1".into()));
            }
            let cert = locate_xi_with(*rule, &f, iv, XiSearch { grid: *grid, bisect_iters: *bisect_iters })?;
            let (lo, hi) = match cert.bracket {
                Some((lo, hi)) => (Field::Num(lo), Field::Num(hi)),
                None => (Field::Null, Field::Null),
            };
            let mut r = OutputRecord::new("xi");
            r.text("expr", &domain.expr)
                .text("rule", rule.name())
                .num("a", iv.a())
                .num("b", iv.b())
                .num("xi", cert.xi)
                .num("residual", cert.residual)
                .push("bracket_lo", lo)
                .push("bracket_hi", hi)
                .num("error", cert.error)
                .num("target_f4", cert.target);
            Ok(r)
        }
        Command::Verify { domain } => {
            let (f, iv) = prepare(domain)?;
            let moment = check_lemma2_moment(iv)?;
            let l1 = check_lemma1_identity(&f, iv)?;
            let l2 = check_lemma2_identity(&f, iv)?;
            let third = check_middle_third(&f, iv)?;
            let newton = reconstruct_newton();
            let newton_ok = newton.matches_rule_spec() && newton.combined_coefficient == Rational::new(1, 1620);
            let pass = l1.residual < VERIFY_TOLERANCE
                && l2.residual < VERIFY_TOLERANCE
                && moment.relative_deviation <= MOMENT_TOLERANCE
                && newton_ok;
            let weights: Vec<String> = newton.weights.iter().map(|w| rational_text(*w)).collect();
            let mut r = OutputRecord::new("verify");
            r.text("expr", &domain.expr)
                .num("a", iv.a())
                .num("b", iv.b())
                .num("lemma1_lhs", l1.lhs)
                .num("lemma1_rhs", l1.rhs)
                .num("lemma1_residual", l1.residual)
                .num("lemma2_lhs", l2.lhs)
                .num("lemma2_rhs", l2.rhs)
                .num("lemma2_residual", l2.residual)
                .num("moment", moment.value)
                .num("moment_expected", moment.expected)
                .num("moment_deviation", moment.relative_deviation)
                .num("middle_third_implied_f4", third.implied_f4)
                .num("middle_third_min_f4", third.min_f4)
                .num("middle_third_max_f4", third.max_f4)
                .push("middle_third_holds", Field::Bool(third.holds))
                .text("newton_weights", weights.join(","))
                .text("newton_combined_coefficient", rational_text(newton.combined_coefficient))
                .push("newton_reconstruction_pass", Field::Bool(newton_ok))
                .push("pass", Field::Bool(pass));
            Ok(r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> CliOutput {
        run_cli(std::iter::once("ncquad").chain(args.iter().copied()))
    }

    #[test]
    fn g17_formatting() {
        assert_eq!(format_g17(11.0 / 54.0).len(), "0.20370370370370370".len());
        assert_eq!(format_g17(0.25), "0.25000000000000000");
        assert_eq!(format_g17(1.0), "1.0000000000000000");
        assert_eq!(format_g17(-2.0), "-2.0000000000000000");
        assert_eq!(format_g17(1e-7), "9.9999999999999995e-8");
        assert_eq!(format_g17(1.5e20), "1.5000000000000000e20");
        assert_eq!(format_g17(0.0), "0.0000000000000000");
        for x in [11.0 / 54.0, std::f64::consts::PI, 1e-300, 6.02e23, -1.0 / 3.0, 123456.789] {
            assert_eq!(format_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn integrate_newton38() {
        let out = run(&["integrate", "--expr", "x^4", "--a", "0", "--b", "1", "--rule", "newton38"]);
        assert_eq!(out.code, 0, "{out:?}");
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert!((v["estimate"].as_f64().unwrap() - 11.0 / 54.0).abs() < 1e-16);
        assert_eq!(v["function_evaluations"], 4);
        // nearest double to 11/54, printed to 17 significant digits
        assert!(out.stdout.contains("\"estimate\":0.20370370370370369,"), "{}", out.stdout);
        assert_eq!(v["estimate"].as_f64().unwrap(), 11.0 / 54.0);
    }

    #[test]
    fn unknown_rule_is_usage_error() {
        let out = run(&["integrate", "--expr", "x", "--a", "0", "--b", "1", "--rule", "nosuch"]);
        assert_eq!(out.code, 1);
        assert!(out.stderr.contains("nosuch"), "{}", out.stderr);
        let out = run(&["integrate", "--expr", "x", "--a", "0", "--b", "1", "--rule", "simpson", "--bogus"]);
        assert_eq!(out.code, 1);
        assert!(out.stderr.contains("--bogus"));
    }

    #[test]
    fn interval_and_expression_validation() {
        let out = run(&["integrate", "--expr", "x", "--a", "1", "--b", "1", "--rule", "simpson"]);
        assert_eq!(out.code, 1);
        let out = run(&["integrate", "--expr", "sin(x", "--a", "0", "--b", "1", "--rule", "simpson"]);
        assert_eq!(out.code, 1);
        assert!(out.stderr.contains("offset 5"), "{}", out.stderr);
    }

    #[test]
    fn domain_failure_exit_code() {
        let out = run(&["integrate", "--expr", "log(x)", "--a", "0", "--b", "1", "--rule", "simpson"]);
        assert_eq!(out.code, 2, "{out:?}");
        let out = run(&["convergence", "--expr", "x^3", "--a", "0", "--b", "1", "--rule", "newton38", "--panels", "2,4,8"]);
        assert_eq!(out.code, 2, "{out:?}");
    }

    #[test]
    fn negative_endpoints() {
        let out = run(&["integrate", "--expr", "x^2", "--a", "-1", "--b", "2", "--rule", "simpson"]);
        assert_eq!(out.code, 0, "{out:?}");
    }

    #[test]
    fn csv_matches_json() {
        let args = ["xi", "--expr", "x^5", "--a", "0", "--b", "1", "--rule", "simpson"];
        let json = run(&args);
        let mut csv_args = args.to_vec();
        csv_args.extend(["--format", "csv"]);
        let csv = run(&csv_args);
        assert_eq!((json.code, csv.code), (0, 0));
        let v: serde_json::Value = serde_json::from_str(&json.stdout).unwrap();
        let mut rdr = csv::Reader::from_reader(csv.stdout.as_bytes());
        let header = rdr.headers().unwrap().clone();
        let row = rdr.records().next().unwrap().unwrap();
        for (k, cell) in header.iter().zip(row.iter()) {
            if let Some(x) = v[k].as_f64() {
                assert_eq!(cell.parse::<f64>().unwrap(), x, "{k}");
            }
        }
        assert!((v["xi"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn help_exits_cleanly() {
        let out = run(&["--help"]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("integrate"));
    }
}
