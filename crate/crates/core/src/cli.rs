//! Command-line front end shared by the `rootratio` binary and tests.

use std::time::Instant;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::boyd_lawton::{
    check_schedule, conjecture_scan, convergence_table, iterated_schedule, joint_schedule,
};
use crate::error::{Error, Result};
use crate::mahler::{compare_measures, mahler_torus, mahler_univariate};
use crate::poly::{parse_poly, MultiPoly, UniPoly};
use crate::sampling::{with_threads, Method, QuadratureSpec};
use crate::torus::{c_j_direct, c_j_slice};
use crate::uniroot::{c_exact, root_report, DEFAULT_DELTA};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "TORUS_MEASURE_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Torus estimate of c_j(P)
    C,
    /// Exact c(P) of a univariate polynomial
    CExact,
    /// Logarithmic Mahler measure
    Mahler,
    /// Root ratios of P(x, x^n2, ...) against the torus prediction
    BoydLawton,
    /// c(1 + x1 + ... + xk) against the conjectured 1/(k+1)
    ScanConjecture,
    /// Root census of a univariate polynomial
    Roots,
    /// Mahler measure and c side by side
    Compare,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Estimator {
    Slice,
    Direct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScheduleStyle {
    Iterated,
    Joint,
}

/// Root-ratio and Mahler measures of polynomials.
#[derive(Clone, Debug, Parser)]
#[command(name = "rootratio", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Polynomial expression, e.g. "1 + x + y"
    #[arg(allow_hyphen_values = true)]
    pub polynomial: Option<String>,
    /// Variable for c (defaults to the last one)
    #[arg(long)]
    pub var: Option<String>,
    /// Comma-separated variable order (defaults to first appearance)
    #[arg(long)]
    pub vars: Option<String>,
    /// tensor-trapezoid | shifted-lattice | jittered-monte-carlo
    #[arg(long, default_value = "jittered-monte-carlo")]
    pub method: Method,
    #[arg(long, default_value_t = 1 << 16)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 16)]
    pub nodes_per_dim: usize,
    /// Band around the unit circle that triggers slice resampling
    #[arg(long, default_value_t = 1e-7)]
    pub band: f64,
    #[arg(long, default_value_t = 0.01)]
    pub max_discard: f64,
    /// Substitution exponents, rows separated by ';', e.g. "10,100;20,400"
    #[arg(long)]
    pub exponents: Option<String>,
    /// Schedule used when --exponents is absent
    #[arg(long, value_enum, default_value = "iterated")]
    pub schedule: ScheduleStyle,
    /// Base exponents for the generated schedule
    #[arg(long, default_value = "10,20,40")]
    pub bases: String,
    /// Nudge generated exponents to be pairwise coprime
    #[arg(long)]
    pub coprime: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub output: OutputFormat,
    #[arg(long, value_enum, default_value = "slice")]
    pub estimator: Estimator,
    /// Unimodular classification band for root commands
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, default_value_t = 2)]
    pub k_min: usize,
    #[arg(long, default_value_t = 5)]
    pub k_max: usize,
    /// Worker threads, further capped by the environment variable
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Fully resolved invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub polynomial: Option<String>,
    pub variable: Option<String>,
    pub var_order: Option<Vec<String>>,
    pub spec: QuadratureSpec,
    pub exponents: Option<Vec<Vec<u64>>>,
    pub schedule: ScheduleStyle,
    pub bases: Vec<u64>,
    pub coprime: bool,
    pub output: OutputFormat,
    pub estimator: Estimator,
    pub delta: f64,
    pub k_min: usize,
    pub k_max: usize,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(command: Command, polynomial: Option<&str>) -> Self {
        RunConfig {
            command,
            polynomial: polynomial.map(str::to_string),
            variable: None,
            var_order: None,
            spec: QuadratureSpec::default(),
            exponents: None,
            schedule: ScheduleStyle::Iterated,
            bases: vec![10, 20, 40],
            coprime: false,
            output: OutputFormat::Json,
            estimator: Estimator::Slice,
            delta: DEFAULT_DELTA,
            k_min: 2,
            k_max: 5,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if self.command != Command::ScanConjecture && self.polynomial.is_none() {
            return Err(Error::InvalidArgument("a polynomial is required".into()));
        }
        if self.k_min == 0 || self.k_min > self.k_max {
            return Err(Error::InvalidArgument(format!(
                "bad k range {}..={}",
                self.k_min, self.k_max
            )));
        }
        Ok(())
    }
}

fn parse_u64_list(s: &str, what: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::InvalidArgument(format!("bad {what} entry `{}`", t.trim())))
        })
        .collect()
}

/// Parses `"10,100;20,400"` into rows of exponents.
pub fn parse_exponents(s: &str) -> Result<Vec<Vec<u64>>> {
    s.split(';')
        .filter(|r| !r.trim().is_empty())
        .map(|r| parse_u64_list(r, "exponent"))
        .collect()
}

impl Cli {
    /// `env_threads` is the value of [`THREADS_ENV`], if set.
    pub fn into_config(self, env_threads: Option<&str>) -> Result<RunConfig> {
        let env_cap = match env_threads {
            Some(v) => Some(v.trim().parse::<usize>().map_err(|_| {
                Error::InvalidArgument(format!("{THREADS_ENV} must be a positive integer"))
            })?),
            None => None,
        };
        let var_order = self.vars.as_deref().map(|v| {
            v.split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect()
        });
        let config = RunConfig {
            command: self.command,
            polynomial: self.polynomial,
            variable: self.var,
            var_order,
            spec: QuadratureSpec {
                method: self.method,
                total_samples: self.samples,
                nodes_per_dim: self.nodes_per_dim,
                seed: self.seed,
                circle_band_delta: self.band,
                max_discard_fraction: self.max_discard,
            },
            exponents: self.exponents.as_deref().map(parse_exponents).transpose()?,
            schedule: self.schedule,
            bases: parse_u64_list(&self.bases, "base")?,
            coprime: self.coprime,
            output: self.output,
            estimator: self.estimator,
            delta: self.delta,
            k_min: self.k_min,
            k_max: self.k_max,
            threads: match (self.threads, env_cap) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
        };
        config.validate()?;
        Ok(config)
    }
}

/// A command's result before rendering.
struct Report {
    fields: Map<String, Value>,
    /// Pre-rendered CSV for tabular commands.
    csv: Option<String>,
}

impl Report {
    fn new(fields: Value) -> Self {
        match fields {
            Value::Object(fields) => Report { fields, csv: None },
            _ => unreachable!("reports are JSON objects"),
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialise")
}

fn merge(into: &mut Map<String, Value>, v: Value) {
    if let Value::Object(m) = v {
        into.extend(m);
    }
}

fn error_value(e: &Error) -> Value {
    let mut body = Map::new();
    body.insert("code".into(), json!(e.code()));
    body.insert("message".into(), json!(e.to_string()));
    match e {
        Error::UnimodularRoots(counts) => merge(&mut body, to_value(counts)),
        Error::Syntax { pos, .. } => {
            body.insert("position".into(), json!(pos));
        }
        Error::DiscardBudget { fraction, limit } => {
            body.insert("discarded_fraction".into(), json!(fraction));
            body.insert("limit".into(), json!(limit));
        }
        Error::NonConvergence { worst_residual } => {
            body.insert("worst_residual".into(), json!(worst_residual));
        }
        _ => {}
    }
    json!({ "error": body })
}

fn parse_input(config: &RunConfig) -> Result<MultiPoly> {
    let src = config
        .polynomial
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("a polynomial is required".into()))?;
    let order: Option<Vec<&str>> = config
        .var_order
        .as_ref()
        .map(|v| v.iter().map(String::as_str).collect());
    parse_poly(src, order.as_deref())
}

fn univariate(p: &MultiPoly) -> Result<UniPoly> {
    match p.num_vars() {
        1 => p.substitute_powers(&[]),
        0 => Err(Error::InvalidArgument(
            "constant polynomial has no roots".into(),
        )),
        k => Err(Error::InvalidArgument(format!(
            "expected a univariate polynomial, got {k} variables"
        ))),
    }
}

fn root_list(roots: &[Complex64]) -> Value {
    Value::Array(roots.iter().map(|r| json!([r.re, r.im])).collect())
}

fn dispatch(config: &RunConfig) -> Result<Report> {
    let spec = &config.spec;
    match config.command {
        Command::C => {
            let p = parse_input(config)?;
            if p.num_vars() == 0 {
                return Err(Error::InvalidArgument("constant polynomial".into()));
            }
            let j = match &config.variable {
                Some(name) => p.var_index(name).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "variable `{name}` does not occur in the polynomial"
                    ))
                })?,
                None => p.num_vars() - 1,
            };
            let est = match config.estimator {
                Estimator::Slice => c_j_slice(&p, j, spec)?,
                Estimator::Direct => c_j_direct(&p, j, spec)?,
            };
            let mut r = Report::new(json!({ "variable": p.var_names()[j] }));
            merge(&mut r.fields, to_value(&est));
            Ok(r)
        }
        Command::CExact => {
            let p = univariate(&parse_input(config)?)?;
            let exact = c_exact(&p, config.delta)?;
            let mut r = Report::new(json!({
                "value": exact.value(),
                "std_error": 0.0,
                "imag_residual": 0.0,
                "samples_used": 0,
                "discarded_fraction": 0.0,
                "method": "exact",
            }));
            merge(&mut r.fields, to_value(&exact.report));
            Ok(r)
        }
        Command::Roots => {
            let p = univariate(&parse_input(config)?)?;
            let report = root_report(&p, config.delta)?;
            let mut r = Report::new(json!({ "method": "aberth-ehrlich" }));
            merge(&mut r.fields, to_value(&report));
            r.fields.insert("roots".into(), root_list(&report.roots));
            Ok(r)
        }
        Command::Mahler => {
            let p = parse_input(config)?;
            let m = if p.num_vars() == 1 {
                mahler_univariate(&univariate(&p)?)?
            } else {
                mahler_torus(&p, spec)?
            };
            let mut r = Report::new(json!({ "value": m.log_value }));
            merge(&mut r.fields, to_value(&m));
            Ok(r)
        }
        Command::Compare => {
            let p = parse_input(config)?;
            let cmp = compare_measures(&p, spec)?;
            let side = |v: Result<Value>| v.unwrap_or_else(|e| error_value(&e));
            Ok(Report::new(json!({
                "mahler": side(cmp.mahler.map(|m| to_value(&m))),
                "c": side(cmp.c.map(|c| to_value(&c))),
            })))
        }
        Command::BoydLawton => {
            let p = parse_input(config)?;
            let k = p.num_vars();
            let schedule = match &config.exponents {
                Some(rows) => rows.clone(),
                None => match config.schedule {
                    ScheduleStyle::Iterated => iterated_schedule(k, &config.bases, config.coprime),
                    ScheduleStyle::Joint => joint_schedule(k, &config.bases, config.coprime),
                },
            };
            check_schedule(k, &schedule)?;
            let table = convergence_table(&p, &schedule, spec)?;
            let terms = &table.prediction.terms;
            let mut r = Report::new(json!({
                "rows": to_value(&table.rows),
                "predicted_limit": table.prediction.value,
                "std_error": table.prediction.std_error,
                "samples_used": terms.iter().map(|t| t.samples_used).sum::<usize>(),
                "discarded_fraction": terms.iter().map(|t| t.discarded_fraction).fold(0.0, f64::max),
                "method": terms.first().map(|t| t.method_tag.clone()),
            }));
            r.csv = Some(table.to_csv());
            Ok(r)
        }
        Command::ScanConjecture => {
            let rows = conjecture_scan(config.k_min, config.k_max, spec)?;
            let flat: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let mut m = Map::new();
                    m.insert("k".into(), json!(row.k));
                    m.insert("target".into(), json!(row.target));
                    merge(&mut m, to_value(&row.estimate));
                    m.insert("deviation".into(), json!(row.deviation));
                    m.insert("sigmas".into(), json!(row.sigmas));
                    Value::Object(m)
                })
                .collect();
            Ok(Report::new(json!({
                "conjecture": true,
                "note": "targets 1/(k+1) are conjectural, not theorems",
                "rows": flat,
            })))
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

fn render_csv(fields: &Map<String, Value>) -> String {
    if let Some(Value::Array(rows)) = fields.get("rows") {
        let header: Vec<String> = match rows.first() {
            Some(Value::Object(first)) => first.keys().cloned().collect(),
            _ => return String::new(),
        };
        let mut out = header.join(",") + "\n";
        for row in rows {
            let cells: Vec<String> = header.iter().map(|h| scalar(&row[h])).collect();
            out += &(cells.join(",") + "\n");
        }
        return out;
    }
    let keys: Vec<&String> = fields.keys().filter(|k| !fields[*k].is_object()).collect();
    let vals: Vec<String> = keys.iter().map(|k| scalar(&fields[*k])).collect();
    let keys: Vec<&str> = keys.iter().map(|k| k.as_str()).collect();
    format!("{}\n{}\n", keys.join(","), vals.join(","))
}

fn render_text(fields: &Map<String, Value>, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    for (k, v) in fields {
        match v {
            Value::Object(inner) => {
                out.push_str(&format!("{pad}{k}:\n"));
                render_text(inner, indent + 2, out);
            }
            Value::Array(items) if items.iter().all(Value::is_object) && !items.is_empty() => {
                out.push_str(&format!("{pad}{k}:\n"));
                for item in items {
                    let cells: Vec<String> = item
                        .as_object()
                        .into_iter()
                        .flatten()
                        .map(|(ik, iv)| format!("{ik}={}", scalar(iv)))
                        .collect();
                    out.push_str(&format!("{pad}  {}\n", cells.join(" ")));
                }
            }
            _ => out.push_str(&format!("{pad}{k}: {}\n", scalar(v))),
        }
    }
}

/// Runs a validated configuration and returns the exit code and rendered
/// output. Errors are rendered as `{"error": {"code", "message", ...}}`.
pub fn run(config: &RunConfig) -> (i32, String) {
    let start = Instant::now();
    let outcome = config
        .validate()
        .and_then(|()| with_threads(config.threads, || dispatch(config)));
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok(mut report) => {
            report
                .fields
                .insert("command".into(), to_value(&config.command));
            report.fields.insert("elapsed_ms".into(), json!(elapsed_ms));
            let text = match config.output {
                OutputFormat::Json => {
                    serde_json::to_string_pretty(&Value::Object(report.fields)).expect("json")
                        + "\n"
                }
                OutputFormat::Csv => report.csv.unwrap_or_else(|| render_csv(&report.fields)),
                OutputFormat::Text => {
                    let mut out = String::new();
                    render_text(&report.fields, 0, &mut out);
                    out
                }
            };
            (0, text)
        }
        Err(e) => (e.exit_code(), render_error(&e)),
    }
}

/// JSON error object for failures outside [`run`], such as argument errors.
pub fn render_error(e: &Error) -> String {
    serde_json::to_string_pretty(&error_value(e)).expect("json") + "\n"
}
