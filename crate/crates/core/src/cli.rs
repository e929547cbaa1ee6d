//! Command-line surface. Every command returns a [`Document`]; the binary prints
//! it as JSON or CSV and maps errors onto exit codes.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::calibration::Calibration;
use crate::charsum::{all_char_sums_fft, all_char_sums_naive};
use crate::error::{Error, Result};
use crate::modarith::{Parity, PrimeModulus, DEFAULT_MEMORY_CAP};
use crate::moments::{moment_from_table, rmf_moment_grid, shape_fit_moments, Divisor};
use crate::proxy::{build_params, DeskProfile, Profile, ProfileSpec};
use crate::theta::{theta_all, theta_moment_from};
use crate::verify::{all_pass, run_suite, Suite, SuiteConfig};

pub const SCHEMA: &str = "charmoments/v1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fft,
    Naive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DivisorArg {
    Phi,
    QMinus2,
}

impl From<DivisorArg> for Divisor {
    fn from(d: DivisorArg) -> Self {
        match d {
            DivisorArg::Phi => Divisor::Phi,
            DivisorArg::QMinus2 => Divisor::NonPrincipal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileArg {
    Paper,
    Desk,
}

#[derive(Debug, Parser)]
#[command(
    name = "charmoments",
    version,
    about = "Moments of character sums and random multiplicative functions"
)]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Calibration file; falls back to $CHARMOMENTS_CALIBRATION.
    #[arg(long, global = true)]
    pub calibration: Option<PathBuf>,
    /// Byte budget for per-modulus tables.
    #[arg(long, global = true, default_value_t = DEFAULT_MEMORY_CAP)]
    pub memory_cap: u64,
    /// Leave wall time out of the document, so reruns are byte-identical.
    #[arg(long, global = true)]
    pub omit_timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Average of |sum_{n<=x} chi(n)|^{2k} over characters modulo a prime.
    CharMoment(CharMomentArgs),
    /// Monte-Carlo moments of Steinhaus partial sums.
    RmfMc(RmfMcArgs),
    /// Run a named check suite.
    Verify(VerifyArgs),
    /// Even and odd theta moments over a grid of primes.
    Theta(ThetaArgs),
    /// Dump the level chain of the proxy construction.
    Proxy(ProxyArgs),
    /// Fit log(moment / x^k) against log log x.
    Shape(ShapeArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct CharMomentArgs {
    #[arg(long)]
    pub q: u64,
    /// Values, comma lists or lo:hi:step ranges; repeatable.
    #[arg(long, required = true)]
    pub x: Vec<String>,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, value_enum, default_value_t = DivisorArg::Phi)]
    pub divisor: DivisorArg,
    #[arg(long, value_enum, default_value_t = Method::Fft)]
    pub method: Method,
    /// Keep the principal character in the average.
    #[arg(long)]
    pub include_principal: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct RmfMcArgs {
    #[arg(long, required = true)]
    pub x: Vec<String>,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 101)]
    pub q: u64,
    #[arg(long, default_value_t = 10.0)]
    pub x: f64,
    #[arg(long, default_value_t = 2.0)]
    pub k: f64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 4000)]
    pub trials: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct ThetaArgs {
    #[arg(long, required = true)]
    pub q: Vec<String>,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ProxyArgs {
    /// `log x`; use this for x beyond floating-point range.
    #[arg(long, conflicts_with = "x")]
    pub log_x: Option<f64>,
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub k: f64,
    #[arg(long)]
    pub c0: f64,
    #[arg(long, value_enum, default_value_t = ProfileArg::Desk)]
    pub profile: ProfileArg,
    /// Desk truncation indices J_1..J_M; repeatable.
    #[arg(long = "j")]
    pub js: Vec<u32>,
    /// Desk ratio between consecutive log y_m.
    #[arg(long, default_value_t = 20.0)]
    pub ratio: f64,
    /// Desk modulus for the length constraint.
    #[arg(long)]
    pub q: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct ShapeArgs {
    #[arg(long, required = true)]
    pub x: Vec<String>,
    #[arg(long, default_value_t = 2.0)]
    pub k: f64,
    #[arg(long, default_value_t = 2000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fit synthetic moments x^k (log x)^E instead of sampling.
    #[arg(long)]
    pub synthetic: Option<f64>,
}

/// Parses `a,b,c` and `lo:hi:step` (inclusive) forms.
pub fn parse_grid(items: &[String]) -> Result<Vec<f64>> {
    let bad = |s: &str| Error::InvalidArgument(format!("cannot parse grid item {s:?}"));
    let mut out = Vec::new();
    for item in items {
        for part in item.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let fields: Vec<&str> = part.split(':').collect();
            match fields.as_slice() {
                [v] => out.push(v.parse::<f64>().map_err(|_| bad(part))?),
                [lo, hi, step] => {
                    let (lo, hi, step) = (
                        lo.parse::<f64>().map_err(|_| bad(part))?,
                        hi.parse::<f64>().map_err(|_| bad(part))?,
                        step.parse::<f64>().map_err(|_| bad(part))?,
                    );
                    if !(step > 0.0) || hi < lo {
                        return Err(bad(part));
                    }
                    let n = ((hi - lo) / step + 1e-9).floor() as usize;
                    out.extend((0..=n).map(|i| lo + step * i as f64));
                }
                _ => return Err(bad(part)),
            }
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    Ok(out)
}

fn parse_int_grid(items: &[String]) -> Result<Vec<u64>> {
    parse_grid(items)?
        .into_iter()
        .map(|v| {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as u64)
            } else {
                Err(Error::InvalidArgument(format!("{v} is not a non-negative integer")))
            }
        })
        .collect()
}

/// Command output: a JSON payload plus a flat table for CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub command: &'static str,
    pub config: Value,
    pub seed: Option<u64>,
    pub result: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub all_pass: Option<bool>,
}

impl Document {
    pub fn to_json(&self, wall_time: Option<f64>) -> Value {
        let mut v = json!({
            "schema": SCHEMA,
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "result": self.result,
        });
        if let Some(all) = self.all_pass {
            v["all_pass"] = json!(all);
        }
        if let Some(t) = wall_time {
            v["wall_time_s"] = json!(t);
        }
        v
    }

    pub fn to_csv(&self) -> String {
        let cell = |v: &Value| match v {
            Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.iter().map(cell).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }
}

fn char_moment_cmd(a: &CharMomentArgs, memory_cap: u64) -> Result<Document> {
    let m = PrimeModulus::with_memory_cap(a.q, memory_cap)?;
    let xs = parse_grid(&a.x)?;
    if !(a.k >= 0.0) || !a.k.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "k must be a finite real >= 0, got {}",
            a.k
        )));
    }
    let divisor: Divisor = a.divisor.into();
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for &x in &xs {
        let table = match a.method {
            Method::Fft => all_char_sums_fft(&m, x)?,
            Method::Naive => all_char_sums_naive(&m, x)?,
        };
        let est = moment_from_table(&table, a.k, !a.include_principal, divisor);
        rows.push(vec![
            json!(a.q),
            json!(x),
            json!(a.k),
            json!(divisor),
            json!(est.value),
            json!(a.method),
        ]);
        results.push(
            json!({"q": a.q, "x": x, "k": a.k, "divisor": divisor, "moment": est.value,
                            "characters": est.trials, "method": a.method}),
        );
    }
    Ok(Document {
        command: "char-moment",
        config: serde_json::to_value(a).unwrap_or(Value::Null),
        seed: None,
        result: Value::Array(results),
        header: vec!["q", "x", "k", "divisor", "moment", "method"],
        rows,
        all_pass: None,
    })
}

fn rmf_mc_cmd(a: &RmfMcArgs) -> Result<Document> {
    let xs = parse_grid(&a.x)?;
    let est = rmf_moment_grid(&xs, a.k, a.trials, a.seed)?;
    let rows = xs
        .iter()
        .zip(&est)
        .map(|(x, e)| {
            vec![
                json!(x),
                json!(a.k),
                json!(a.trials),
                json!(a.seed),
                json!(e.value),
                json!(e.stderr),
            ]
        })
        .collect();
    let results: Vec<Value> = xs
        .iter()
        .zip(&est)
        .map(|(x, e)| json!({"x": x, "k": a.k, "estimate": e.value, "stderr": e.stderr, "trials": e.trials}))
        .collect();
    Ok(Document {
        command: "rmf-mc",
        config: serde_json::to_value(a).unwrap_or(Value::Null),
        seed: Some(a.seed),
        result: Value::Array(results),
        header: vec!["x", "k", "trials", "seed", "estimate", "stderr"],
        rows,
        all_pass: None,
    })
}

fn verify_cmd(a: &VerifyArgs, cal: Calibration) -> Result<Document> {
    let suite: Suite = a.suite.parse()?;
    let cfg = SuiteConfig {
        q: a.q,
        x: a.x,
        k: a.k,
        seed: a.seed,
        trials: a.trials,
        calibration: cal,
    };
    let reports = run_suite(suite, &cfg)?;
    let rows = reports
        .iter()
        .map(|r| {
            vec![
                json!(r.name),
                json!(r.relation),
                json!(r.lhs),
                json!(r.rhs),
                json!(r.tolerance),
                json!(r.pass),
            ]
        })
        .collect();
    Ok(Document {
        command: "verify",
        config: json!({"args": a, "calibration": cal}),
        seed: Some(a.seed),
        result: json!({"suite": suite, "reports": reports}),
        header: vec!["name", "relation", "lhs", "rhs", "tolerance", "pass"],
        rows,
        all_pass: Some(all_pass(&reports)),
    })
}

fn theta_cmd(a: &ThetaArgs, memory_cap: u64) -> Result<Document> {
    let qs = parse_int_grid(&a.q)?;
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for &q in &qs {
        let m = PrimeModulus::with_memory_cap(q, memory_cap)?;
        let th = theta_all(&m)?;
        let even = theta_moment_from(&th, q, a.k, Parity::Even).value;
        let odd = theta_moment_from(&th, q, a.k, Parity::Odd).value;
        let ratio = odd / even;
        rows.push(vec![json!(q), json!(a.k), json!(even), json!(odd), json!(ratio)]);
        results.push(
            json!({"q": q, "k": a.k, "even_moment": even, "odd_moment": odd, "odd_over_even": ratio,
                            "truncation_point": th[0].truncation_point}),
        );
    }
    Ok(Document {
        command: "theta",
        config: serde_json::to_value(a).unwrap_or(Value::Null),
        seed: None,
        result: Value::Array(results),
        header: vec!["q", "k", "even_moment", "odd_moment", "odd_over_even"],
        rows,
        all_pass: None,
    })
}

fn proxy_cmd(a: &ProxyArgs) -> Result<Document> {
    let log_x = match (a.log_x, a.x) {
        (Some(l), _) => l,
        (None, Some(x)) if x > 1.0 => x.ln(),
        _ => return Err(Error::InvalidArgument("give --log-x or --x > 1".into())),
    };
    let spec = match a.profile {
        ProfileArg::Paper => ProfileSpec::Paper,
        ProfileArg::Desk => {
            if a.js.is_empty() {
                return Err(Error::InvalidArgument("desk profile needs at least one --j".into()));
            }
            ProfileSpec::Desk(DeskProfile {
                js: a.js.clone(),
                ratio: a.ratio,
                modulus: a.q,
            })
        }
    };
    let p = build_params(log_x, a.k, a.c0, &spec)?;
    let rows = p
        .levels
        .iter()
        .map(|l| vec![json!(l.m), json!(l.log_lower), json!(l.log_upper), json!(l.j)])
        .collect();
    let result = json!({
        "params": p,
        "levels": p.num_levels(),
        "max_shift": p.max_shift(),
        "log_length_paper": p.paper_length_log(),
        "log_length_desk": p.desk_length_log(),
        "log_length_surrogate": p.surrogate_length_log(),
        "profile": match p.profile { Profile::Paper => "paper", Profile::Desk => "desk" },
    });
    Ok(Document {
        command: "proxy",
        config: serde_json::to_value(a).unwrap_or(Value::Null),
        seed: None,
        result,
        header: vec!["m", "log_y_lower", "log_y_upper", "j"],
        rows,
        all_pass: None,
    })
}

fn shape_cmd(a: &ShapeArgs) -> Result<Document> {
    let xs = parse_grid(&a.x)?;
    let (moments, source) = match a.synthetic {
        Some(e) => (
            xs.iter().map(|&x| x.powf(a.k) * x.ln().powf(e)).collect::<Vec<_>>(),
            "synthetic",
        ),
        None => (
            rmf_moment_grid(&xs, a.k, a.trials, a.seed)?
                .iter()
                .map(|m| m.value)
                .collect(),
            "rmf-mc",
        ),
    };
    let fit = shape_fit_moments(&xs, &moments, a.k)?;
    let (lo, hi) = fit.interval(1.96);
    Ok(Document {
        command: "shape",
        config: serde_json::to_value(a).unwrap_or(Value::Null),
        seed: a.synthetic.is_none().then_some(a.seed),
        result: json!({"fit": fit, "ci95": [lo, hi], "source": source, "x": xs, "moments": moments}),
        header: vec!["exponent", "intercept", "residual", "exponent_stderr", "ci_lo", "ci_hi"],
        rows: vec![vec![
            json!(fit.exponent),
            json!(fit.intercept),
            json!(fit.residual),
            json!(fit.exponent_stderr),
            json!(lo),
            json!(hi),
        ]],
        all_pass: None,
    })
}

/// Runs one parsed invocation.
pub fn execute(cli: &Cli) -> Result<Document> {
    let cal = Calibration::resolve(cli.calibration.as_deref())?;
    match &cli.command {
        Command::CharMoment(a) => char_moment_cmd(a, cli.memory_cap),
        Command::RmfMc(a) => rmf_mc_cmd(a),
        Command::Verify(a) => verify_cmd(a, cal),
        Command::Theta(a) => theta_cmd(a, cli.memory_cap),
        Command::Proxy(a) => proxy_cmd(a),
        Command::Shape(a) => shape_cmd(a),
    }
}

pub fn exit_code_for(err: &Error) -> i32 {
    if err.is_resource_guard() {
        EXIT_RESOURCE
    } else {
        EXIT_INVALID
    }
}

/// Executes and renders; returns the text to print and the exit code.
pub fn run(cli: &Cli) -> (String, i32) {
    let start = Instant::now();
    match execute(cli) {
        Ok(doc) => {
            let code = match doc.all_pass {
                Some(false) => EXIT_CHECK_FAILED,
                _ => EXIT_OK,
            };
            let text = match cli.format {
                Format::Json => {
                    let wall = (!cli.omit_timing).then(|| start.elapsed().as_secs_f64());
                    serde_json::to_string_pretty(&doc.to_json(wall)).expect("serialisable document") + "\n"
                }
                Format::Csv => doc.to_csv(),
            };
            (text, code)
        }
        Err(e) => (format!("error: {e}\n"), exit_code_for(&e)),
    }
}
