//! The `jrl` command line: `eval` evaluates one special function, `reduce`
//! runs the reduction on a request file, `verify` runs a verification suite.
//!
//! Every command prints one JSON document carrying `"schema": 1`. Exit codes
//! are 0 when everything passes, 1 when a check or computation fails and 2
//! for configuration errors (bad flags, unreadable or invalid request files).

mod report;
mod request;
mod suites;

pub use report::{cjson, Bound, Check, Report, Summary};
pub use request::{
    AlgebraDesc, CombinationDesc, InsertionDesc, MonomialDesc, ParamsDesc, RequestFile, StateDesc, TermDesc,
    TruncationDesc, TwistDesc, SCHEMA,
};
pub use suites::{run_suite, Suite};

use crate::reduction::{kz_residual, kz_residual_perturbed, reduce_full, CoboundaryVariant, CoefficientLedger};
use crate::specfun::{
    eisenstein, eisenstein_tilde, eisenstein_twisted, weier_p, weier_p_deformed, weier_p_tilde, weier_p_twisted,
    AnnulusPoint, ModularPoint, Truncation, TwistPair,
};
use crate::voa::npoint_oracle;
use crate::{Complex64, Error};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "jrl", version, about = "Jacobi n-point functions by direct trace and by reduction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate an Eisenstein or Weierstrass-type function.
    Eval(EvalArgs),
    /// Reduce the n-point function described by a request file.
    Reduce(ReduceArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FnName {
    #[value(name = "E")]
    E,
    #[value(name = "Etwist")]
    Etwist,
    #[value(name = "Etilde")]
    Etilde,
    #[value(name = "P")]
    P,
    #[value(name = "Ptwist")]
    Ptwist,
    #[value(name = "Ptilde")]
    Ptilde,
    #[value(name = "Pdeformed")]
    Pdeformed,
}

#[derive(Debug, clap::Args)]
pub struct EvalArgs {
    #[arg(long = "fn", value_enum)]
    pub function: FnName,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<i64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub theta: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub phi: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub w: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub z: Option<Complex64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0.5i")]
    pub tau: Complex64,
    #[arg(long = "n-q", env = "JRL_DEFAULT_NQ", default_value_t = 60)]
    pub n_q: usize,
    #[arg(long = "n-mode", default_value_t = 64)]
    pub n_mode: usize,
}

#[derive(Debug, clap::Args)]
pub struct ReduceArgs {
    pub request: PathBuf,
    /// Also report the KZ residual for this coboundary variant: `main`,
    /// `simplest`, `super` or `shifted:λ:μ`.
    #[arg(long, value_parser = parse_variant)]
    pub variant: Option<CoboundaryVariant>,
    /// Include the coefficient ledger.
    #[arg(long)]
    pub ledger: bool,
    /// Compare against the direct trace.
    #[arg(long)]
    pub oracle: bool,
    /// Default `n_q` when the request file has none.
    #[arg(long = "n-q", env = "JRL_DEFAULT_NQ", default_value_t = 60)]
    pub n_q: usize,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    /// Replaces every upper-bound tolerance.
    #[arg(long, env = "JRL_DEFAULT_TOL")]
    pub tol: Option<f64>,
    /// Worker threads; defaults to rayon's choice.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Record wall-clock runtime in the summary (the report is then no
    /// longer byte-stable).
    #[arg(long)]
    pub timing: bool,
}

/// Parses `a+bi` shorthand: `0.5i`, `-i`, `1.3+0.05i`, `2`, `1e-3-2e-2i`.
pub fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse {s:?} as a complex number (use a+bi)");
    let num = |x: &str| x.parse::<f64>().map_err(|_| bad());
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return Ok(Complex64::new(num(&t)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| (bytes[p] == b'+' || bytes[p] == b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(p) => (num(&body[..p])?, &body[p..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => num(x)?,
    };
    Ok(Complex64::new(re, im))
}

fn parse_variant(s: &str) -> std::result::Result<CoboundaryVariant, String> {
    match s {
        "main" => Ok(CoboundaryVariant::Main),
        "simplest" => Ok(CoboundaryVariant::Simplest),
        "super" => Ok(CoboundaryVariant::Super),
        _ => {
            let parts: Vec<&str> = s.split(':').collect();
            match parts.as_slice() {
                ["shifted", l, m] => Ok(CoboundaryVariant::Shifted {
                    lambda: l.parse().map_err(|_| format!("bad λ in {s:?}"))?,
                    mu: m.parse().map_err(|_| format!("bad μ in {s:?}"))?,
                }),
                _ => Err(format!("unknown variant {s:?} (main, simplest, super, shifted:λ:μ)")),
            }
        }
    }
}

/// Parses `args` (program name first) and runs the command, writing the
/// report to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Eval(a) => cmd_eval(&a),
        Command::Reduce(a) => cmd_reduce(&a),
        Command::Verify(a) => cmd_verify(&a),
    };
    match outcome {
        Ok((doc, code)) => {
            let _ = writeln!(out, "{doc}");
            code
        }
        Err(Failure::Config(e)) => {
            let _ = writeln!(err, "configuration error: {e}");
            EXIT_CONFIG
        }
        Err(Failure::Compute(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAIL
        }
    }
}

enum Failure {
    Config(Error),
    Compute(Error),
}

#[derive(Serialize)]
struct EvalReport {
    schema: u32,
    command: &'static str,
    function: String,
    params: Value,
    value: Value,
    truncation: Truncation,
    truncation_error: f64,
}

fn cmd_eval(a: &EvalArgs) -> std::result::Result<(String, i32), Failure> {
    let config = Failure::Config;
    let index = match (a.k, a.m) {
        (Some(k), Some(m)) if k != m => {
            return Err(config(Error::InvalidParameter(format!("--k {k} and --m {m} disagree"))));
        }
        (k, m) => k.or(m),
    };
    let need = |what: &str| Error::InvalidParameter(format!("--fn {:?} needs --{what}", a.function));
    let index = index.ok_or_else(|| config(need("k")))?;
    let tr = Truncation::new(a.n_q, a.n_mode, Truncation::default().tol).map_err(config)?;
    let tau = ModularPoint::new(a.tau).map_err(config)?;
    let lambda = || a.lambda.ok_or_else(|| config(need("lambda")));
    let z = || a.z.ok_or_else(|| config(need("z")));
    let w = || a.w.ok_or_else(|| config(need("w")));
    let point = || AnnulusPoint::new(w()?, tau).map_err(Failure::Compute);
    let compute = Failure::Compute;
    let mut params = json!({"k": index, "tau": cjson(a.tau)});
    let value = match a.function {
        FnName::E => eisenstein(index, &tau, &tr),
        FnName::Etwist => {
            params["lambda"] = json!(lambda()?);
            eisenstein_twisted(index, lambda()?, &tau, &tr)
        }
        FnName::Etilde => {
            params["z"] = cjson(z()?);
            eisenstein_tilde(index, z()?, &tau, &tr).map_err(compute)?
        }
        FnName::P => {
            params["w"] = cjson(w()?);
            weier_p(index, &point()?, &tr).map_err(compute)?
        }
        FnName::Ptwist => {
            params["w"] = cjson(w()?);
            params["lambda"] = json!(lambda()?);
            weier_p_twisted(index, lambda()?, &point()?, &tr).map_err(compute)?
        }
        FnName::Ptilde => {
            params["w"] = cjson(w()?);
            params["z"] = cjson(z()?);
            weier_p_tilde(index, &point()?, z()?, &tr).map_err(compute)?
        }
        FnName::Pdeformed => {
            let one = Complex64::new(1.0, 0.0);
            let twist = TwistPair::from_phi(a.theta.unwrap_or(one), a.phi.unwrap_or(one)).map_err(config)?;
            params["w"] = cjson(w()?);
            params["theta"] = cjson(twist.theta());
            params["phi"] = cjson(twist.phi());
            weier_p_deformed(index, &twist, &point()?, &tr).map_err(compute)?
        }
    };
    let name = a.function.to_possible_value().expect("named").get_name().to_string();
    let report = EvalReport {
        schema: SCHEMA,
        command: "eval",
        function: name,
        params,
        value: cjson(value),
        truncation: tr,
        truncation_error: tau.truncation_error(&tr),
    };
    Ok((serde_json::to_string_pretty(&report).expect("serializes"), EXIT_PASS))
}

#[derive(Serialize)]
struct ReduceReport {
    schema: u32,
    command: &'static str,
    value: Value,
    checks: Vec<Check>,
    summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    ledger: Option<CoefficientLedger>,
}

fn cmd_reduce(a: &ReduceArgs) -> std::result::Result<(String, i32), Failure> {
    let text = std::fs::read_to_string(&a.request)
        .map_err(|e| Failure::Config(Error::Parse(format!("{}: {e}", a.request.display()))))?;
    let file = RequestFile::from_json(&text).map_err(Failure::Config)?;
    let req = file.to_request(a.n_q).map_err(Failure::Config)?;
    let (value, ledger) = reduce_full(&req).map_err(Failure::Compute)?;
    let mut checks = Vec::new();
    if a.oracle {
        let o = npoint_oracle(&req.oracle()).map_err(Failure::Compute)?;
        let d = (o - value).norm();
        let r = if d == 0.0 { 0.0 } else { d / o.norm().max(value.norm()) };
        checks.push(Check::new("oracle_equivalence", json!({}), json!({"oracle": cjson(o)}), r, 1e-4));
    }
    if let Some(v) = a.variant {
        let params = serde_json::to_value(v).expect("variant");
        let r = kz_residual(&req, v).map_err(Failure::Compute)?;
        checks.push(Check::new("kz", params.clone(), json!(null), r, 1e-8));
        let mut pp = params;
        pp["scale"] = json!(1.01);
        let r = kz_residual_perturbed(&req, v, 1.01).map_err(Failure::Compute)?;
        checks.push(Check::bounded("kz_perturbed", pp, json!(null), r, 1e-3, Bound::Lower));
    }
    let summary = Report::new("reduce", None, checks.clone()).summary;
    let code = if summary.failed == 0 { EXIT_PASS } else { EXIT_FAIL };
    let report = ReduceReport {
        schema: SCHEMA,
        command: "reduce",
        value: cjson(value),
        checks,
        summary,
        ledger: a.ledger.then_some(ledger),
    };
    Ok((serde_json::to_string_pretty(&report).expect("serializes"), code))
}

fn cmd_verify(a: &VerifyArgs) -> std::result::Result<(String, i32), Failure> {
    if let Some(t) = a.tol {
        if !(t >= 0.0) {
            return Err(Failure::Config(Error::InvalidParameter(format!("--tol must be ≥ 0, got {t}"))));
        }
    }
    let start = Instant::now();
    let mut report = match a.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::Config(Error::InvalidParameter(e.to_string())))?
            .install(|| run_suite(a.suite, a.tol)),
        None => run_suite(a.suite, a.tol),
    };
    if a.timing {
        report.summary.runtime = Some(start.elapsed().as_secs_f64());
    }
    let code = if report.all_pass() { EXIT_PASS } else { EXIT_FAIL };
    Ok((report.to_json(), code))
}

/// Runs a command and returns `(exit code, stdout, stderr)`.
pub fn run_captured<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(args, &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&err).into_owned())
}
