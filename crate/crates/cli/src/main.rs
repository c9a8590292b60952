//! `orthochart`: build chart ideals, compute Gröbner bases and run the
//! chart checks from the command line.
//!
//! Exit codes: 0 when every requested check passes, 1 when a check fails,
//! 2 for usage and input errors, 3 when a computation runs out of budget,
//! 4 when the output cannot be written.

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orthochart::arith::{Field, PrimeField, Rational, Rationals, DEFAULT_MODULUS};
use orthochart::groebner::{Budget, GbOptions};
use orthochart::ideal::{Ideal, IdealError};
use orthochart::local_model::{local_model, Fiber};
use orthochart::poly::{MonomialOrder, PolyRing};
use orthochart::verifier::*;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "orthochart", version, about = "Affine charts of orthogonal local models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the chart ideals as JSON.
    Build {
        #[command(flatten)]
        chart: ChartArgs,
        #[arg(long, value_enum, default_value_t = FiberArg::Arithmetic)]
        fiber: FiberArg,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Print the reduced Gröbner basis of an ideal read from a file.
    Gb {
        /// Text file with one polynomial per line (`#` starts a comment),
        /// or a chart JSON file written by `build`.
        #[arg(long)]
        input: PathBuf,
        /// Ideal to take from a chart JSON file: naive, add, full,
        /// intermediate, reduced or a component label such as I1.
        #[arg(long, default_value = "reduced")]
        ideal: String,
        /// Comma-separated variable order; inferred from the input when
        /// omitted.
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
        /// grlex, lex or block(k).
        #[arg(long, default_value = "grlex", value_parser = parse_order)]
        order: MonomialOrder,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run one check, or all of them, on a chart.
    Verify {
        #[command(flatten)]
        chart: ChartArgs,
        /// reduction, dimensions, flatness, special-fiber, lemma:NAME or all.
        #[arg(long, default_value = "all")]
        check: String,
        #[command(flatten)]
        verifier: VerifierArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run every check on a list of charts.
    Suite {
        /// Charts as `d,l` pairs separated by `;`, for example `6,2;5,3`.
        #[arg(long)]
        charts: Option<String>,
        #[command(flatten)]
        verifier: VerifierArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args, Debug)]
struct ChartArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    l: usize,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Coefficient field: an odd prime, or 0 for the rationals.
    #[arg(long, default_value_t = DEFAULT_MODULUS)]
    modulus: u64,
    /// Budget in seconds for each Gröbner computation.
    #[arg(long, env = "ORTHOCHART_TIMEOUT")]
    timeout: Option<f64>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct VerifierArgs {
    /// Report zero for every check duration so reports are byte-stable.
    #[arg(long)]
    no_timings: bool,
    /// Largest d for which checks over the full ring of X run.
    #[arg(long, default_value_t = 6)]
    full_ring_max_d: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FiberArg {
    Arithmetic,
    Special,
    Generic,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

fn parse_order(s: &str) -> Result<MonomialOrder, String> {
    MonomialOrder::parse(s).ok_or_else(|| format!("unknown order `{s}`; use grlex, lex or block(k)"))
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Timeout(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Timeout(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Timeout(m) => write!(f, "timeout: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl From<IdealError> for CliError {
    fn from(e: IdealError) -> Self {
        if e.is_timeout() {
            CliError::Timeout(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

fn usage(e: impl fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Output text plus the exit code it carries.
struct Outcome {
    text: String,
    code: u8,
}

fn gb_options(common: &CommonArgs) -> Result<GbOptions, CliError> {
    let budget = match common.timeout {
        None => Budget::unlimited(),
        Some(s) if s.is_finite() && s > 0.0 => Budget::with_timeout(Duration::from_secs_f64(s)),
        Some(s) => return Err(usage(format!("timeout must be a positive number of seconds, got {s}"))),
    };
    Ok(GbOptions { budget, ..GbOptions::default() })
}

fn verifier_config(common: &CommonArgs, args: &VerifierArgs) -> Result<VerifierConfig, CliError> {
    Ok(VerifierConfig { gb: gb_options(common)?, record_timings: !args.no_timings, full_ring_max_d: args.full_ring_max_d })
}

/// Runs `body` over the field selected by `modulus`.
macro_rules! with_field {
    ($modulus:expr, |$field:ident| $body:expr) => {
        if $modulus == 0 {
            let $field = Rationals;
            $body
        } else {
            let $field = PrimeField::new($modulus).map_err(|_| usage(format!("modulus must be 0 or an odd prime below 2^31, got {}", $modulus)))?;
            $body
        }
    };
}

fn build<F: Field>(chart: &ChartArgs, fiber: FiberArg, field: F) -> Result<Outcome, CliError> {
    let model = local_model(chart.d, chart.l, field).map_err(usage)?;
    let fiber = match fiber {
        FiberArg::Arithmetic => Fiber::Arithmetic,
        FiberArg::Special => Fiber::Special,
        FiberArg::Generic => Fiber::Generic(Rational::one()),
    };
    let value = model.chart_json(&fiber).map_err(usage)?;
    Ok(Outcome { text: pretty(&value), code: 0 })
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json value prints");
    s.push('\n');
    s
}

/// Generators and declared variables of the requested input.
fn read_input(path: &PathBuf, ideal: &str) -> Result<(Vec<String>, Option<Vec<String>>), CliError> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    if !text.trim_start().starts_with('{') {
        let gens = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect();
        return Ok((gens, None));
    }
    let chart: Value = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let ideals = &chart["ideals"];
    let (gens, var_key) = match ideal {
        "naive" | "add" | "full" | "intermediate" => (&ideals[ideal], "variables"),
        "reduced" => (&ideals["reduced"], "reduced_variables"),
        label => {
            let comp = ideals["components"]
                .as_array()
                .and_then(|cs| cs.iter().find(|c| c["label"] == label))
                .ok_or_else(|| usage(format!("no ideal `{label}` in {}", path.display())))?;
            (&comp["generators"], "reduced_variables")
        }
    };
    let strings = |v: &Value| -> Option<Vec<String>> {
        v.as_array()?.iter().map(|s| s.as_str().map(String::from)).collect()
    };
    let gens = strings(gens).ok_or_else(|| usage(format!("ideal `{ideal}` is missing from {}", path.display())))?;
    let vars = strings(&chart[var_key]).ok_or_else(|| usage(format!("`{var_key}` is missing from {}", path.display())))?;
    Ok((gens, Some(vars)))
}

/// Variable names in order of first appearance: an identifier followed by
/// any number of bracketed indices.
fn infer_variables(gens: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for g in gens {
        let b = g.as_bytes();
        let mut k = 0;
        while k < b.len() {
            if b[k].is_ascii_alphabetic() || b[k] == b'_' {
                let start = k;
                while k < b.len() && (b[k].is_ascii_alphanumeric() || b[k] == b'_') {
                    k += 1;
                }
                while k < b.len() && b[k] == b'[' {
                    match g[k..].find(']') {
                        Some(close) => k += close + 1,
                        None => break,
                    }
                }
                let name = &g[start..k];
                if !out.iter().any(|v| v == name) {
                    out.push(name.to_string());
                }
            } else {
                k += 1;
            }
        }
    }
    out
}

fn gb<F: Field>(
    gens: &[String],
    vars: Vec<String>,
    order: MonomialOrder,
    opts: &GbOptions,
    format: Format,
    field: F,
) -> Result<Outcome, CliError> {
    let modulus = field.tag().modulus();
    let ring = PolyRing::from_names(field, vars.clone(), order).map_err(usage)?;
    let polys = gens.iter().map(|g| ring.parse(g).map_err(|e| usage(format!("`{g}`: {e}")))).collect::<Result<Vec<_>, _>>()?;
    let basis = Ideal::new(&ring, polys).map_err(usage)?.groebner(opts)?;
    let lines: Vec<String> = basis.polys().iter().map(|p| p.to_string()).collect();
    let text = match format {
        Format::Json => pretty(&json!({
            "basis": lines,
            "modulus": modulus,
            "order": order.name(),
            "variables": vars,
        })),
        Format::Text => {
            let mut s = format!("# variables: {}\n# order: {}\n# modulus: {modulus}\n", vars.join(", "), order.name());
            for l in &lines {
                s.push_str(l);
                s.push('\n');
            }
            s
        }
    };
    Ok(Outcome { text, code: 0 })
}

/// Exit code of a set of check results: failures win over timeouts.
fn checks_code<'a>(checks: impl IntoIterator<Item = &'a CheckResult>) -> u8 {
    let statuses: Vec<Status> = checks.into_iter().map(|c| c.status).collect();
    if statuses.contains(&Status::Fail) {
        1
    } else if statuses.contains(&Status::Timeout) {
        3
    } else if statuses.contains(&Status::Pass) {
        0
    } else {
        1
    }
}

fn verify<F: Field>(chart: &ChartArgs, check: &str, config: &VerifierConfig, format: Format, field: F) -> Result<Outcome, CliError> {
    let data = ChartData::build(chart.d, chart.l, field).map_err(usage)?;
    let mut report = verify_chart(&data, config);
    if check != "all" {
        let name = match check.strip_prefix("lemma:") {
            Some(lemma) if LEMMAS.contains(&lemma) => check.to_string(),
            None if LEMMAS.contains(&check) => format!("lemma:{check}"),
            None if ["reduction", "dimensions", "flatness", "special-fiber"].contains(&check) => check.to_string(),
            _ => return Err(usage(format!("unknown check `{check}`"))),
        };
        report.checks.retain(|c| c.name == name);
    }
    let code = checks_code(&report.checks);
    let text = match format {
        Format::Json => format!("{}\n", report.to_json()),
        Format::Text => report.to_text(),
    };
    Ok(Outcome { text, code })
}

fn parse_charts(list: &str) -> Result<Vec<(usize, usize)>, CliError> {
    list.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let inner = pair.trim_start_matches('(').trim_end_matches(')');
            let mut parts = inner.split(',').map(|p| p.trim().parse::<usize>());
            match (parts.next(), parts.next(), parts.next()) {
                (Some(Ok(d)), Some(Ok(l)), None) => Ok((d, l)),
                _ => Err(usage(format!("bad chart `{pair}`; expected d,l"))),
            }
        })
        .collect()
}

fn suite(charts: &[(usize, usize)], modulus: u64, config: &VerifierConfig, format: Format) -> Result<Outcome, CliError> {
    let report = run_suite(charts, modulus, config).map_err(usage)?;
    let code = match report.aggregate {
        Aggregate::Pass => 0,
        Aggregate::NoChecksRun => 1,
        Aggregate::Fail if report.failing.is_empty() => 3,
        Aggregate::Fail => 1,
    };
    let text = match format {
        Format::Json => format!("{}\n", report.to_json()),
        Format::Text => report.to_text(),
    };
    Ok(Outcome { text, code })
}

fn run(cli: Cli) -> Result<(Outcome, Option<PathBuf>), CliError> {
    match cli.command {
        Command::Build { chart, fiber, common } => {
            let out = with_field!(common.modulus, |field| build(&chart, fiber, field)?);
            Ok((out, common.output))
        }
        Command::Gb { input, ideal, vars, order, common } => {
            let opts = gb_options(&common)?;
            let (gens, declared) = read_input(&input, &ideal)?;
            let vars = vars.or(declared).unwrap_or_else(|| infer_variables(&gens));
            let out = with_field!(common.modulus, |field| gb(&gens, vars, order, &opts, common.format, field)?);
            Ok((out, common.output))
        }
        Command::Verify { chart, check, verifier, common } => {
            let config = verifier_config(&common, &verifier)?;
            let out = with_field!(common.modulus, |field| verify(&chart, &check, &config, common.format, field)?);
            Ok((out, common.output))
        }
        Command::Suite { charts, verifier, common } => {
            let config = verifier_config(&common, &verifier)?;
            let charts = match charts {
                Some(list) => parse_charts(&list)?,
                None => DEFAULT_SUITE.to_vec(),
            };
            if common.modulus != 0 {
                PrimeField::new(common.modulus).map_err(|_| usage(format!("modulus must be 0 or an odd prime below 2^31, got {}", common.modulus)))?;
            }
            let out = suite(&charts, common.modulus, &config, common.format)?;
            Ok((out, common.output))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, path)) => {
            let written = match &path {
                Some(p) => fs::write(p, &out.text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
                None => {
                    print!("{}", out.text);
                    Ok(())
                }
            };
            match written {
                Ok(()) => ExitCode::from(out.code),
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(e.code())
                }
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
