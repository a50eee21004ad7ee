//! `quadidem`: factor, verify, classify and brute-force singular 2×2
//! matrices over quadratic integer rings. Prints one JSON document on
//! standard output; the exit code carries the outcome class.

mod json;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use quadidem::toolkit::fundamental_unit;
use quadidem::{
    brute_force_factor, cohn_gate, factor_row, factor_singular, verify, Error, Form, GateVerdict, Mat2,
    QuadInt, RingSpec, SingularOptions, SingularOutcome, Trace, DEFAULT_BUDGET,
};
use serde::Serialize;
use serde_json::{json, Map, Value};

use json::{element_to_value, matrix_to_value, parse_factor_list, parse_matrix, parse_row_shorthand, MatrixArg};

const BUDGET_VAR: &str = "QUADIDEM_BUDGET";

#[derive(Parser)]
#[command(name = "quadidem", version, about = "Idempotent factorizations over quadratic integer rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RingArgs {
    /// Square-free d ≠ 0, 1.
    #[arg(long, allow_hyphen_values = true)]
    d: i64,
    /// Assert the half-integral basis (d ≡ 1 mod 4).
    #[arg(long)]
    half: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Factor a singular matrix into idempotents.
    Factor {
        #[command(flatten)]
        ring: RingArgs,
        /// Row-major JSON matrix, 2×2 or 1×2, entries as [c0, c1].
        #[arg(long, conflicts_with = "row", required_unless_present = "row")]
        matrix: Option<String>,
        /// Row shorthand "x0,x1 y0,y1".
        #[arg(long)]
        row: Option<String>,
    },
    /// Check that the factors are idempotent and multiply to the target.
    Verify {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long)]
        factors: String,
        #[arg(long)]
        target: String,
    },
    /// Report the ring's gate verdict and fundamental unit.
    Classify {
        #[command(flatten)]
        ring: RingArgs,
    },
    /// Bounded brute-force search over small idempotents.
    Oracle {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 2)]
        height: u32,
        #[arg(long, default_value_t = 3)]
        len: usize,
    },
}

/// Exit codes are part of the interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Code {
    Ok = 0,
    Rejected = 1,
    Unknown = 2,
    Invalid = 3,
    NotSingular = 4,
    Refused = 5,
}

#[derive(Serialize)]
struct StepOut {
    rule: String,
    detail: String,
}

/// Field order is the wire order.
#[derive(Serialize)]
struct Report {
    status: &'static str,
    factors: Vec<Value>,
    trace: Vec<StepOut>,
    diagnostics: Map<String, Value>,
}

struct Outcome {
    code: Code,
    report: Report,
}

impl Outcome {
    fn new(code: Code, status: &'static str) -> Self {
        Self { code, report: Report { status, factors: Vec::new(), trace: Vec::new(), diagnostics: Map::new() } }
    }

    fn diag(mut self, key: &str, value: Value) -> Self {
        self.report.diagnostics.insert(key.to_string(), value);
        self
    }

    fn failure(code: Code, message: impl Into<String>) -> Self {
        let status = match code {
            Code::Refused => "refused",
            Code::Unknown => "unknown",
            _ => "error",
        };
        Self::new(code, status).diag("error", Value::String(message.into()))
    }

    fn from_error(e: &Error) -> Self {
        let code = match e {
            Error::NotSingular => Code::NotSingular,
            Error::InvalidRing { .. } | Error::NotId2Imaginary(_) => Code::Refused,
            Error::SearchExhausted { .. } => Code::Unknown,
            _ => Code::Invalid,
        };
        let out = Self::failure(code, e.to_string());
        if let Error::NotId2Imaginary(_) = e {
            out.diag("gate", json!(GateVerdict::NotId2Imaginary.as_str())).diag("reason", json!(COHN_REASON))
        } else {
            out
        }
    }
}

const COHN_REASON: &str = "by Cohn's theorem an imaginary quadratic ring other than d = -1, -2, -3, -7, -11 \
is not GE2, so some singular 2x2 matrix is not a product of idempotents";

fn ring_of(args: &RingArgs) -> Result<RingSpec, Outcome> {
    let ring = RingSpec::new(args.d).map_err(|e| Outcome::from_error(&e))?;
    let wanted = if args.half { Form::Half } else { Form::Whole };
    if ring.form() != wanted {
        return Err(Outcome::failure(
            Code::Invalid,
            format!("d = {} uses the {} basis; --half must match d mod 4", args.d, ring.form().as_str()),
        ));
    }
    Ok(ring)
}

fn ring_value(ring: RingSpec) -> Value {
    json!({ "d": ring.d(), "form": ring.form().as_str() })
}

fn budget() -> Result<usize, Outcome> {
    match std::env::var(BUDGET_VAR) {
        Err(_) => Ok(DEFAULT_BUDGET),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(b) if b > 0 => Ok(b),
            _ => Err(Outcome::failure(Code::Invalid, format!("{BUDGET_VAR} must be a positive integer, got {s:?}"))),
        },
    }
}

fn factored(trace: &Trace, ring: RingSpec, budget: usize) -> Outcome {
    let factors: Vec<Mat2> = trace.factors().iter().map(|f| f.matrix().clone()).collect();
    // Independent re-check before anything is printed as a success.
    let checked = verify(&factors, trace.target()).map(|r| r.ok).unwrap_or(false);
    if !checked {
        return Outcome::failure(Code::Rejected, "produced factors failed independent verification");
    }
    let mut out = Outcome::new(Code::Ok, "factored")
        .diag("ring", ring_value(ring))
        .diag("budget", json!(budget))
        .diag("verified", json!(true))
        .diag("factor_count", json!(factors.len()))
        .diag("chain_lengths", json!(trace.chains().iter().map(|c| c.len()).collect::<Vec<_>>()));
    out.report.factors = factors.iter().map(matrix_to_value).collect();
    out.report.trace =
        trace.steps().iter().map(|s| StepOut { rule: s.rule.to_string(), detail: s.detail.clone() }).collect();
    out
}

fn run_factor(ring: &RingArgs, matrix: Option<String>, row: Option<String>) -> Result<Outcome, Outcome> {
    let ring = ring_of(ring)?;
    let budget = budget()?;
    let invalid = |e: json::JsonError| Outcome::failure(Code::Invalid, e.0);
    let arg = match (matrix, row) {
        (_, Some(text)) => {
            let (x, y) = parse_row_shorthand(ring, &text).map_err(invalid)?;
            MatrixArg::Row(x, y)
        }
        (Some(text), None) => parse_matrix(ring, &text).map_err(invalid)?,
        (None, None) => return Err(Outcome::failure(Code::Invalid, "one of --matrix or --row is required")),
    };
    let fail = |e: Error| Outcome::from_error(&e);
    match arg {
        MatrixArg::Row(x, y) => {
            let trace = factor_row(&x, &y, budget).map_err(fail)?;
            Ok(factored(&trace, ring, budget))
        }
        MatrixArg::Full(m) => {
            let opts = SingularOptions { budget, ..SingularOptions::default() };
            match factor_singular(&m, &opts).map_err(fail)? {
                SingularOutcome::Factored(trace) => Ok(factored(&trace, ring, budget)),
                SingularOutcome::Unknown(d) => Ok(Outcome::new(Code::Unknown, "unknown")
                    .diag("ring", ring_value(ring))
                    .diag("non_principal", json!(d.non_principal))
                    .diag("ansatz", json!(d.ansatz))
                    .diag("oracle", json!(d.oracle))),
            }
        }
    }
}

fn run_verify(ring: &RingArgs, factors: &str, target: &str) -> Result<Outcome, Outcome> {
    let ring = ring_of(ring)?;
    let invalid = |e: json::JsonError| Outcome::failure(Code::Invalid, e.0);
    let factors = parse_factor_list(ring, factors).map_err(invalid)?;
    let target = parse_matrix(ring, target).map_err(invalid)?.into_matrix();
    let report = verify(&factors, &target).map_err(|e| Outcome::from_error(&e))?;
    let failures: Vec<String> = report.failures.iter().map(ToString::to_string).collect();
    let (code, status) = if report.ok { (Code::Ok, "verified") } else { (Code::Rejected, "rejected") };
    let mut out = Outcome::new(code, status)
        .diag("ring", ring_value(ring))
        .diag("ok", json!(report.ok))
        .diag("failures", json!(failures));
    out.report.factors = factors.iter().map(matrix_to_value).collect();
    Ok(out)
}

fn run_classify(args: &RingArgs) -> Result<Outcome, Outcome> {
    // The refusal does not depend on the basis, so it wins over a --half mismatch.
    let ring = RingSpec::new(args.d).map_err(|e| Outcome::from_error(&e))?;
    let ring = if cohn_gate(ring) == GateVerdict::NotId2Imaginary { ring } else { ring_of(args)? };
    let verdict = cohn_gate(ring);
    let out = match verdict {
        GateVerdict::NotId2Imaginary => Outcome::new(Code::Refused, "refused").diag("reason", json!(COHN_REASON)),
        _ => Outcome::new(Code::Ok, "classified"),
    };
    let mut out = out.diag("ring", ring_value(ring)).diag("gate", json!(verdict.as_str()));
    if ring.is_real() {
        let unit: QuadInt = fundamental_unit(ring).map_err(|e| Outcome::from_error(&e))?;
        out = out.diag("fundamental_unit", element_to_value(&unit)).diag("fundamental_unit_text", json!(unit.to_string()));
    }
    Ok(out)
}

fn run_oracle(ring: &RingArgs, target: &str, height: u32, len: usize) -> Result<Outcome, Outcome> {
    let ring = ring_of(ring)?;
    if height == 0 || len == 0 {
        return Err(Outcome::failure(Code::Invalid, "--height and --len must be positive"));
    }
    let target = parse_matrix(ring, target).map_err(|e| Outcome::failure(Code::Invalid, e.0))?.into_matrix();
    let found = brute_force_factor(&target, height, len).map_err(|e| Outcome::from_error(&e))?;
    let bounds = json!({ "height": height, "len": len });
    Ok(match found {
        Some(factors) => {
            let mut out = Outcome::new(Code::Ok, "factored").diag("ring", ring_value(ring)).diag("bounds", bounds);
            out.report.factors = factors.iter().map(|f| matrix_to_value(f.matrix())).collect();
            out
        }
        None => Outcome::new(Code::Unknown, "unknown").diag("ring", ring_value(ring)).diag("bounds", bounds),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(Code::Invalid as u8);
        }
    };
    let result = match &cli.command {
        Command::Factor { ring, matrix, row } => run_factor(ring, matrix.clone(), row.clone()),
        Command::Verify { ring, factors, target } => run_verify(ring, factors, target),
        Command::Classify { ring } => run_classify(ring),
        Command::Oracle { ring, target, height, len } => run_oracle(ring, target, *height, *len),
    };
    let out = result.unwrap_or_else(|o| o);
    let text = serde_json::to_string(&out.report).expect("report serializes");
    // A closed pipe is not worth a panic.
    let _ = writeln!(std::io::stdout(), "{text}");
    ExitCode::from(out.code as u8)
}
