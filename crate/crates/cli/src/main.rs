//! `sciscal`: command-line surface for the scissors-congruence engine.
//!
//! All inputs and outputs are the canonical JSON forms of the core crate.
//! The context file is loaded from `--ctx` or the `SCISCAL_CTX` environment
//! variable. Exit codes: 0 success (and, for generator verification, verdict
//! EQUAL); 2 parse error; 3 precision failure (guards too coarse); 4 domain
//! error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sciscal_core::error::Error as CoreError;
use sciscal_core::generators::{verify_generator, GeneratorSpec};
use sciscal_core::homology::{snake_closed_form, snake_pipeline, PIPELINE_SIGN};
use sciscal_core::iet::Iet;
use sciscal_core::json as forms;
use sciscal_core::rational::parse_q;
use sciscal_core::rect::Ret;
use sciscal_core::regulator::{regulator_flag, Measure};
use sciscal_core::scalar::{Scalar, ScalarContext};

#[derive(Parser)]
#[command(
    name = "sciscal",
    version,
    about = "Exact scissors-congruence calculus for the line"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CtxArg {
    /// Context file (JSON); defaults to $SCISCAL_CTX.
    #[arg(long)]
    ctx: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Vol,
    Universal,
}

impl From<MeasureArg> for Measure {
    fn from(m: MeasureArg) -> Measure {
        match m {
            MeasureArg::Vol => Measure::Vol,
            MeasureArg::Universal => Measure::Universal,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Regulator chain of a flag of interval exchanges.
    Regulator {
        #[command(flatten)]
        ctx: CtxArg,
        /// JSON file holding an array of interval exchanges.
        #[arg(long)]
        flags: PathBuf,
        #[arg(long, value_enum, default_value = "vol")]
        measure: MeasureArg,
    },
    /// Build the torus complex for the given lengths and verify its class.
    Generator {
        #[command(flatten)]
        ctx: CtxArg,
        /// Comma-separated lengths: basis symbols, rationals, or q*symbol.
        #[arg(long)]
        lengths: String,
        /// Include the full regulator chain in the report.
        #[arg(long)]
        emit_chain: bool,
        /// Accepted for compatibility; verification always runs.
        #[arg(long)]
        verify: bool,
    },
    /// Alias of `generator`.
    Verify {
        #[command(flatten)]
        ctx: CtxArg,
        #[arg(long)]
        lengths: String,
        #[arg(long)]
        emit_chain: bool,
    },
    /// Run the connecting-map pipeline against its closed form.
    Snake {
        #[command(flatten)]
        ctx: CtxArg,
        /// Comma-separated values (same syntax as --lengths).
        #[arg(long)]
        values: String,
    },
    /// Box form of a componentwise rectangle exchange.
    Rect {
        #[command(flatten)]
        ctx: CtxArg,
        /// JSON file holding an array of per-axis interval exchanges.
        #[arg(long)]
        flags: PathBuf,
    },
}

enum CliError {
    Parse(String),
    Core(CoreError),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Core(CoreError::Precision(_)) => 3,
            CliError::Core(_) => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Parse(m) => format!("parse error: {m}"),
            CliError::Core(e) => format!("error: {e}"),
        }
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn load_context(arg: &CtxArg) -> Result<Arc<ScalarContext>, CliError> {
    let path = match &arg.ctx {
        Some(p) => p.clone(),
        None => std::env::var_os("SCISCAL_CTX")
            .map(PathBuf::from)
            .ok_or_else(|| {
                CliError::Parse("no context: pass --ctx or set SCISCAL_CTX".to_string())
            })?,
    };
    let value = read_json(&path)?;
    forms::context_from_json(&value).map_err(|e| CliError::Parse(e.to_string()))
}

/// One token of a scalar list: a rational, a basis symbol, or `q*symbol`.
fn parse_scalar_token(ctx: &Arc<ScalarContext>, token: &str) -> Result<Scalar, CliError> {
    let token = token.trim();
    if token.is_empty() {
        return Err(CliError::Parse("empty scalar token".to_string()));
    }
    if let Some((coeff, name)) = token.split_once('*') {
        let r = parse_q(coeff).map_err(|e| CliError::Parse(e.to_string()))?;
        let base = Scalar::symbol(ctx, name.trim())
            .ok_or_else(|| CliError::Parse(format!("unknown symbol `{}`", name.trim())))?;
        return Ok(base.scale(&r));
    }
    if let Ok(r) = parse_q(token) {
        return Ok(Scalar::from_rational(ctx, r));
    }
    Scalar::symbol(ctx, token).ok_or_else(|| CliError::Parse(format!("unknown symbol `{token}`")))
}

fn parse_scalar_list(ctx: &Arc<ScalarContext>, list: &str) -> Result<Vec<Scalar>, CliError> {
    list.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| parse_scalar_token(ctx, t))
        .collect()
}

/// Structural problems in an input file are parse errors; anything the
/// validators reject for mathematical reasons stays a domain error.
fn parse_or_domain(e: CoreError) -> CliError {
    match e {
        CoreError::InvalidElement(_) | CoreError::ContextMismatch => CliError::Parse(e.to_string()),
        other => CliError::Core(other),
    }
}

fn load_flags(path: &Path, ctx: &Arc<ScalarContext>) -> Result<Vec<Iet>, CliError> {
    let value = read_json(path)?;
    let items = value
        .as_array()
        .ok_or_else(|| CliError::Parse("flag file must be a JSON array".to_string()))?;
    items
        .iter()
        .map(|v| forms::iet_from_json(v, ctx).map_err(parse_or_domain))
        .collect()
}

fn emit(value: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable")
    );
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Regulator {
            ctx,
            flags,
            measure,
        } => {
            let ctx = load_context(&ctx)?;
            let flags = load_flags(&flags, &ctx)?;
            if flags.is_empty() {
                return Err(CliError::Core(CoreError::InvalidElement(
                    "a flag needs at least one transformation".to_string(),
                )));
            }
            let chain = regulator_flag(&flags, measure.into())?;
            emit(&forms::bar_chain_to_json(&chain));
            Ok(0)
        }
        Command::Generator {
            ctx,
            lengths,
            emit_chain,
            verify: _,
        }
        | Command::Verify {
            ctx,
            lengths,
            emit_chain,
        } => {
            let ctx = load_context(&ctx)?;
            let lengths = parse_scalar_list(&ctx, &lengths)?;
            let spec = GeneratorSpec::new(lengths)?;
            let report = verify_generator(&spec);
            if let sciscal_core::generators::Verdict::Error(ref msg) = report.verdict {
                if msg.contains("guards too coarse") {
                    return Err(CliError::Core(CoreError::Precision(msg.clone())));
                }
            }
            emit(&forms::report_to_json(&report, emit_chain));
            Ok(if report.is_equal() { 0 } else { 1 })
        }
        Command::Snake { ctx, values } => {
            let ctx = load_context(&ctx)?;
            let values = parse_scalar_list(&ctx, &values)?;
            if values.is_empty() {
                return Err(CliError::Core(CoreError::InvalidElement(
                    "need at least one value".to_string(),
                )));
            }
            let pipeline = snake_pipeline(&values)?;
            let closed = snake_closed_form(&values)?;
            let agree = pipeline == closed.scale(&sciscal_core::rational::qi(PIPELINE_SIGN as i64));
            emit(&json!({
                "values": values.iter().map(forms::scalar_to_json).collect::<Vec<_>>(),
                "pipeline": forms::wedge_class_to_json(&pipeline),
                "closed_form": forms::wedge_class_to_json(&closed),
                "sign": PIPELINE_SIGN,
                "agreement": agree,
            }));
            Ok(0)
        }
        Command::Rect { ctx, flags } => {
            let ctx = load_context(&ctx)?;
            let factors = load_flags(&flags, &ctx)?;
            let ret = Ret::from_iets(factors)?;
            emit(&forms::ret_to_json(&ret));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
