//! `consortium`: offline driver for descriptors and ledger logs.
//!
//! Exit codes: 0 success, 1 validation failure or corrupt log, 2 I/O, parse
//! or usage error.

mod report;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use consortium_core::canonical::{to_canonical_string, Digest};
use consortium_core::ledger::{decode_log, replay, state_hash, verify_integrity};
use consortium_core::{
    parse_chain_descriptor, run_sharing, validate_chain, CostPolicy, EngineError, SharingScheme,
    SupplyChain,
};
use serde_json::{json, Value};

pub use report::{compare, Comparison, Configuration};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "consortium", version, about = "Income sharing for consortium supply chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a descriptor against every model invariant.
    Validate {
        descriptor: PathBuf,
        /// Write the validation report as canonical JSON (`-` for stdout).
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
    /// Run the sharing computation and print the payout table.
    Run {
        descriptor: PathBuf,
        /// Write the result as canonical JSON (`-` for stdout).
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
        /// Print exact rationals instead of cents.
        #[arg(long)]
        exact: bool,
        /// Override the descriptor's sharing scheme.
        #[arg(long, value_enum)]
        scheme: Option<SchemeArg>,
        /// Override the descriptor's cost policy.
        #[arg(long, value_enum)]
        policy: Option<PolicyArg>,
    },
    /// Run every applicable scheme and cost policy side by side.
    Compare {
        descriptor: PathBuf,
        /// Write the comparison report as canonical JSON (`-` for stdout).
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
        /// Print exact rationals instead of cents.
        #[arg(long)]
        exact: bool,
    },
    /// Check a ledger log's hash chain and replay it.
    Verify {
        ledger: PathBuf,
        /// Write the verification summary as canonical JSON (`-` for stdout).
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    #[value(name = "RS")]
    Rs,
    #[value(name = "PS")]
    Ps,
}

impl From<SchemeArg> for SharingScheme {
    fn from(arg: SchemeArg) -> Self {
        match arg {
            SchemeArg::Rs => SharingScheme::RevenueSharing,
            SchemeArg::Ps => SharingScheme::ProfitSharing,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    #[value(name = "PLATFORM_MEMBER")]
    PlatformMember,
    #[value(name = "ORIGINATOR_PAYS")]
    OriginatorPays,
    #[value(name = "SHARED")]
    Shared,
}

impl From<PolicyArg> for CostPolicy {
    fn from(arg: PolicyArg) -> Self {
        match arg {
            PolicyArg::PlatformMember => CostPolicy::PlatformMember,
            PolicyArg::OriginatorPays => CostPolicy::OriginatorPays,
            PolicyArg::Shared => CostPolicy::Shared,
        }
    }
}

/// A failed command: exit code plus the message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn io(message: impl Into<String>) -> Self {
        Failure { code: EXIT_IO, message: message.into() }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INVALID, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Parses arguments and runs one command, writing the report to `out` and
/// diagnostics to `err`. Returns the process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_IO;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match execute(&cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            let _ = writeln!(err, "error: {failure}");
            failure.code
        }
    }
}

pub fn execute(command: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Validate { descriptor, json } => cmd_validate(descriptor, json.as_deref(), out, err),
        Command::Run { descriptor, json, exact, scheme, policy } => {
            cmd_run(descriptor, json.as_deref(), *exact, *scheme, *policy, out, err)
        }
        Command::Compare { descriptor, json, exact } => cmd_compare(descriptor, json.as_deref(), *exact, out),
        Command::Verify { ledger, json } => cmd_verify(ledger, json.as_deref(), out),
    }
}

pub fn load_descriptor(path: &Path) -> Result<SupplyChain, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    parse_chain_descriptor(&text).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn emit_json(target: Option<&Path>, value: &Value, out: &mut dyn Write) -> Result<(), Failure> {
    let Some(target) = target else { return Ok(()) };
    let text = to_canonical_string(value);
    if target == Path::new("-") {
        writeln!(out, "{text}").map_err(|e| Failure::io(e.to_string()))
    } else {
        std::fs::write(target, text).map_err(|e| Failure::io(format!("{}: {e}", target.display())))
    }
}

fn print(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(|e| Failure::io(e.to_string()))
}

fn cmd_validate(
    path: &Path,
    json_out: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    let chain = load_descriptor(path)?;
    let report = validate_chain(&chain);
    emit_json(json_out, &report.to_json(), out)?;
    for warning in &report.warnings {
        let _ = writeln!(err, "warning: {warning}");
    }
    for violation in &report.violations {
        let _ = writeln!(err, "{violation}");
    }
    if report.is_valid() {
        if json_out != Some(Path::new("-")) {
            print(out, &format!("{}: valid\n", path.display()))?;
        }
        Ok(())
    } else {
        Err(Failure::invalid(format!("{} violation(s)", report.violations.len())))
    }
}

fn engine_failure(e: EngineError, err: &mut dyn Write) -> Failure {
    if let EngineError::ValidationFailed(report) = &e {
        for violation in &report.violations {
            let _ = writeln!(err, "{violation}");
        }
    }
    Failure::invalid(e.to_string())
}

fn cmd_run(
    path: &Path,
    json_out: Option<&Path>,
    exact: bool,
    scheme: Option<SchemeArg>,
    policy: Option<PolicyArg>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    let mut chain = load_descriptor(path)?;
    if let Some(scheme) = scheme {
        chain.options.scheme = scheme.into();
    }
    if let Some(policy) = policy {
        chain.options.cost_policy = policy.into();
    }
    let result = run_sharing(&chain).map_err(|e| engine_failure(e, err))?;
    emit_json(json_out, &result.to_json(), out)?;
    if json_out != Some(Path::new("-")) {
        print(out, &report::render_result(&result, exact))?;
    }
    Ok(())
}

fn cmd_compare(path: &Path, json_out: Option<&Path>, exact: bool, out: &mut dyn Write) -> Result<(), Failure> {
    let chain = load_descriptor(path)?;
    let comparison = compare(&chain);
    emit_json(json_out, &comparison.to_json(), out)?;
    if json_out != Some(Path::new("-")) {
        print(out, &report::render_comparison(&comparison, exact))?;
    }
    if comparison.configurations.is_empty() {
        return Err(Failure::invalid("no configuration could be computed"));
    }
    if !comparison.conserves() {
        return Err(Failure::invalid("a configuration does not conserve gross income"));
    }
    Ok(())
}

fn cmd_verify(path: &Path, json_out: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    let entries = decode_log(&bytes).map_err(|e| Failure::invalid(e.to_string()))?;
    if !verify_integrity(&entries) {
        return Err(Failure::invalid("hash chain is broken"));
    }
    let states = replay(&entries).map_err(|e| Failure::invalid(e.to_string()))?;
    let hash = state_hash(&states);
    let head = entries.last().map_or(Digest::ZERO, |e| e.block.block_hash);
    let summary = json!({
        "blocks": entries.len(),
        "headHash": head.to_hex(),
        "requests": states.len(),
        "stateHash": hash.to_hex(),
        "valid": true,
    });
    emit_json(json_out, &summary, out)?;
    if json_out != Some(Path::new("-")) {
        print(
            out,
            &format!(
                "ok: {} block(s), {} request(s)\nhead hash:  {}\nstate hash: {}\n",
                entries.len(),
                states.len(),
                head.to_hex(),
                hash.to_hex()
            ),
        )?;
    }
    Ok(())
}
