//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 contract violation (the
//! pattern does not occur exactly once, or a family fails its bound).
//! Reports go to stdout as newline-terminated JSON (CSV for `sweep
//! --format csv`); diagnostics go to stderr.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::fingerprint::{freivalds_family, verify_strong_universality, UniversalityBudget};
use crate::harness::{complexity_report, sweep};
use crate::search::{FreivaldsSearch, SearchConfig};
use crate::selftest::{run_selftest, SelftestHooks};

pub const SEED_ENV: &str = "FINGERGROVER_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CONTRACT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "fingergrover",
    version,
    about = "Fingerprint-hashed Grover substring search"
)]
pub struct Cli {
    /// Pretty-print JSON output.
    #[arg(long, global = true)]
    pub pretty: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search a text file for a pattern.
    Search(SearchArgs),
    /// Report family size, fingerprint width, qubits and queries.
    Analyze(AnalyzeArgs),
    /// Monte Carlo error sweep over planted instances.
    Sweep(SweepArgs),
    /// Check strong universality of the Freivalds family.
    VerifyFamily(VerifyFamilyArgs),
    /// Run the internal consistency checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub text: PathBuf,
    #[arg(long)]
    pub pattern: String,
    #[arg(long, default_value_t = 3)]
    pub c: usize,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    /// Check the returned window against the pattern.
    #[arg(long)]
    pub verify: bool,
    /// Run even if the pattern does not occur exactly once.
    #[arg(long)]
    pub allow_out_of_contract: bool,
    /// Read the text as packed bytes, MSB first.
    #[arg(long)]
    pub raw_bits: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 3)]
    pub c: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated window counts.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub n: Vec<usize>,
    /// Comma-separated pattern lengths.
    #[arg(long, value_delimiter = ',', num_args = 0.., default_value = "8")]
    pub m: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub c: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
}

#[derive(Debug, Args)]
pub struct VerifyFamilyArgs {
    #[arg(long, default_value_t = 3)]
    pub c: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    /// Bound to check; defaults to 1/c.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = UniversalityBudget::default().exhaustive_limit)]
    pub exhaustive_limit: u64,
    #[arg(long, default_value_t = UniversalityBudget::default().samples)]
    pub samples: u64,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Negative control: run with a wrongly scaled diffusion.
    #[arg(long, hide = true)]
    pub corrupt_diffusion: bool,
}

/// Everything a command wants printed, and its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl CommandOutput {
    fn ok(stdout: String) -> Self {
        Self {
            stdout,
            stderr: String::new(),
            code: EXIT_OK,
        }
    }

    fn from_error(e: &Error) -> Self {
        let code = match e {
            Error::ContractViolation { .. } => EXIT_CONTRACT,
            _ => EXIT_USAGE,
        };
        Self {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code,
        }
    }
}

fn to_json<T: Serialize>(value: &T, pretty: bool) -> String {
    let mut out = if pretty {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    }
    .expect("report types serialize infallibly");
    out.push('\n');
    out
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from_args<I, T>(args: I) -> CommandOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                CommandOutput {
                    stdout: String::new(),
                    stderr: rendered,
                    code: EXIT_USAGE,
                }
            } else {
                CommandOutput::ok(rendered)
            }
        }
    }
}

pub fn run(cli: &Cli) -> CommandOutput {
    let result = match &cli.command {
        Command::Search(args) => cmd_search(args, cli.pretty),
        Command::Analyze(args) => cmd_analyze(args, cli.pretty),
        Command::Sweep(args) => cmd_sweep(args, cli.pretty),
        Command::VerifyFamily(args) => cmd_verify_family(args, cli.pretty),
        Command::Selftest(args) => Ok(cmd_selftest(args)),
    };
    result.unwrap_or_else(|e| CommandOutput::from_error(&e))
}

pub fn cmd_search(args: &SearchArgs, pretty: bool) -> Result<CommandOutput> {
    let config = SearchConfig {
        c: args.c,
        seed: args.seed,
        verify_classically: args.verify,
    };
    config.validate()?;
    let pattern = BitString::parse_ascii(&args.pattern)?;
    let text = if args.raw_bits {
        BitString::read_packed_file(&args.text)?
    } else {
        BitString::read_ascii_file(&args.text)?
    };
    let search = FreivaldsSearch::prepare(&text, &pattern, config.c)?;
    let occurrences = search.instance().occurrences().len();
    if occurrences != 1 && !args.allow_out_of_contract {
        return Err(Error::ContractViolation { occurrences });
    }
    let outcome = search.run(config.seed, config.verify_classically)?;
    Ok(CommandOutput::ok(to_json(&outcome, pretty)))
}

pub fn cmd_analyze(args: &AnalyzeArgs, pretty: bool) -> Result<CommandOutput> {
    Ok(CommandOutput::ok(to_json(
        &complexity_report(args.n, args.m, args.c)?,
        pretty,
    )))
}

pub fn cmd_sweep(args: &SweepArgs, pretty: bool) -> Result<CommandOutput> {
    if args.c < 3 {
        return Err(Error::InvalidParameter("c must be ≥ 3".into()));
    }
    let table = sweep(&args.n, &args.m, args.c, args.trials, args.seed);
    let stderr: String = table
        .failures
        .iter()
        .map(|f| format!("warning: row n={} m={} failed: {}\n", f.n, f.m, f.error))
        .collect();
    let stdout = match args.format {
        TableFormat::Csv => table.to_csv()?,
        TableFormat::Json => to_json(&table, pretty),
    };
    Ok(CommandOutput {
        stdout,
        stderr,
        code: EXIT_OK,
    })
}

pub fn cmd_verify_family(args: &VerifyFamilyArgs, pretty: bool) -> Result<CommandOutput> {
    let family = freivalds_family(args.c, args.n, args.m)?;
    let eps = args.eps.unwrap_or(1.0 / args.c as f64);
    let budget = UniversalityBudget {
        exhaustive_limit: args.exhaustive_limit,
        samples: args.samples,
        seed: args.seed,
    };
    let report = verify_strong_universality(&family, args.n, eps, args.m, budget)?;
    let code = if report.holds() { EXIT_OK } else { EXIT_CONTRACT };
    Ok(CommandOutput {
        stdout: to_json(&report, pretty),
        stderr: String::new(),
        code,
    })
}

pub fn cmd_selftest(args: &SelftestArgs) -> CommandOutput {
    let report = run_selftest(SelftestHooks {
        corrupt_diffusion: args.corrupt_diffusion,
    });
    let stdout = report.render();
    if report.passed() {
        CommandOutput::ok(stdout)
    } else {
        CommandOutput {
            stdout,
            stderr: format!("selftest failed: {}\n", report.failing().join(", ")),
            code: EXIT_USAGE,
        }
    }
}
