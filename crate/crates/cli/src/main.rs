mod args;
mod commands;
mod input;

use std::fmt;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::Value;

use args::{Cli, CommandKind, Format, Resolved};

#[derive(Debug)]
pub enum CliError {
    /// Bad command line. Exit 64.
    Usage(String),
    /// Input that does not fit the command's schema or parameter domain. Exit 1.
    Input(String),
    /// Valid input the model cannot evaluate. Exit 2.
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Input(_) => 1,
            CliError::Domain(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Domain(m) => write!(f, "domain error: {m}"),
        }
    }
}

const SEED_ENV: &str = "LEXOPT_SEED";

fn resolve_seed(
    kind: CommandKind,
    flag: Option<u64>,
    params: &serde_json::Map<String, Value>,
) -> Result<Option<u64>, CliError> {
    if !kind.takes_seed() {
        if flag.is_some() {
            return Err(CliError::Usage(format!(
                "`--seed` only applies to simulate and sweep, not {}",
                kind.name()
            )));
        }
        return Ok(None);
    }
    if flag.is_some() {
        return Ok(flag);
    }
    if let Some(v) = params.get("seed") {
        return v.as_u64().map(Some).ok_or_else(|| {
            CliError::Input(format!(
                "field `seed`: expected an unsigned integer, got {v}"
            ))
        });
    }
    match std::env::var(SEED_ENV) {
        Ok(s) => {
            s.trim().parse().map(Some).map_err(|_| {
                CliError::Usage(format!("{SEED_ENV}={s:?} is not an unsigned integer"))
            })
        }
        Err(_) => Err(CliError::Usage(format!(
            "{} needs a seed: pass `--seed N`, a `seed` field, or set {SEED_ENV}",
            kind.name()
        ))),
    }
}

fn render(out: &commands::Output, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&out.json).expect("json output");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut comments = vec![format!("lexopt {}", env!("CARGO_PKG_VERSION"))];
            match &out.table {
                Some((table, extra)) => {
                    comments.extend(extra.iter().cloned());
                    table.to_csv_string(&comments)
                }
                None => commands::flatten(&out.json).to_csv_string(&comments),
            }
        }
    }
}

fn execute(kind: CommandKind, args: Resolved) -> Result<String, CliError> {
    let (params, notes) = input::merged_params(args.input.as_deref(), &args.params)?;
    for n in notes {
        eprintln!("lexopt: note: {n}");
    }
    let seed = resolve_seed(kind, args.seed, &params)?;
    let out = commands::run(kind, params, seed)?;
    Ok(render(&out, args.format))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(64),
            };
        }
    };
    let (kind, common) = cli.command.split();
    let result = common.resolve().and_then(|args| execute(kind, args));
    match result {
        Ok(text) => {
            let mut stdout = io::stdout().lock();
            if stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::FAILURE;
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("lexopt: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
