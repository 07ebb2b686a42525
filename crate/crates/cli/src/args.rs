use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::CliError;

/// Optimal transaction cost model for legal disputes.
///
/// Every command reads its parameters from a JSON file (`--input`) and/or inline
/// `--KEY VALUE` pairs. Inline values override the file.
#[derive(Debug, Parser)]
#[command(name = "lexopt", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Bargain,
    Classify,
    Solve,
    Hessian,
    Phi,
    AlphaSearch,
    Comply,
    Simulate,
    Sweep,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reasonable bargain, its decomposition and the WTA/WTP cooperation check.
    Bargain(CommonArgs),
    /// High/Low cost regime and the plaintiff's trial-or-settle decision.
    Classify(CommonArgs),
    /// Closed-form Cobb-Douglas optimum with first-order and identity diagnostics.
    Solve(CommonArgs),
    /// Bordered Hessian in both formulations at the optimum.
    Hessian(CommonArgs),
    /// Piecewise transaction-cost schedule and its admissibility bounds.
    Phi(CommonArgs),
    /// Scan the L_C exponent for the optimal transaction cost.
    AlphaSearch(CommonArgs),
    /// Best allowed strategy and the minimal compliance penalty.
    Comply(CommonArgs),
    /// Run the litigation-market simulator and print the trajectory.
    Simulate(CommonArgs),
    /// Sweep the administration cost C_a through the simulator.
    Sweep(CommonArgs),
}

impl Command {
    pub fn split(self) -> (CommandKind, CommonArgs) {
        match self {
            Command::Bargain(a) => (CommandKind::Bargain, a),
            Command::Classify(a) => (CommandKind::Classify, a),
            Command::Solve(a) => (CommandKind::Solve, a),
            Command::Hessian(a) => (CommandKind::Hessian, a),
            Command::Phi(a) => (CommandKind::Phi, a),
            Command::AlphaSearch(a) => (CommandKind::AlphaSearch, a),
            Command::Comply(a) => (CommandKind::Comply, a),
            Command::Simulate(a) => (CommandKind::Simulate, a),
            Command::Sweep(a) => (CommandKind::Sweep, a),
        }
    }
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Bargain => "bargain",
            CommandKind::Classify => "classify",
            CommandKind::Solve => "solve",
            CommandKind::Hessian => "hessian",
            CommandKind::Phi => "phi",
            CommandKind::AlphaSearch => "alpha-search",
            CommandKind::Comply => "comply",
            CommandKind::Simulate => "simulate",
            CommandKind::Sweep => "sweep",
        }
    }

    pub fn takes_seed(self) -> bool {
        matches!(self, CommandKind::Simulate | CommandKind::Sweep)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON file with the command's parameters.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Seed for `simulate` and `sweep` (falls back to LEXOPT_SEED).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Inline parameters, e.g. `--alpha 0.5 --P_C 2`.
    #[arg(
        trailing_var_arg = true,
        allow_hyphen_values = true,
        num_args = 0..,
        value_name = "--KEY VALUE"
    )]
    pub params: Vec<String>,
}

/// Options after the trailing `--KEY VALUE` list has been split from the common flags.
#[derive(Debug, Default)]
pub struct Resolved {
    pub input: Option<PathBuf>,
    pub format: Format,
    pub seed: Option<u64>,
    pub params: Vec<(String, String)>,
}

impl CommonArgs {
    /// Pull `--input`, `--format` and `--seed` back out of the trailing list (clap stops
    /// recognising them once the first unknown `--key` starts the list) and pair the rest.
    pub fn resolve(self) -> Result<Resolved, CliError> {
        let mut out = Resolved {
            input: self.input,
            format: self.format.unwrap_or_default(),
            seed: self.seed,
            params: Vec::new(),
        };
        let mut format_seen = self.format.is_some();
        let mut it = self.params.into_iter();
        while let Some(flag) = it.next() {
            let (key, inline_value) = match flag.strip_prefix("--") {
                Some(rest) if !rest.is_empty() => match rest.split_once('=') {
                    Some((k, v)) => (k.to_string(), Some(v.to_string())),
                    None => (rest.to_string(), None),
                },
                _ => {
                    return Err(CliError::Usage(format!(
                        "expected `--KEY VALUE`, found `{flag}`"
                    )))
                }
            };
            let value = match inline_value {
                Some(v) => v,
                None => it
                    .next()
                    .ok_or_else(|| CliError::Usage(format!("missing value for `--{key}`")))?,
            };
            match key.as_str() {
                "input" => {
                    if out.input.replace(value.into()).is_some() {
                        return Err(CliError::Usage("`--input` given twice".into()));
                    }
                }
                "format" => {
                    if format_seen {
                        return Err(CliError::Usage("`--format` given twice".into()));
                    }
                    format_seen = true;
                    out.format = Format::from_str(&value, true).map_err(|_| {
                        CliError::Usage(format!("unknown format `{value}` (expected json or csv)"))
                    })?;
                }
                "seed" => {
                    let seed = value
                        .parse()
                        .map_err(|_| CliError::Usage(format!("invalid seed `{value}`")))?;
                    if out.seed.replace(seed).is_some() {
                        return Err(CliError::Usage("`--seed` given twice".into()));
                    }
                }
                _ => {
                    if out.params.iter().any(|(k, _)| *k == key) {
                        return Err(CliError::Usage(format!("`--{key}` given twice")));
                    }
                    out.params.push((key, value));
                }
            }
        }
        Ok(out)
    }
}
