//! Command-line front end.
//!
//! Every command reads an optional TOML config (`--config`), overlays the
//! flags given on the command line, validates the merged result and only then
//! runs. Output goes to `--out` or stdout and is written in one piece at the
//! end, so a failed run leaves no partial file.
//!
//! Exit codes: 0 success, 1 invalid configuration or arguments, 2 runtime
//! failure (corrupt or undecodable input, I/O), 3 infeasible optimisation.

mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use commands::{AnalyzeConfig, DecodeConfig, DuplicationConfig, EncodeConfig, GrapSolveConfig, MulticastConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
    #[error("{0}")]
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Infeasible(_) => 3,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "rlnc", version, about = "Random linear network coding toolkit")]
pub struct Cli {
    /// Master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// TOML file with the command's parameters; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for Monte-Carlo loops.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode a file into a coded packet container.
    Encode(EncodeArgs),
    /// Decode a packet container back into the original file.
    Decode(DecodeArgs),
    /// Closed-form decoding and outage probabilities, plus Monte-Carlo delay.
    Analyze(AnalyzeArgs),
    #[command(subcommand)]
    Simulate(SimulateCommand),
    #[command(subcommand)]
    Grap(GrapCommand),
}

#[derive(Debug, Subcommand)]
pub enum SimulateCommand {
    /// Multicast sessions over independent erasure channels.
    Multicast(MulticastArgs),
    /// Coded duplication over two legs.
    Duplication(DuplicationArgs),
}

#[derive(Debug, Subcommand)]
pub enum GrapCommand {
    /// Solve a resource-allocation instance.
    Solve(GrapSolveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ModeName {
    #[default]
    Standard,
    Systematic,
    Sparse,
    TunableSparse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum PolicyName {
    Mirror,
    SplitRoundRobin,
    Weighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeName {
    Now,
    Ew,
}

/// Coding flags shared by several commands.
#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct CodingArgs {
    /// Field order q (2, 4, 16 or 256).
    #[arg(long, short = 'q')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field_order: Option<u16>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeName>,
    /// Zero probability for sparse mode.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sparsity: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_start: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ramp_len: Option<u32>,
    /// Redraw all-zero coding vectors (default true).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resample_zero: Option<bool>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EncodeArgs {
    /// File to encode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// Generation size K.
    #[arg(long, short = 'k')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Symbols per packet.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payload_len: Option<usize>,
    /// Coded packets per generation beyond K.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra_packets: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub coding: CodingArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DecodeArgs {
    /// Packet container to decode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AnalyzeArgs {
    #[arg(long, short = 'k')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[arg(long, short = 'q')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field_order: Option<u16>,
    /// Erasure probabilities, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    /// First sweep value.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_min: Option<u64>,
    /// Last sweep value (inclusive).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u64>,
    /// Monte-Carlo trials for the delay estimate; 0 skips it.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MulticastArgs {
    #[arg(long, short = 'k')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payload_len: Option<usize>,
    /// Per-receiver erasure probabilities, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    /// Send exactly N packets; without it, send until every receiver decodes.
    #[arg(long, short = 'n')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_slots: Option<u64>,
    /// Number of sessions when `seeds` is not given.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runs: Option<u64>,
    /// Session seeds, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[command(flatten)]
    #[serde(flatten)]
    pub coding: CodingArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DuplicationArgs {
    #[arg(long, short = 'k')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payload_len: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leg1_eps: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leg2_eps: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leg1_capacity: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leg2_capacity: Option<u32>,
    /// Policies to compare, comma separated.
    #[arg(long, value_enum, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub policies: Option<Vec<PolicyName>>,
    /// Weights for the weighted policy (default: proportional to 1 - eps).
    #[arg(long, value_delimiter = ',', num_args = 2)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    /// Layer sizes for a layered payload, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layers: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeName>,
    /// Window selection probabilities (default uniform).
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distribution: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_slots: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runs: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[command(flatten)]
    #[serde(flatten)]
    pub coding: CodingArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GrapSolveArgs {
    /// Instance file (TOML).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<PathBuf>,
    /// Also run the exhaustive solver and report the gap.
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub oracle: bool,
    /// Per-layer packet bound for the exhaustive solver.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u64>,
}

/// Reads the config file (if any), overlays `overrides` and the global seed,
/// and deserializes the result.
fn merge_config<A: Serialize, C: DeserializeOwned>(
    config: Option<&Path>,
    overrides: &A,
    seed: Option<u64>,
) -> Result<C, CliError> {
    let mut table = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
            text.parse::<toml::Table>().map_err(|e| invalid(format!("config {}: {e}", path.display())))?
        }
        None => toml::Table::new(),
    };
    let flags = toml::Table::try_from(overrides).map_err(invalid)?;
    table.extend(flags);
    if let Some(s) = seed {
        let s = i64::try_from(s).map_err(|_| invalid(format!("seed {s} does not fit a TOML integer")))?;
        table.insert("seed".into(), toml::Value::Integer(s));
    }
    toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| invalid(format!("configuration: {}", e.message())))
}

/// Header comments for CSV output: tool version, command, seed and the merged config.
fn csv_preamble<C: Serialize>(command: &str, seed: u64, config: &C) -> String {
    let mut out = format!("# rlnc {} {command}\n# seed = {seed}\n", env!("CARGO_PKG_VERSION"));
    let echo = toml::to_string(config).expect("configs serialize");
    for line in echo.lines().filter(|l| !l.is_empty()) {
        out.push_str("# config: ");
        out.push_str(line);
        out.push('\n');
    }
    out
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes).and_then(|_| stdout.flush()).map_err(|e| CliError::Runtime(e.to_string()))
        }
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(invalid("--threads must be at least 1"));
        }
        // fails harmlessly if the pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cfg = cli.config.as_deref();
    let out = cli.out.as_deref();
    let (bytes, status) = match &cli.command {
        Command::Encode(a) => (commands::encode(&merge_config(cfg, a, cli.seed)?)?, Ok(())),
        Command::Decode(a) => (commands::decode(&merge_config(cfg, a, cli.seed)?)?, Ok(())),
        Command::Analyze(a) => (commands::analyze(&merge_config(cfg, a, cli.seed)?)?, Ok(())),
        Command::Simulate(SimulateCommand::Multicast(a)) => {
            (commands::multicast(&merge_config(cfg, a, cli.seed)?)?, Ok(()))
        }
        Command::Simulate(SimulateCommand::Duplication(a)) => {
            (commands::duplication(&merge_config(cfg, a, cli.seed)?)?, Ok(()))
        }
        Command::Grap(GrapCommand::Solve(a)) => commands::grap_solve(&merge_config(cfg, a, cli.seed)?)?,
    };
    emit(out, &bytes)?;
    status
}

/// Parses `args` (including the program name), runs, prints errors and
/// returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
