mod commands;
mod input;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "bratteli", version, about = "Skeletons, associated graphs and perfect orders on Bratteli diagrams")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Diagram or bundle JSON.
    #[arg(long, global = true)]
    pub diagram: Option<PathBuf>,
    /// Order JSON; replaces the bundle's order.
    #[arg(long, global = true)]
    pub order: Option<PathBuf>,
    /// Skeleton and correspondence JSON; replaces the bundle's skeleton.
    #[arg(long, global = true)]
    pub skeleton: Option<PathBuf>,
    /// Extend a stationary diagram, or truncate any diagram, to this depth.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Top level used by language and verification checks.
    #[arg(long, global = true)]
    pub horizon: Option<usize>,
    /// Maximum number of orders a census may enumerate.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub budget: u128,
    /// Write DOT files for the associated graphs.
    #[arg(long, global = true)]
    pub dot: bool,
    /// Directory for the report and any extra artifacts.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Policy {
    Greedy,
    Guarded,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Mode {
    Stationary,
    PerLevel,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Structural report on the diagram, skeleton and correspondence.
    Validate,
    /// Telescope to the given levels (comma separated, starting at 0).
    Telescope {
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<usize>,
    },
    /// Source words w(v, m, n).
    Words {
        /// Level n of the vertices (default: depth).
        #[arg(long)]
        level: Option<usize>,
        /// Level m the letters live at (default: n - 1).
        #[arg(long)]
        from: Option<usize>,
        #[arg(long)]
        vertex: Option<String>,
    },
    /// Factors of the level language up to the horizon.
    Language {
        #[arg(long)]
        level: usize,
        #[arg(long, default_value_t = 2)]
        max_len: usize,
    },
    /// Cells, associated graph, crossing numbers and connectivity.
    Hgraph {
        #[arg(long)]
        level: usize,
        #[arg(long)]
        target: Option<String>,
    },
    /// Check the bundled decomposition, or solve for one.
    Balance {
        #[arg(long)]
        level: usize,
        #[arg(long)]
        target: Option<String>,
    },
    /// Build an order from the skeleton and correspondence.
    Synthesize {
        #[arg(long, value_enum, default_value = "greedy")]
        policy: Policy,
        /// Synthesize a single target: cells at this level.
        #[arg(long, requires = "target")]
        level: Option<usize>,
        #[arg(long, requires = "level")]
        target: Option<String>,
    },
    /// Perfectness verdict for the order, or the class-A obstruction without one.
    Verify,
    /// Exhaustive verdicts over all orders, one JSON line each.
    Census {
        #[arg(long, value_enum, default_value = "stationary")]
        mode: Mode,
        /// Comma separated first letters for the stationary block words.
        #[arg(long, value_delimiter = ',')]
        fixed_mu: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',')]
        fixed_tau: Option<Vec<String>>,
        #[arg(long)]
        no_necessity: bool,
    },
    /// Infinitesimal vectors, their rank, propagation and Perron pairing.
    Infinitesimal {
        /// Base level n.
        #[arg(long, default_value_t = 2)]
        level: usize,
        #[arg(long, default_value_t = 1)]
        offset: usize,
        /// Only the vector of this maximal vertex at level n - 1.
        #[arg(long)]
        vertex: Option<String>,
        /// Chains `top_level:vertex`, comma separated.
        #[arg(long, value_delimiter = ',')]
        chains: Option<Vec<String>>,
    },
}

/// Result of a subcommand before it is written out.
pub struct Outcome {
    pub status: &'static str,
    pub code: u8,
    pub report: Value,
    /// Extra artifacts for `--out`, by file name.
    pub files: Vec<(String, String)>,
    /// Replaces the pretty report on stdout (census JSON lines).
    pub stdout: Option<String>,
}

impl Outcome {
    pub fn new(status: &'static str, code: u8, report: Value) -> Self {
        Outcome { status, code, report, files: Vec::new(), stdout: None }
    }
}

#[derive(Debug)]
pub struct InputError(pub String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate => "validate",
        Command::Telescope { .. } => "telescope",
        Command::Words { .. } => "words",
        Command::Language { .. } => "language",
        Command::Hgraph { .. } => "hgraph",
        Command::Balance { .. } => "balance",
        Command::Synthesize { .. } => "synthesize",
        Command::Verify => "verify",
        Command::Census { .. } => "census",
        Command::Infinitesimal { .. } => "infinitesimal",
    }
}

pub fn envelope(common: &Common, command: &str, status: &str, report: Value) -> Value {
    let mut env = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "status": status,
        "report": report,
    });
    if !common.no_timestamp {
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        env["generated_at_unix"] = json!(now);
    }
    env
}

fn write_atomic(dir: &Path, name: &str, contents: &str) -> std::io::Result<()> {
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, dir.join(name))
}

fn emit(common: &Common, command: &str, outcome: &Outcome) -> Result<(), InputError> {
    let env = envelope(common, command, outcome.status, outcome.report.clone());
    let text = serde_json::to_string_pretty(&env)? + "\n";
    match &outcome.stdout {
        Some(s) => print!("{s}"),
        None => print!("{text}"),
    }
    if let Some(dir) = &common.out {
        fs::create_dir_all(dir)?;
        write_atomic(dir, "report.json", &text)?;
        for (name, contents) in &outcome.files {
            write_atomic(dir, name, contents)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let name = command_name(&cli.command);
    let result = commands::run(&cli).and_then(|outcome| {
        emit(&cli.common, name, &outcome)?;
        Ok(outcome.code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(InputError(message)) => {
            eprintln!("error: {message}");
            let env = envelope(&cli.common, name, "INPUT_ERROR", json!({ "error": message }));
            println!("{}", serde_json::to_string_pretty(&env).unwrap_or_default());
            ExitCode::from(3)
        }
    }
}
