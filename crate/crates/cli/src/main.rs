mod commands;
mod input;
mod output;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use semifb::adapters::AdapterError;
use semifb::algebra::AlgebraError;
use semifb::engine::EngineError;
use semifb::graph::GraphError;
use semifb::semialgebra::SemialgebraError;

use output::Format;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Forward pass over `--semiring`; prints the sink sum and each sink.
    Forward,
    /// Forward pass over the free polynomial semiring.
    FreeForward,
    /// Forward-backward over A ⊗ BC¹ with A named by `--semiring`.
    Fb,
    /// Expectations of the features in `--features` (real weights).
    Expect,
    /// Gradient of a `tape` input at its point or `--point`.
    Grad,
    /// Second-order expectation of the two features in `--features`.
    SecondOrder,
    /// Randomized law checks for `--semiring`; also checks the input if given.
    Validate,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Route {
    /// One forward and one backward pass shared by all features.
    Fb,
    /// One tensor forward pass per feature.
    Npass,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Reverse,
    Forward,
}

#[derive(Debug, Parser)]
#[command(
    name = "semifb",
    version,
    about = "Semiring forward and forward-backward passes over computation graphs"
)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Input document (JSON); `-` or nothing reads stdin.
    pub input: Option<PathBuf>,
    /// Semiring instance, e.g. `real`, `logreal`, `natpoly(3)`, `bc(real,2)`, `tensor(real,bc1)`.
    #[arg(long, default_value = "real")]
    pub semiring: String,
    /// `all`, `nodes` or `cutsets:K`.
    #[arg(long, default_value = "all")]
    pub checkpoint: String,
    /// Feature file for `expect`, `second-order` and `fb`.
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Evaluation point for `grad`, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub point: Option<Vec<f64>>,
    /// Append semiring add/mul counts.
    #[arg(long)]
    pub telemetry: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Also write the built graph, with its source values, as a `graph` document.
    #[arg(long)]
    pub emit_graph: Option<PathBuf>,
    /// Evaluation route for `expect`.
    #[arg(long, value_enum, default_value = "fb")]
    pub route: Route,
    /// Differentiation mode for `grad`.
    #[arg(long, value_enum, default_value = "reverse")]
    pub mode: Mode,
    /// Run batched passes on one thread.
    #[arg(long)]
    pub sequential: bool,
    /// Cases per law for `validate`.
    #[arg(long, default_value_t = 1000)]
    pub cases: usize,
    /// Seed for `validate`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative and absolute tolerance for `validate` (default 1e-9).
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug)]
pub enum CliError {
    /// Malformed input, unknown names, bad flags. Exit 2.
    Parse(String),
    /// The engine or an adapter rejected the input. Exit 3.
    Engine(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Engine(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Engine(m) => write!(f, "engine error: {m}"),
        }
    }
}

fn case_name<E: std::fmt::Debug>(e: &E) -> String {
    let dbg = format!("{e:?}");
    dbg.split(['(', ' ', '{'])
        .next()
        .unwrap_or_default()
        .to_string()
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        let case = match &e {
            EngineError::Graph(g) => case_name(g),
            other => case_name(other),
        };
        CliError::Engine(format!("{case}: {e}"))
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::Engine(format!("{}: {e}", case_name(&e)))
    }
}

impl From<SemialgebraError> for CliError {
    fn from(e: SemialgebraError) -> Self {
        CliError::Engine(format!("{}: {e}", case_name(&e)))
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<AdapterError> for CliError {
    fn from(e: AdapterError) -> Self {
        match e {
            AdapterError::InvalidModel(m) => CliError::Parse(format!("InvalidModel: {m}")),
            AdapterError::Engine(e) => e.into(),
            AdapterError::Graph(e) => e.into(),
            AdapterError::Semialgebra(e) => e.into(),
            other => CliError::Engine(format!("{}: {other}", case_name(&other))),
        }
    }
}

fn read_text(path: Option<&PathBuf>) -> Result<String, CliError> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).map_err(|e| CliError::Parse(format!("{}: {e}", p.display())))
        }
        _ => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Parse(format!("stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(outcome) => {
            print!("{}", output::render(&outcome.out, cli.format));
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("semifb: {e}");
            ExitCode::from(e.code())
        }
    }
}
