//! `tycz`: command-line front end to the distortion, curvature,
//! inducibility and Szegő tools.

mod args;
mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use args::{KernelArgs, OutputArgs, PotentialArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] tycz_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn usage(e: impl std::fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "tycz", version, about = "Distortion functions, TYCZ expansions and radial cscK metrics")]
struct Cli {
    /// also write the effective run configuration to this JSON file
    #[arg(long, global = true)]
    save_config: Option<PathBuf>,
    /// more log output on standard error (repeatable)
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

/// One run; serialized as the `RunConfig` consumed by `tycz run`.
#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// List the catalog families and their parameters
    Families {
        #[command(flatten)]
        #[serde(default)]
        output: OutputArgs,
    },
    /// Identify the catalog family of psi(y) = A y^2 + y + B / y^{n-2} + C / y^{n-1}
    Classify {
        #[arg(long = "A", allow_hyphen_values = true)]
        a: f64,
        #[arg(long = "B", allow_hyphen_values = true)]
        b: f64,
        #[arg(long = "C", default_value_t = 0.0, allow_hyphen_values = true)]
        #[serde(default)]
        c: f64,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[command(flatten)]
        #[serde(default)]
        output: OutputArgs,
    },
    /// Distortion function T_m at points, one row per (point, m)
    Tmg {
        #[command(flatten)]
        potential: PotentialArgs,
        /// m range, e.g. 1..10
        #[arg(long, default_value = "1..10")]
        m: String,
        /// `r=0.5`, `x1=0.1,x2=0.2` (repeatable)
        #[arg(long = "point", required = true)]
        points: Vec<String>,
        #[command(flatten)]
        #[serde(default)]
        kernel: KernelArgs,
        #[command(flatten)]
        #[serde(default)]
        output: OutputArgs,
    },
    /// Least-squares fit of T_m by powers of m
    Fit {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, default_value = "1..12")]
        m: String,
        #[arg(long)]
        point: String,
        /// powers of m, comma separated
        #[arg(long, default_value = "2,1,0,-1,-2", allow_hyphen_values = true)]
        basis: String,
        /// tolerance for flagging a finite expansion
        #[arg(long, default_value_t = 1e-7)]
        fit_tol: f64,
        #[command(flatten)]
        #[serde(default)]
        kernel: KernelArgs,
        #[command(flatten)]
        #[serde(default)]
        output: OutputArgs,
    },
    /// Scalar curvature and the first two expansion coefficients
    Curvature {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long = "point", required = true)]
        points: Vec<String>,
        #[command(flatten)]
        #[serde(default)]
        output: OutputArgs,
    },
    /// Search for obstructions to a projective embedding of a radial metric
    Inducible {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, default_value_t = 40)]
        h_max: usize,
        /// points of the geometric grid towards the lower end
        #[arg(long, default_value_t = 31)]
        grid_points: usize,
        #[command(flatten)]
        #[serde(default)]
        output: OutputArgs,
    },
    /// Check the balanced condition at m = 1
    Balanced {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, default_value_t = 12)]
        max_degree: usize,
        #[command(flatten)]
        #[serde(default)]
        kernel: KernelArgs,
        #[command(flatten)]
        #[serde(default)]
        output: OutputArgs,
    },
    /// Szegő series tools
    Szego {
        #[command(subcommand)]
        what: SzegoCommand,
    },
    /// Run the acceptance suite and print one line per criterion
    Selftest {
        /// run only these criteria
        #[arg(long, value_delimiter = ',')]
        #[serde(default)]
        only: Vec<u32>,
    },
    /// Execute a saved run configuration
    #[serde(skip)]
    Run { config: PathBuf },
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "what", rename_all = "kebab-case")]
pub enum SzegoCommand {
    /// phi(t) and its derivatives
    Phi {
        /// T_m as an expression in m, e.g. "m^2 - 2.5*m + 2.5"
        #[arg(long, allow_hyphen_values = true)]
        profile: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// T_0 on the zero section
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        /// comma-separated t values in (0, 1); default 1 - 2^-i, i = 1..20
        #[arg(long)]
        t: Option<String>,
        /// highest derivative (default n + largest negative power)
        #[arg(long)]
        order: Option<usize>,
        #[command(flatten)]
        #[serde(default)]
        output: OutputArgs,
    },
    /// Fit the log term b log(1-t) of sum t^m T_m
    Logterm {
        #[arg(long, allow_hyphen_values = true)]
        profile: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        #[arg(long, default_value = "0.5,0.999")]
        window: String,
        #[arg(long, default_value_t = 64)]
        points: usize,
        #[command(flatten)]
        #[serde(default)]
        output: OutputArgs,
    },
    /// Boundedness of ((1-t)^{n+1} sum t^m / m^{k0+h})^{(n+k0)} as t -> 1
    PsiH {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k0: usize,
        #[arg(long)]
        h: usize,
        #[arg(long, default_value_t = 24)]
        grid_points: usize,
        #[command(flatten)]
        #[serde(default)]
        output: OutputArgs,
    },
    /// Coefficients of q_k(t) = (1-t)^{k+1} sum m^k t^m
    Eulerian {
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        #[serde(default)]
        output: OutputArgs,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("see `tycz --help` or `tycz <command> --help`");
            }
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let command = match cli.command {
        Command::Run { config } => {
            let text = std::fs::read_to_string(&config)?;
            let cmd: Command = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", config.display())))?;
            if matches!(cmd, Command::Run { .. }) {
                return Err(CliError::Usage("a run configuration cannot run another".into()));
            }
            cmd
        }
        c => c,
    };
    if let Some(path) = &cli.save_config {
        let mut w = output::open(Some(path))?;
        output::write_json(&mut *w, &command)?;
    }
    commands::execute(&command)
}
