//! `qbpm`: run beam propagation experiments on a simulated quantum register
//! and write plot-ready data.

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qbpm::Execution;

use config::{CommandKind, Format, RunConfig, ScenarioKind};
use output::Sink;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] qbpm::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}: {1}")]
    Csv(PathBuf, csv::Error),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Model(_) => 2,
            CliError::Io { .. } | CliError::Csv(..) => 1,
            CliError::Verification(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "qbpm", version, about = "Quantum beam propagation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Double-slit diffraction: histograms, far-field reference, RMSE, fringes.
    DoubleSlit(Common),
    /// Gaussian beam on a 2D register: intensity grids, waists, shot sweep.
    #[command(name = "gaussian-2d")]
    Gaussian2d(Common),
    /// Propagate a user field (two-column real,imaginary CSV) both ways.
    Propagate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Mean and spread of the sampling error over repeated runs.
    ErrorAnalysis {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        scenario: Option<ScenarioKind>,
    },
    /// Gate counts of the QFT, transfer operator and inverse QFT.
    GateCount {
        #[command(flatten)]
        common: Common,
        /// Order of the dispersion monomial.
        #[arg(long)]
        order: Option<u32>,
    },
    /// Write the propagation circuit as OpenQASM 2.0.
    ExportQasm {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        scenario: Option<ScenarioKind>,
    },
}

#[derive(Args)]
struct Common {
    /// JSON configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Shots of the single sampled run.
    #[arg(long)]
    shots: Option<u64>,
    /// Repetitions of the sampling sweep.
    #[arg(long)]
    sims: Option<usize>,
    /// Register size (per axis for the Gaussian beam).
    #[arg(long)]
    qubits: Option<usize>,
    /// Propagation distance in meters (Rayleigh lengths for the Gaussian
    /// beam); repeat for several.
    #[arg(long = "z")]
    z: Vec<f64>,
    /// Shot count of the sampling sweep; repeat for several.
    #[arg(long = "sweep-shots")]
    sweep_shots: Vec<u64>,
    #[arg(long, default_value = "qbpm-output")]
    out: PathBuf,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Compare against the classical propagation and fail above tolerance.
    #[arg(long)]
    verify: bool,
    /// Run all loops on the calling thread.
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn resolve(&self, command: CommandKind) -> Result<RunConfig, CliError> {
        let mut c = RunConfig::load(command, self.config.as_deref())?;
        if let Some(seed) = self.seed {
            c.seed = seed;
        }
        if let Some(shots) = self.shots {
            c.n_shots = shots;
        }
        if let Some(sims) = self.sims {
            c.n_sim = sims;
        }
        if !self.z.is_empty() {
            c.z = self.z.clone();
        }
        if !self.sweep_shots.is_empty() {
            c.shots_sweep = self.sweep_shots.clone();
        }
        if let Some(format) = self.format {
            c.format = format;
        }
        c.verify |= self.verify;
        Ok(c)
    }

    fn apply_qubits(&self, c: &mut RunConfig) {
        let Some(n) = self.qubits else { return };
        match c.command {
            CommandKind::GateCount => c.gate_count.n_qubits = n,
            _ => match c.scenario {
                ScenarioKind::DoubleSlit => c.double_slit.n_qubits = n,
                ScenarioKind::Gaussian2d => c.gaussian.n_qubits_per_axis = n,
                ScenarioKind::Custom => c.gate_count.n_qubits = n,
            },
        }
    }

    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (common, kind) = match &cli.command {
        Command::DoubleSlit(c) => (c, CommandKind::DoubleSlit),
        Command::Gaussian2d(c) => (c, CommandKind::Gaussian2d),
        Command::Propagate { common, .. } => (common, CommandKind::Propagate),
        Command::ErrorAnalysis { common, .. } => (common, CommandKind::ErrorAnalysis),
        Command::GateCount { common, .. } => (common, CommandKind::GateCount),
        Command::ExportQasm { common, .. } => (common, CommandKind::ExportQasm),
    };
    let mut config = common.resolve(kind)?;
    match &cli.command {
        Command::Propagate {
            input: Some(path), ..
        } => config.input = Some(path.clone()),
        Command::ErrorAnalysis {
            scenario: Some(s), ..
        }
        | Command::ExportQasm {
            scenario: Some(s), ..
        } => config.scenario = *s,
        Command::GateCount { order: Some(p), .. } => config.gate_count.order = *p,
        _ => {}
    }
    common.apply_qubits(&mut config);
    config.validate()?;

    let exec = common.execution();
    let mut sink = Sink::create(&common.out, config.format)?;
    sink.json("config", &config)?;
    let result = match kind {
        CommandKind::DoubleSlit => commands::double_slit(&config, exec, &mut sink),
        CommandKind::Gaussian2d => commands::gaussian_2d(&config, exec, &mut sink),
        CommandKind::Propagate => commands::propagate(&config, exec, &mut sink),
        CommandKind::ErrorAnalysis => commands::error_analysis(&config, exec, &mut sink),
        CommandKind::GateCount => {
            commands::gate_count(&config, &mut sink).map(|report| print!("{report}"))
        }
        CommandKind::ExportQasm => commands::export_qasm(&config, &mut sink),
    };
    for path in sink.written() {
        eprintln!("wrote {}", path.display());
    }
    result
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qbpm: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
