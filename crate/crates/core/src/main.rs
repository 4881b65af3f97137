use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chiplet_cosim::cli::{cmd_compare, cmd_run, cmd_thermal, exit_code_for, EmitSet, RunManifest};
use chiplet_cosim::cosim::Mode;

#[derive(Parser)]
#[command(
    name = "chiplet-cosim",
    version,
    about = "Co-simulation of DNN workload streams on chiplet-based systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Cosim,
    CommOnly,
    Decoupled,
}

impl From<ModeArg> for Mode {
    fn from(value: ModeArg) -> Mode {
        match value {
            ModeArg::Cosim => Mode::Cosim,
            ModeArg::CommOnly => Mode::CommOnly,
            ModeArg::Decoupled => Mode::Decoupled,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

impl Toggle {
    fn is_on(self) -> bool {
        matches!(self, Toggle::On)
    }
}

#[derive(Args)]
struct CommonArgs {
    /// System configuration document (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Workload spec document (JSON).
    #[arg(long)]
    workload: PathBuf,
    /// Execute successive layers of one model concurrently across inferences.
    #[arg(long, value_enum, default_value = "on")]
    pipelined: Toggle,
    /// Load weights once from I/O chiplets before the first inference.
    #[arg(long, value_enum, default_value = "off")]
    weight_stationary: Toggle,
    /// Override the workload seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write reports and traces.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Simulation mode.
        #[arg(long, value_enum, default_value = "cosim")]
        mode: ModeArg,
        /// Override the workload's inference count per model.
        #[arg(long)]
        inferences: Option<u32>,
        /// Comma-separated artifacts: report, flows, power, thermal, debug-trace.
        #[arg(long, default_value = "report,flows")]
        emit: String,
    },
    /// Sweep inference counts, running cosim and both baselines per point.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated inference counts.
        #[arg(long, default_value = "1,3,5,10,20")]
        sweep: String,
    },
    /// Solve the thermal model for an existing power trace.
    Thermal {
        /// System configuration document (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Power trace CSV produced by `run --emit power`.
        #[arg(long)]
        trace: PathBuf,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { common, mode, inferences, emit } => {
            let emit = match EmitSet::parse(&emit) {
                Ok(set) => set,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let manifest = RunManifest {
                config_path: common.config,
                workload_path: common.workload,
                mode: mode.into(),
                pipelined: common.pipelined.is_on(),
                weight_stationary: common.weight_stationary.is_on(),
                inferences,
                seed: common.seed,
                out_dir: common.out,
                emit,
            };
            cmd_run(&manifest)
        }
        Command::Compare { common, sweep } => {
            let points: Result<Vec<u32>, _> =
                sweep.split(',').map(|s| s.trim().parse::<u32>()).collect();
            let points = match points {
                Ok(p) if !p.is_empty() => p,
                _ => {
                    eprintln!("error: --sweep expects a comma-separated list of positive integers");
                    return ExitCode::from(2);
                }
            };
            let manifest = RunManifest {
                config_path: common.config,
                workload_path: common.workload,
                mode: Mode::Cosim,
                pipelined: common.pipelined.is_on(),
                weight_stationary: common.weight_stationary.is_on(),
                inferences: None,
                seed: common.seed,
                out_dir: common.out,
                emit: EmitSet::default(),
            };
            cmd_compare(&manifest, &points)
        }
        Command::Thermal { config, trace, out } => cmd_thermal(&config, &trace, &out),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err) as u8)
        }
    }
}
