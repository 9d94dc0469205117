use chiralprop::config::{parse_config, Mode};
use chiralprop::runner::{run_scenario, RunFailure};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Weak-probe pulse propagation in chiral atomic media.
#[derive(Parser)]
#[command(name = "chiralprop", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ScenarioArgs {
    /// Scenario configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Directory for output files.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Random seed (accepted on all verbs; only randomized verbs use it).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the response coefficients over a detuning x phase grid.
    Response(ScenarioArgs),
    /// Sweep the phase-control coefficient beta over the closed-loop phase.
    Beta(ScenarioArgs),
    /// Numerically co-propagate the probe pulse through the medium.
    Propagate(ScenarioArgs),
    /// Run the built-in verification suite.
    Selftest {
        /// Random seed for the parameter draws.
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn scenario(args: &ScenarioArgs, expected: Mode) -> ExitCode {
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: invalid configuration: {e:#}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if cfg.mode != expected {
        eprintln!(
            "error: config mode is {:?} but the {} verb was invoked",
            cfg.mode.as_str(),
            expected.as_str()
        );
        return ExitCode::from(EXIT_CONFIG);
    }
    match run_scenario(&cfg, &args.out_dir) {
        Ok(outputs) => {
            for path in &outputs {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(RunFailure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(RunFailure::Numerical(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Response(args) => scenario(&args, Mode::ResponseSweep),
        Command::Beta(args) => scenario(&args, Mode::BetaSweep),
        Command::Propagate(args) => scenario(&args, Mode::Propagate),
        Command::Selftest { seed } => match chiralprop::selftest::run_all(seed) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(EXIT_NUMERICAL),
            Err(e) => {
                eprintln!("error: self test aborted: {e:#}");
                ExitCode::from(EXIT_NUMERICAL)
            }
        },
    }
}
