use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use evortex::commands;
use evortex::config::{parse_length, ScenarioConfig};
use evortex::ConfigErrors;

/// Electron vortex beam simulation: element masks, Fresnel propagation,
/// off-axis holography and topological analysis.
#[derive(Debug, Parser)]
#[command(name = "evortex", version)]
struct Cli {
    /// Scenario configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "evortex-out")]
    out: PathBuf,
    /// Recorded in the manifest. The simulation itself is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Only report errors.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the element mask and exit wave.
    Mask,
    /// Apodize and Fresnel-propagate a complex field.
    Propagate {
        #[arg(long)]
        input: PathBuf,
        /// Distance with unit, e.g. "25 mm" or "-100 nm".
        #[arg(long, allow_hyphen_values = true)]
        distance: String,
    },
    /// Simulate an off-axis hologram of a complex field.
    Hologram {
        #[arg(long)]
        input: PathBuf,
    },
    /// Reconstruct the object wave from a hologram.
    Reconstruct {
        #[arg(long)]
        input: PathBuf,
    },
    /// Measure winding, vortices, core radius and OAM spectrum of a field.
    Analyze {
        #[arg(long)]
        input: PathBuf,
    },
    /// Find the line charge that gives the device its target charge.
    Calibrate,
    /// Run the full scenario.
    Run,
}

fn config(cli: &Cli) -> anyhow::Result<ScenarioConfig> {
    let path = cli.config.as_ref().ok_or_else(|| anyhow::anyhow!("this command needs --config"))?;
    commands::load_config(path)
}

fn execute(cli: &Cli) -> anyhow::Result<String> {
    let out = &cli.out;
    match &cli.command {
        Command::Mask => commands::mask(&config(cli)?, out),
        Command::Propagate { input, distance } => {
            let cfg = config(cli)?;
            let z = parse_length(distance).map_err(|e| ConfigErrors(vec![format!("--distance: {e}")]))?;
            commands::propagate(&cfg, out, input, z)
        }
        Command::Hologram { input } => commands::hologram(&config(cli)?, out, input),
        Command::Reconstruct { input } => commands::reconstruct(&config(cli)?, out, input),
        Command::Analyze { input } => {
            let cfg = match &cli.config {
                Some(_) => Some(config(cli)?),
                None => None,
            };
            commands::analyze(cfg.as_ref(), out, input)
        }
        Command::Calibrate => commands::calibrate_device(&config(cli)?, out),
        Command::Run => commands::run(&config(cli)?, out, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        log::warn!("could not configure the thread pool: {e}");
    }
    log::info!("evortex {} writing to {}", env!("CARGO_PKG_VERSION"), cli.out.display());
    match execute(&cli) {
        Ok(summary) => {
            if !cli.quiet {
                print!("{summary}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let Some(ce) = e.downcast_ref::<ConfigErrors>() {
                eprint!("error: {ce}");
                ExitCode::from(2)
            } else {
                eprintln!("error: {e:#}");
                ExitCode::FAILURE
            }
        }
    }
}
