use std::path::PathBuf;
use std::process::ExitCode;

use catqubit::analysis::{cavity_density, wigner, GridSpec, DEFAULT_WIGNER_MARGIN, DEFAULT_WIGNER_POINTS};
use catqubit::hilbert::load_state;
use catqubit_cli::error::EXIT_OK;
use catqubit_cli::{init_workers, load, CliError, CliResult, Experiment};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "catqubit",
    version,
    about = "Cat-qubit gate simulations driven by TOML experiment files"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run { config: PathBuf },
    /// List the registered experiments.
    List,
    /// Check a config file without running it.
    Validate { config: PathBuf },
    /// Wigner function of the cavity part of a saved state, as CSV.
    Wigner {
        state: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Grid points per axis.
        #[arg(long, default_value_t = DEFAULT_WIGNER_POINTS)]
        points: usize,
        /// Half width of the square grid; defaults to sqrt(<n>) + 2.
        #[arg(long)]
        extent: Option<f64>,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::List => {
            for e in Experiment::ALL {
                println!("{:<24} {}", e.name(), e.description());
            }
        }
        Command::Validate { config } => {
            let (_, r) = load(&config)?;
            println!(
                "ok: {} (n_fock = {}, minimum {}, peak amplitude {:.3}, mode {:?})",
                r.experiment, r.n_fock, r.min_n_fock, r.peak_amplitude, r.mode
            );
        }
        Command::Run { config } => {
            init_workers()?;
            let (text, r) = load(&config)?;
            let started = std::time::Instant::now();
            let written = catqubit_cli::run(&text, &r)?;
            log::info!("{} finished in {:.1} s", r.experiment, started.elapsed().as_secs_f64());
            for p in written {
                println!("{}", p.display());
            }
        }
        Command::Wigner {
            state,
            out,
            points,
            extent,
        } => {
            init_workers()?;
            let (s, _) = load_state(&state)?;
            let rho = cavity_density(&s)?;
            let n_mean: f64 = (0..rho.nrows()).map(|n| n as f64 * rho[(n, n)].re).sum();
            let half = extent.unwrap_or(n_mean.max(0.0).sqrt() + DEFAULT_WIGNER_MARGIN);
            if !(half > 0.0 && half.is_finite()) || points == 0 {
                return Err(CliError::Config(format!("bad grid: extent {half}, points {points}")));
            }
            let grid = wigner(&s, &GridSpec::square(half, points))?;
            std::fs::write(&out, grid.to_csv())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::from(EXIT_OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
