use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fbmc_cli::{emit_plot_script, preset_config, run_preset, CliError, CliResult, Scale};

#[derive(Parser)]
#[command(name = "fbmc", version, about = "FBMC-OQAM massive MIMO equalization simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a figure preset and write CSV, config sidecar and plot script.
    Run {
        /// fig3, fig4, fig6, fig7, fig8 or mse.
        preset: String,
        #[arg(long, value_enum, default_value = "desk")]
        scale: Scale,
        /// key=value file applied on top of the preset.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory; overrides the `output` key.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Master seed; overrides the `master_seed` key.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; overrides the `threads` key.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print a matplotlib script for a preset CSV.
    Plot {
        csv: PathBuf,
        /// Write the script here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Run {
            preset,
            scale,
            config,
            out,
            seed,
            threads,
        } => {
            let mut cfg = preset_config(&preset, scale)?;
            if let Some(path) = config {
                let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
                cfg = cfg.apply(&text)?;
            }
            if let Some(out) = out {
                cfg.output = out;
            }
            if let Some(seed) = seed {
                cfg.master_seed = seed;
            }
            if let Some(threads) = threads {
                cfg.threads = threads;
            }
            if cfg.threads > 0 {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(cfg.threads)
                    .build_global()
                    .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
            }
            for path in run_preset(&preset, scale, &cfg)? {
                println!("{}", path.display());
            }
        }
        Command::Plot { csv, out } => {
            let script = emit_plot_script(&csv)?;
            match out {
                Some(path) => fs::write(&path, script).map_err(|e| CliError::io(&path, e))?,
                None => print!("{script}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.to_string().lines().next().unwrap_or("invalid arguments").to_string());
            eprintln!("{}", err.machine_line());
            return ExitCode::from(err.exit_code());
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.machine_line());
            ExitCode::from(e.exit_code())
        }
    }
}
