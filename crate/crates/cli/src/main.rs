use clap::{Parser, Subcommand};
use expanse_sim::{classify_scenario, run_batch, sweep_table, RunError, RunOptions, Scenario};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "expanse-sim", version, about = "Run, classify and sweep expanding-background NLS scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one or more scenarios and write records, snapshots and manifests.
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        #[arg(long)]
        seed_override: Option<u64>,
        #[arg(long)]
        max_steps: Option<u64>,
        #[arg(long)]
        quiet: bool,
    },
    /// Print the regime report for a scenario.
    Classify {
        config: PathBuf,
        /// Emit `key = value` lines instead of prose.
        #[arg(long)]
        kv: bool,
    },
    /// Tabulate thresholds and verdicts over the scenario's sweep axes.
    Sweep {
        config: PathBuf,
        /// Write the table here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn fail(e: &RunError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            configs,
            out_dir,
            seed_override,
            max_steps,
            quiet,
        } => {
            let opts = RunOptions {
                out_dir,
                seed_override,
                max_steps,
                quiet,
            };
            let mut worst = 0;
            for (path, result) in run_batch(&configs, &opts) {
                let code = match result {
                    Ok(m) => m.exit_code(),
                    Err(e) => {
                        eprintln!("error: {}: {e}", path.display());
                        e.exit_code()
                    }
                };
                worst = worst.max(code);
            }
            ExitCode::from(worst as u8)
        }
        Command::Classify { config, kv } => {
            let report = Scenario::load(&config)
                .map_err(RunError::from)
                .and_then(|sc| classify_scenario(&sc));
            match report {
                Ok(r) if kv => {
                    print!("{}", r.to_kv());
                    ExitCode::SUCCESS
                }
                Ok(r) => {
                    print!("{r}");
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Sweep { config, output } => {
            let table = Scenario::load(&config)
                .map_err(RunError::from)
                .and_then(|sc| sweep_table(&sc));
            match table {
                Ok(t) => match output {
                    Some(path) => match std::fs::write(&path, t) {
                        Ok(()) => ExitCode::SUCCESS,
                        Err(source) => fail(&RunError::Io {
                            context: format!("writing {}", path.display()),
                            source,
                        }),
                    },
                    None => {
                        print!("{t}");
                        ExitCode::SUCCESS
                    }
                },
                Err(e) => fail(&e),
            }
        }
    }
}
