use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lab_cli::{acceptance, registry, run_experiment, CliError};

#[derive(Parser)]
#[command(name = "lab", version, about = "Numerical experiments on operators in Banach function spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write CSV and JSON reports.
    Run {
        experiment: String,
        /// Flat key = value configuration file, applied before the flags.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Half-width and node count, e.g. 32,4096.
        #[arg(long, value_name = "T,N")]
        grid: Option<String>,
        /// Lp:4, Lp:4/3, WLp:4:0.25, VLp:gauss or VLp:<file>.
        #[arg(long)]
        space: Option<String>,
        #[arg(long)]
        wavelet: Option<String>,
        #[arg(long, value_name = "J,K")]
        window: Option<String>,
        #[arg(long)]
        trials: Option<String>,
        #[arg(long)]
        seed: Option<String>,
        /// Output directory (default $LAB_OUTPUT_DIR or ./lab-output).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Experiment parameter or tolerance (tol.<name>), repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// List experiments with the statement each one exercises.
    List,
    /// Run the acceptance suite.
    Verify,
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::List => {
            print!("{}", registry::listing());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify => {
            let verdicts = acceptance::run_all(|line| println!("{line}"));
            let passed = verdicts.iter().filter(|v| v.pass).count();
            println!("{passed}/{} criteria passed", verdicts.len());
            Ok(if passed == verdicts.len() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Run {
            experiment,
            config,
            grid,
            space,
            wavelet,
            window,
            trials,
            seed,
            out,
            set,
        } => {
            let entry = registry::find(&experiment)
                .ok_or_else(|| CliError::Usage(format!("unknown experiment {experiment:?}; see `lab list`")))?;
            let mut cfg = entry.config();
            if let Some(path) = config {
                cfg.apply_file(&path)?;
            }
            let flags = [
                ("grid", grid),
                ("space", space),
                ("wavelet", wavelet),
                ("window", window),
                ("trials", trials),
                ("seed", seed),
            ];
            for (k, v) in flags {
                if let Some(v) = v {
                    cfg.set(k, &v)?;
                }
            }
            if let Some(out) = out {
                cfg.output = out;
            }
            for kv in set {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
                cfg.set(k.trim(), v.trim())?;
            }
            let outcome = run_experiment(&cfg)?;
            let failures = outcome.failures();
            println!(
                "{}: {} rows, {} bounded, {} failed -> {}",
                cfg.experiment,
                outcome.rows.len(),
                outcome.bounded_count(),
                failures.len(),
                cfg.output.display()
            );
            for (k, v) in &outcome.constants {
                println!("  {k} = {v:.6e}");
            }
            for f in failures.iter().take(5) {
                eprintln!(
                    "  failed: {} trial {:?} value {:.6e} bound {:.6e}",
                    f.metric,
                    f.trial,
                    f.value,
                    f.bound.unwrap_or(f64::NAN)
                );
            }
            Ok(if failures.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
