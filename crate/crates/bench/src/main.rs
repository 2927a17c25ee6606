use anyhow::Context;
use brlab_bench::record::Verdict;
use brlab_bench::scenarios::SCENARIOS;
use brlab_bench::{report, run_config, BenchError, Config};
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Spectral-multiplier experiment runner.
#[derive(Parser)]
#[command(name = "brlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment in a config file.
    Run {
        config: PathBuf,
        /// Output directory (overridden by BRLAB_OUT).
        #[arg(short, long, default_value = "runs")]
        out: PathBuf,
        /// Worker threads per experiment (overridden by BRLAB_WORKERS).
        #[arg(short, long)]
        workers: Option<usize>,
    },
    /// Summarize a run directory, optionally against a baseline.
    Report {
        dir: PathBuf,
        #[arg(long)]
        baseline: Option<PathBuf>,
    },
    /// List the available scenarios.
    ListScenarios,
    /// Print a runnable config with default parameters.
    PrintDefaultConfig { scenario: String },
}

fn env_workers() -> anyhow::Result<Option<usize>> {
    match std::env::var("BRLAB_WORKERS") {
        Ok(v) => {
            let n: usize = v.trim().parse().with_context(|| format!("BRLAB_WORKERS={v}"))?;
            anyhow::ensure!(n > 0, "BRLAB_WORKERS must be >= 1");
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

fn run(config: &Path, out: PathBuf, workers: Option<usize>) -> anyhow::Result<ExitCode> {
    let out = std::env::var_os("BRLAB_OUT").map(PathBuf::from).unwrap_or(out);
    let workers = env_workers()?.or(workers);
    let cfg = Config::load(config)?;
    let records = run_config(&cfg, &out, workers)?;
    let mut worst = Verdict::Pass;
    for r in &records {
        let v = r.summary.overall();
        println!(
            "{:<24} {:<20} {}  (pass {}, flag {}, fail {})",
            r.spec.id,
            r.spec.scenario_name(),
            v,
            r.summary.pass,
            r.summary.flag,
            r.summary.fail
        );
        worst = worst.max(v);
    }
    println!("records written to {}", out.display());
    Ok(if worst == Verdict::Fail { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn report_cmd(dir: &Path, baseline: Option<&Path>) -> anyhow::Result<ExitCode> {
    let current = report::load_dir(dir)?;
    print!("{}", report::summary_table(&current));
    if let Some(b) = baseline {
        let base = report::load_dir(b)?;
        let entries = report::diff(&current, &base);
        print!("{}", report::render_diff(&entries));
        if entries.iter().any(|e| e.is_regression()) {
            return Ok(ExitCode::from(1));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Run { config, out, workers } => run(&config, out, workers),
        Command::Report { dir, baseline } => report_cmd(&dir, baseline.as_deref()),
        Command::ListScenarios => {
            for (name, about) in SCENARIOS {
                println!("{name:<20} {about}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::PrintDefaultConfig { scenario } => {
            print!("{}", Config::default_text(&scenario)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<BenchError>().map_or(4, BenchError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
