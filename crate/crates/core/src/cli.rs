//! Command line front end.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::{LabError, Result};
use crate::runner::{report_json, run, sweep, write_outputs, write_sweep};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Thread cap for the worker pool.
pub const THREADS_ENV: &str = "ESTIMATE_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "estimate-lab",
    version,
    about = "Check gradient estimates on discrete scenarios"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every check listed in the config.
    Run {
        config: PathBuf,
        /// Output directory; overrides the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeat the estimate over values of one parameter.
    Sweep {
        config: PathBuf,
        /// One of R, T, rho, delta, epsilon, p, k, h.
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        values: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the structural conditions on F for the configured scenario.
    Hypotheses { config: PathBuf },
}

fn load(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
    RunConfig::from_json(&text)
}

fn out_dir(cfg: &RunConfig, flag: Option<PathBuf>) -> PathBuf {
    flag.unwrap_or_else(|| PathBuf::from(&cfg.output.dir))
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, out } => {
            let cfg = load(&config)?;
            let outcome = run(&cfg)?;
            let dir = out_dir(&cfg, out);
            write_outputs(&outcome, &dir)?;
            println!(
                "{} -> {}",
                if outcome.pass { "pass" } else { "violation" },
                dir.display()
            );
            Ok(outcome.pass)
        }
        Command::Sweep {
            config,
            param,
            values,
            out,
        } => {
            let cfg = load(&config)?;
            let rows = sweep(&cfg, &param, &values)?;
            let dir = out_dir(&cfg, out);
            fs::create_dir_all(&dir)?;
            let f = fs::File::create(dir.join("sweep.csv"))?;
            write_sweep(&rows, BufWriter::new(f))?;
            let ok = rows.iter().all(|r| r.pass);
            println!("{} rows -> {}", rows.len(), dir.join("sweep.csv").display());
            Ok(ok)
        }
        Command::Hypotheses { config } => {
            let cfg = load(&config)?;
            let nl = cfg.scenario.nonlinearity.build(cfg.scenario.domain.n)?;
            let rep = crate::nonlinearity::check_hypotheses(
                &nl,
                cfg.scenario.domain.n,
                crate::nonlinearity::DEFAULT_SAMPLES,
            )?;
            let v = serde_json::json!({
                "report": serde_json::to_value(&rep)
                    .map_err(|e| LabError::Numerical(e.to_string()))?,
                "failure": rep.failure(),
            });
            println!("{}", report_json(&v)?);
            Ok(rep.failure().is_none())
        }
    }
}

fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        LabError::Config(format!(
            "{THREADS_ENV} must be a positive integer, got {raw:?}"
        ))
    })?;
    // a pool that already exists keeps its size
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_ERROR
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return EXIT_ERROR;
    }
    match execute(cli) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_VIOLATION,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
