//! `tilewave run --config path [--suite S] [--grid-m M] [--seed N] [--jobs J] [--plot]`
//!
//! Exit status: 0 when every suite assertion holds, 1 on an assertion
//! failure (failing rows on stderr), 2 on a usage or configuration error.

mod config;
mod report;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ConfigError, Overrides};

#[derive(Parser, Debug)]
#[command(name = "tilewave", version, about = "Time-frequency experiment driver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one suite and write `<outdir>/<suite>.csv` (and `.svg` with --plot).
    Run {
        /// JSON config file with flat keys (suite, grid_m, seed, ...).
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        grid_m: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; defaults to the number of cores.
        #[arg(long)]
        jobs: Option<usize>,
        /// Output directory; defaults to the config's `outdir`, then $TILEWAVE_OUTDIR.
        #[arg(long)]
        outdir: Option<PathBuf>,
        #[arg(long)]
        plot: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run { config, suite, grid_m, seed, jobs, outdir, plot } = cli.command;
    let env_outdir = std::env::var_os("TILEWAVE_OUTDIR").map(PathBuf::from);
    let resolved = match config::load(&config, Overrides { suite, grid_m, seed, outdir }, env_outdir) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            if let ConfigError::UnknownSuite(_) = e {
                eprintln!("known suites: {}", config::SUITES.join(", "));
            }
            return ExitCode::from(2);
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match pool.install(|| suites::run_suite(&resolved)) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: suite {} could not run: {e:#}", resolved.suite);
            return ExitCode::from(2);
        }
    };
    let written = match report::write_outputs(&resolved.outdir, &resolved.suite, &outcome, plot) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: writing outputs: {e:#}");
            return ExitCode::from(2);
        }
    };
    for p in &written {
        println!("wrote {}", p.display());
    }
    if outcome.passed() {
        println!("suite {}: PASS ({} rows)", resolved.suite, outcome.table.rows.len());
        ExitCode::SUCCESS
    } else {
        for (row, msg) in &outcome.failures {
            if *row == 0 {
                eprintln!("FAIL (suite): {msg}");
            } else {
                eprintln!("FAIL row {row}: {msg}");
            }
        }
        println!("suite {}: FAIL ({} of {} checks failed)", resolved.suite, outcome.failures.len(), outcome.table.rows.len());
        ExitCode::from(1)
    }
}
