mod args;
mod commands;
mod error;
mod report;

use std::time::Instant;

use clap::Parser;

use crate::args::{resolve_seed, Cli, Command};
use crate::error::CliError;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Config(format!("worker pool setup failed: {e}")))?;
    }
    let start = Instant::now();
    let output = match &cli.command {
        Command::Spectrum(a) => commands::cmd_spectrum(a)?,
        Command::ParityCheck(a) => commands::cmd_parity_check(a)?,
        Command::SsfDemo(a) => {
            let seed = resolve_seed(a.seed)?;
            commands::cmd_ssf_demo(a, seed)?
        }
        Command::Divergence(a) => commands::cmd_divergence(a)?,
        Command::Crosscheck(a) => commands::cmd_crosscheck(a)?,
        Command::FillScan(a) => commands::cmd_fill_scan(a)?,
        Command::AcProbe(a) => commands::cmd_ac_probe(a)?,
    };
    let timing = cli.timing.then(|| start.elapsed().as_secs_f64());
    let text = report::render(output, cli.format, timing);
    report::emit(&text, cli.out.as_deref())
}
