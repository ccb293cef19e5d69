use std::process::ExitCode;

use clap::Parser;

use mwc_harness::{run_experiment, write_report, Cli, HarnessError};

fn init_pool() -> Result<(), String> {
    let Ok(raw) = std::env::var("CONGEST_MWC_THREADS") else { return Ok(()) };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("invalid CONGEST_MWC_THREADS: {raw:?} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(msg) = init_pool() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let outcome = cli
        .validate()
        .map_err(HarnessError::from)
        .and_then(|cfg| run_experiment(&cfg).and_then(|r| write_report(&cfg, &r)));
    match outcome {
        Ok(Some(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
