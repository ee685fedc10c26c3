use std::fs;
use std::process::ExitCode;

use clap::Parser;
use unstable_cli::{execute, is_usage_error, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(if is_usage_error(&e) { 2 } else { 1 });
        }
    };
    print!("{}", report.to_text());
    if let Some(path) = &cli.json {
        if let Err(e) = fs::write(path, report.to_json() + "\n") {
            eprintln!("error: writing {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
