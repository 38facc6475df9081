use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use homophily_cli::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = homophily_cli::run(&cli).and_then(|out| out.deliver(cli.out.as_deref()));
    match result {
        Ok(Some(text)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::FAILURE;
            }
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
