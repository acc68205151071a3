use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = advrisk::cli::Cli::parse();
    match advrisk::cli::run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
