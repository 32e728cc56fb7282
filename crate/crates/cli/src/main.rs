mod args;
mod config;
mod error;
mod record;
mod run;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::error::CliError;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let code = match real_main(argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("pasf: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code)
}

fn real_main(argv: Vec<String>) -> Result<u8, CliError> {
    let argv = config::expand(argv)?;
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    Ok(0)
                }
                _ => Err(CliError::Usage(e.to_string())),
            };
        }
    };
    if let Some(threads) = cli.global.threads {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    record::execute(&cli)
}
