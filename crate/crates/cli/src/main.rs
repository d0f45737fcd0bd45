//! `rankcone`: classify entrywise maps, emit and verify witnesses, run sweeps.
//!
//! Exit codes: 0 preserves/pass, 2 violates/fail, 3 undetermined,
//! 64 usage or parse error, 65 domain or parameter error, 66 unreadable
//! input, 70 internal verification failure, 73 unwritable output.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use commands::CliError;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("rankcone: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Lib(rankcone::Error::Parse(_)) => 64,
            CliError::Lib(rankcone::Error::Verification(_)) => 70,
            CliError::Lib(_) => 65,
            CliError::Read(..) => 66,
            CliError::Write(..) => 73,
        }
    }
}
