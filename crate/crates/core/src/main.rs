use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use modflow::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli.command);
    let text = if cli.json {
        format!("{}\n", result.to_json_string())
    } else {
        result.to_string()
    };
    // a closed pipe (e.g. `| head`) is not an error of the command
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    if result.is_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
