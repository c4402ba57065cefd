use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod failure;
mod svg;
mod verify;

use args::{Cli, Command};
use failure::CliError;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => return usage_failure(e),
    };
    let result = match cli.command {
        Command::Eigen(a) => commands::eigen(&a),
        Command::Evolve(a) => commands::evolve(&a),
        Command::Yau(a) => commands::yau(&a),
        Command::Selfsim(a) => commands::selfsim(&a),
        Command::Verify(a) => verify::run(&a),
        Command::Render(a) => commands::render(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {}", e.code(), e.to_string().replace('\n', " "));
            ExitCode::from(e.exit_code())
        }
    }
}

/// Help and version go to stdout as usual; anything else gets a code line
/// followed by clap's usage text.
fn usage_failure(e: clap::Error) -> ExitCode {
    use clap::error::ErrorKind;
    if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
        let _ = e.print();
        return ExitCode::SUCCESS;
    }
    let rendered = e.render().to_string();
    let mut lines = rendered.lines();
    let first = lines.next().unwrap_or_default().trim_start_matches("error:").trim();
    eprintln!("error: USAGE: {first}");
    for line in lines {
        eprintln!("{line}");
    }
    ExitCode::from(CliError::USAGE_EXIT)
}
