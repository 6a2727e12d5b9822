mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use commands::{run, CliError, Status};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            return fail(&CliError {
                kind: "usage".into(),
                message: e.to_string().trim_end().to_string(),
            })
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Degenerate) => ExitCode::from(2),
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    let doc = serde_json::json!({ "error": { "kind": e.kind, "message": e.message } });
    eprintln!("{doc}");
    ExitCode::from(3)
}
