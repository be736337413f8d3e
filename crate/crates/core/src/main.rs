use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = typebench::cli::Cli::parse();
    // A panic is an internal error and must not surface as exit code 101.
    std::panic::catch_unwind(|| typebench::cli::main_with(cli)).unwrap_or(ExitCode::from(3))
}
