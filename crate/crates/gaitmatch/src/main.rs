use std::process::ExitCode;

fn main() -> ExitCode {
    gaitmatch::cli::main_with(std::env::args_os())
}
