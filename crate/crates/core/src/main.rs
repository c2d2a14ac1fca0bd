use std::process::ExitCode;

fn main() -> ExitCode {
    fusefold::cli::main_with_args(std::env::args_os())
}
