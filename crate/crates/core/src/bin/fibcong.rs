use std::process::ExitCode;

fn main() -> ExitCode {
    fibcong::cli::main_with_args(std::env::args_os())
}
