use std::process::ExitCode;

fn main() -> ExitCode {
    pa_isolated::cli::main_with_args(std::env::args_os())
}
