use std::process::ExitCode;

fn main() -> ExitCode {
    delta_nls::cli::main_with(std::env::args_os())
}
