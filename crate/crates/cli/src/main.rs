use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(randsing_cli::run(std::env::args_os()))
}
