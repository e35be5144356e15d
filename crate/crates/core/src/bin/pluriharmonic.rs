use std::process::ExitCode;

fn main() -> ExitCode {
    let code = pluriharmonic::cli::run(std::env::args_os());
    ExitCode::from(code)
}
