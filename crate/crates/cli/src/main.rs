use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(langlens::run(std::env::args_os()))
}
