use std::process::ExitCode;

fn main() -> ExitCode {
    let code = convan_cli::main_with_args(std::env::args_os().skip(1));
    ExitCode::from(code as u8)
}
