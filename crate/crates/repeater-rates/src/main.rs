use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(repeater_rates::workbench::cli_main(std::env::args_os()))
}
