use std::process::ExitCode;

fn main() -> ExitCode {
    aspm::cli::main_entry()
}
