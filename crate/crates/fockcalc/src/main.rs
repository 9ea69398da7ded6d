use std::process::ExitCode;

fn main() -> ExitCode {
    fockcalc::cli::run()
}
