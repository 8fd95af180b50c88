use std::process::ExitCode;

fn main() -> ExitCode {
    tiltchar::cli::main()
}
