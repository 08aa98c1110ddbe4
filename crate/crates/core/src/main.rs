use std::process::ExitCode;

fn main() -> ExitCode {
    nsenergy::cli::main()
}
