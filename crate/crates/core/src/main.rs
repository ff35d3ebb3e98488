use std::process::ExitCode;

fn main() -> ExitCode {
    polyrig::cli::main()
}
