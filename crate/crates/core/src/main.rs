use std::process::ExitCode;

fn main() -> ExitCode {
    shearwave::cli::main()
}
