use std::process::ExitCode;

fn main() -> ExitCode {
    linsvm::cli::run()
}
