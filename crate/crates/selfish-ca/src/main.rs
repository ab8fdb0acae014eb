use std::process::ExitCode;

fn main() -> ExitCode {
    selfish_ca::cli::main()
}
