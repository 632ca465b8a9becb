use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DUALMIND_LOG", "warn"))
        .target(env_logger::Target::Stderr)
        .init();
    dualmind_cli::main_with(std::env::args().skip(1))
}
