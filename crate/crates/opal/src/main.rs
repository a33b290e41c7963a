use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let env = |k: &str| std::env::var(k).ok();
    let code = opal::cli::run_cli(std::env::args(), &env, &mut io::stdout(), &mut io::stderr());
    ExitCode::from(code as u8)
}
