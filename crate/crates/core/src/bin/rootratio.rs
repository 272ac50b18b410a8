use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use rootratio::cli::{render_error, run, Cli, THREADS_ENV};
use rootratio::Error;

fn main() -> ExitCode {
    let args = match Cli::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or_default();
            let err = Error::InvalidArgument(first.trim_start_matches("error: ").to_string());
            eprint!("{e}");
            print!("{}", render_error(&err));
            return ExitCode::from(2);
        }
    };
    let env = std::env::var(THREADS_ENV).ok();
    let (code, out) = match args.into_config(env.as_deref()) {
        Ok(config) => run(&config),
        Err(e) => (e.exit_code(), render_error(&e)),
    };
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.as_bytes());
    let _ = stdout.flush();
    ExitCode::from(code as u8)
}
