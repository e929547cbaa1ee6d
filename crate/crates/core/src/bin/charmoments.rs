use std::io::Write;
use std::process::ExitCode;

use charmoments::cli::{run, Cli, EXIT_INVALID};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(EXIT_INVALID as u8);
        }
    }
    let (text, code) = run(&cli);
    if code == EXIT_INVALID || code == 3 {
        eprint!("{text}");
    } else {
        let _ = std::io::stdout().write_all(text.as_bytes());
    }
    ExitCode::from(code as u8)
}
