use std::io::{self, Write};

use clap::Parser;
use cogbasic::cli::{execute, log_level, Cli, Io};

fn main() {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(log_level(cli.verbosity()))
        .parse_default_env()
        .format_timestamp(None)
        .init();
    let stdin = io::stdin();
    let mut stdin = stdin.lock();
    let mut stdout = io::stdout().lock();
    let mut stderr = io::stderr();
    let code = execute(&cli, &mut Io { stdin: &mut stdin, stdout: &mut stdout, stderr: &mut stderr });
    let _ = stdout.flush();
    std::process::exit(code);
}
