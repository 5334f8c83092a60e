use clap::Parser;
use flatorbit::cli::{execute, render, Cli};
use flatorbit::numeric::seed_from_env;

fn main() {
    let cli = Cli::parse();
    let report = execute(&cli.command, seed_from_env());
    print!("{}", render(&report, cli.json || cli.command.json_only()));
    std::process::exit(report.exit_code.into());
}
