//! Binary shell: parse arguments, run the command, print one report, and
//! exit with the verdict code (0 pass, 1 fail, 2 inconclusive, 3 input
//! error).

use std::process::exit;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;

use vertexkit_cli::commands::{self, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            exit(code);
        }
    };
    let start = Instant::now();
    match commands::run(&cli) {
        Ok(report) => {
            if cli.machine {
                print!("{}", report.render_machine());
            } else {
                print!("{}", report.render_human(start.elapsed()));
            }
            exit(report.verdict.exit_code());
        }
        Err(msg) => {
            eprintln!("error: {}", msg);
            exit(3);
        }
    }
}
