use std::process::ExitCode;

use clap::Parser;
use giantbic::io::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli.resolve().and_then(|config| run(&config));
    match result {
        Ok(out) => {
            println!("{}", out.summary);
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("giantbic: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
