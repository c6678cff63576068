use clap::Parser;
use qfridge::{execute, manifest_from_cli, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = manifest_from_cli(cli).and_then(|m| execute(&m)) {
        eprintln!("{}", e.to_json());
        std::process::exit(e.exit_code());
    }
}
