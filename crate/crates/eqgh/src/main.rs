use clap::Parser;
use eqgh::cli::{run, Cli};

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("eqgh: {e}");
        std::process::exit(e.exit_code());
    }
}
