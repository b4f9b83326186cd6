use clap::Parser;
use subspace_rip_cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
