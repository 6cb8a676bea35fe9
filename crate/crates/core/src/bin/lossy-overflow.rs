use clap::Parser;
use lossy_overflow::cli::{run, RunConfig};

fn main() {
    std::process::exit(run(&RunConfig::parse()));
}
