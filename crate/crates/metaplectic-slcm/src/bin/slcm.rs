use clap::Parser;
use metaplectic_slcm::cli::{main_with, Cli};

fn main() {
    std::process::exit(main_with(Cli::parse()));
}
