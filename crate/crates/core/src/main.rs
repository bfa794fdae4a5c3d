use clap::Parser;

use lightlike::cli::{main_with, Args};

fn main() {
    std::process::exit(main_with(&Args::parse()));
}
