use clap::Parser;
use upcall::cli;

fn main() {
    let args = cli::Cli::parse();
    std::process::exit(cli::run(args));
}
