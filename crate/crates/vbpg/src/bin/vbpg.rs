use clap::Parser;

fn main() {
    std::process::exit(vbpg::cli::run(vbpg::cli::Cli::parse()));
}
