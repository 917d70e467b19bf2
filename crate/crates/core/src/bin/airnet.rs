use clap::Parser;

fn main() {
    let cli = airnet::cli::Cli::parse();
    std::process::exit(airnet::cli::run(cli));
}
