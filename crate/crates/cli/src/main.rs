use clap::Parser;

fn main() {
    let cli = cubic_weil_cli::Cli::parse();
    std::process::exit(cubic_weil_cli::run(cli));
}
