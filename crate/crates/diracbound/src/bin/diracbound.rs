use clap::Parser;

fn main() {
    let cli = diracbound::cli::Cli::parse();
    std::process::exit(diracbound::cli::run(cli));
}
