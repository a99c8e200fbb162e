use clap::Parser;

fn main() {
    let cli = cqres_cli::Cli::parse();
    std::process::exit(cqres_cli::run(&cli));
}
