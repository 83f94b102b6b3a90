use clap::Parser;

fn main() {
    let cli = tfmetro::Cli::parse();
    if let Err(e) = tfmetro::run(cli) {
        eprintln!("tfmetro: {e}");
        std::process::exit(e.exit_code());
    }
}
