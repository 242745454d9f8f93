use clap::Parser;

fn main() {
    let cli = synchrowave::cli::Cli::parse();
    if let Err(e) = synchrowave::cli::run(cli) {
        eprintln!("error: {}", e.message);
        std::process::exit(e.code);
    }
}
