use clap::Parser;

fn main() {
    let cli = sgat_harness::cli::Cli::parse();
    if let Err(e) = sgat_harness::cli::run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
