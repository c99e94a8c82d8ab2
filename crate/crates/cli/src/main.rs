fn main() {
    std::process::exit(bbm92_cli::run(std::env::args().collect()));
}
