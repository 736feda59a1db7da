fn main() {
    std::process::exit(lpball::cli::run_cli(std::env::args()));
}
