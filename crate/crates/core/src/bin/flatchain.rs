fn main() {
    std::process::exit(flatchain::cli::run(std::env::args_os()));
}
