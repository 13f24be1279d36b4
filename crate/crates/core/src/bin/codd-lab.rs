fn main() {
    std::process::exit(codd_core::cli::run(std::env::args_os()));
}
