fn main() {
    std::process::exit(entgrowth::cli::run_from(std::env::args_os()));
}
