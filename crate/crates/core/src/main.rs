fn main() {
    std::process::exit(stablerank::cli::run(std::env::args_os()));
}
